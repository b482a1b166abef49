#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fogserve/planner.hpp"
#include "fogserve/scheduler.hpp"
#include "fogserve/simulator.hpp"

namespace fogserve {

/// JSON scenario document. Missing fields keep their defaults; a node with a
/// "type" but no "cost" gets that type's reference cost.
Scenario parse_scenario(std::string_view json);
std::string format_scenario(const Scenario& scenario);
/// Throws ParseError("scenario not found: ...") when the file is missing.
Scenario load_scenario(const std::filesystem::path& path);
void save_scenario(const Scenario& scenario, const std::filesystem::path& path);

/// Per-fog predictions, assignment and makespan as JSON.
std::string plan_report_json(const PlanResult& plan, const FogCluster& cluster);

/// "strategy,seed,t_colle_ms,t_exec_ms,e2e_ms,throughput_per_s,flip_rate", per-fog
/// columns ';'-joined, rows sorted by strategy then seed.
std::string results_csv(std::vector<ServingReport> reports);

/// CSV "round,fog_id,load_multiplier"; missing entries default to 1.
LoadTrace parse_load_trace(std::string_view csv, std::uint32_t fogs);
LoadTrace load_load_trace(const std::filesystem::path& path, std::uint32_t fogs);
std::string format_load_trace(const LoadTrace& trace);

/// "round,mode,migrations,predicted_max_mu".
std::string scheduler_log_csv(const TraceResult& result);
/// "round,scheduled_ms,unscheduled_ms".
std::string trajectory_csv(const TraceResult& result);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace fogserve
