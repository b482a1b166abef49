#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "fogserve/cluster.hpp"
#include "fogserve/profiler.hpp"
#include "fogserve/simulator.hpp"

namespace fogserve {

/// mu_j = T_j / mean(T) and the count of fogs above the slackness factor.
struct BalanceState {
  std::vector<double> mu;
  double lambda = 1.25;
  double theta = 0.5;
  std::uint32_t overloaded = 0;

  double max_mu() const;
};

/// Throws ArgumentError on an empty list, a non-positive time or lambda <= 1.
BalanceState compute_indicators(std::span<const double> times_ms, double lambda = 1.25, double theta = 0.5);

enum class ScheduleMode { none, diffuse, replan };
std::string to_string(ScheduleMode m);

/// none when nothing exceeds lambda, diffuse when overloaded/n <= theta, replan otherwise.
ScheduleMode select_mode(const BalanceState& state);

/// eta_j = measured_j / omega_j(card_j); 1 where the model predicts nothing.
std::vector<double> estimate_loads(const Placement& placement, const Graph& g, std::span<const LatencyModel> models,
                                   std::span<const double> measured_ms);

/// eta_j * omega_j(card_j) for every fog.
std::vector<double> predicted_times(const Placement& placement, const Graph& g, std::span<const LatencyModel> models,
                                    std::span<const double> loads);

struct MigrationStep {
  VertexId vertex = 0;
  FogId from = 0;
  FogId to = 0;
  double predicted_max_before = 0.0;
  double predicted_max_after = 0.0;
};

struct DiffusionResult {
  Placement placement;
  std::vector<MigrationStep> steps;
  double predicted_max_mu = 0.0;
};

/// Moves boundary vertices one at a time from the fog with the highest
/// predicted time to the lowest one that can take a vertex, choosing the
/// vertex with the most neighbors already there (ties: lowest id). A move is
/// made only if it lowers the larger of the two predictions. Stops once the
/// predicted max mu is within lambda, nothing improves, or `max_migrations`
/// (default 2|V|/n) is reached.
DiffusionResult diffuse(const Placement& placement, const Graph& g, std::span<const LatencyModel> models,
                        std::span<const double> loads, double lambda = 1.25,
                        std::optional<std::uint64_t> max_migrations = std::nullopt);

struct SchedulerConfig {
  double lambda = 1.25;
  double theta = 0.5;
  double imbalance = 0.03;
  std::uint64_t seed = 0;
  double phi_bytes = 256.0;  ///< per-vertex upload size used when replanning
};

struct ScheduleResult {
  ScheduleMode mode = ScheduleMode::none;
  BalanceState state;
  Placement placement;
  std::uint64_t migrations = 0;
  double predicted_max_mu = 0.0;  ///< after the adjustment
  std::vector<MigrationStep> steps;
};

/// One pass of the dual-mode scheduler with per-fog load factors `loads`.
/// The returned placement is a proposal; callers commit it between rounds.
ScheduleResult schedule(const Placement& placement, const Graph& g, const FogCluster& cluster,
                        std::span<const LatencyModel> models, std::span<const double> loads,
                        const SchedulerConfig& config = {});

/// Background load multipliers per round and fog.
class LoadTrace {
 public:
  LoadTrace() = default;
  LoadTrace(std::uint32_t rounds, std::uint32_t fogs, double fill = 1.0)
      : rounds_(rounds), fogs_(fogs), values_(std::size_t{rounds} * fogs, fill) {}

  std::uint32_t rounds() const { return rounds_; }
  std::uint32_t fogs() const { return fogs_; }
  double at(std::uint32_t round, FogId fog) const { return values_.at(std::size_t{round} * fogs_ + fog); }
  void set(std::uint32_t round, FogId fog, double multiplier);
  std::vector<double> round(std::uint32_t r) const;

 private:
  std::uint32_t rounds_ = 0;
  std::uint32_t fogs_ = 0;
  std::vector<double> values_;
};

/// Flat 1.0 for `lead` rounds, linear ramp to `peak` over `ramp` rounds, hold
/// for `hold` rounds, ramp back down and stay flat for `tail` rounds.
LoadTrace spike_trace(std::uint32_t fogs, FogId fog, double peak, std::uint32_t lead, std::uint32_t ramp,
                      std::uint32_t hold, std::uint32_t tail);

struct TraceRound {
  std::uint32_t round = 0;
  double scheduled_ms = 0.0;
  double unscheduled_ms = 0.0;
  ScheduleMode mode = ScheduleMode::none;
  std::uint64_t migrations = 0;
  double predicted_max_mu = 0.0;
};

struct TraceResult {
  std::vector<TraceRound> rounds;
  std::vector<MigrationStep> steps;  ///< every diffusion migration across the replay
  double scheduled_peak_ms() const;
  double unscheduled_peak_ms() const;
};

/// Per round: scale the true loads by the trace, serve both the scheduled and
/// the fixed initial placement, then let the scheduler propose the next
/// placement from the measured execution times.
TraceResult replay_trace(const ServingSystem& system, const LoadTrace& trace, double lambda = 1.25,
                         double theta = 0.5, std::uint64_t seed = 0);

}  // namespace fogserve
