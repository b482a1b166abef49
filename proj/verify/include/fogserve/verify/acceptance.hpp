#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace fogserve::verify {

struct CheckResult {
  std::string id;
  std::string title;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

struct SuiteOptions {
  bool quick = false;  ///< smaller instance counts and graphs
  std::uint64_t seed = 1;
};

struct CriterionInfo {
  std::string id;
  std::string title;
};

/// The ten acceptance criteria, "C1" ... "C10".
const std::vector<CriterionInfo>& criteria();

/// Runs one criterion by id; unknown ids throw ArgumentError.
CheckResult run_criterion(const std::string& id, const SuiteOptions& options);
std::vector<CheckResult> run_acceptance(const SuiteOptions& options);

/// Oracle suite: bottleneck assignment vs brute force, distributed vs
/// centralized inference, bit-ratio closed form vs counting, codec round
/// trips, plus an integrity check of a weights file when one is given.
std::vector<CheckResult> run_oracle_suite(const SuiteOptions& options,
                                          const std::optional<std::filesystem::path>& weights = std::nullopt);

/// "[PASS] C1 title: detail (1.2 s)".
std::string format_result(const CheckResult& r);

}  // namespace fogserve::verify
