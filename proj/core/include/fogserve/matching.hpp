#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fogserve/types.hpp"

namespace fogserve {

/// Square matrix of partition -> fog costs in ms, row k = partition, column j = fog.
class CostMatrix {
 public:
  CostMatrix() = default;
  explicit CostMatrix(std::uint32_t n, double fill = 0.0) : n_(n), values_(std::size_t{n} * n, fill) {}
  /// Throws DimensionError unless every row has rows.size() entries.
  static CostMatrix from_rows(const std::vector<std::vector<double>>& rows);

  std::uint32_t size() const { return n_; }
  double operator()(std::uint32_t k, std::uint32_t j) const { return values_[std::size_t{k} * n_ + j]; }
  double& operator()(std::uint32_t k, std::uint32_t j) { return values_[std::size_t{k} * n_ + j]; }
  std::span<const double> row(std::uint32_t k) const { return {values_.data() + std::size_t{k} * n_, n_}; }
  std::span<const double> values() const { return values_; }

 private:
  std::uint32_t n_ = 0;
  std::vector<double> values_;
};

/// n x n boolean mask of admissible partition -> fog edges.
class BipartiteMask {
 public:
  explicit BipartiteMask(std::uint32_t n) : n_(n), allowed_(std::size_t{n} * n, 0) {}
  std::uint32_t size() const { return n_; }
  bool operator()(std::uint32_t k, std::uint32_t j) const { return allowed_[std::size_t{k} * n_ + j] != 0; }
  void set(std::uint32_t k, std::uint32_t j, bool on = true) { allowed_[std::size_t{k} * n_ + j] = on ? 1 : 0; }

 private:
  std::uint32_t n_;
  std::vector<std::uint8_t> allowed_;
};

struct MatchingResult {
  std::vector<std::int32_t> fog_of_partition;  ///< -1 when unmatched
  std::uint32_t size = 0;
  bool perfect() const { return size == fog_of_partition.size(); }
};

/// Maximum-cardinality matching by augmenting paths. Rows are processed in
/// ascending order and columns tried in ascending order.
MatchingResult maximum_matching(const BipartiteMask& mask);
/// The matching when it covers every row, nothing otherwise.
std::optional<std::vector<FogId>> perfect_matching(const BipartiteMask& mask);

struct Assignment {
  std::vector<FogId> fog_of_partition;
  double bottleneck = 0.0;               ///< largest selected entry, ms
  std::uint32_t feasibility_tests = 0;  ///< perfect-matching checks performed (LBAP only)
};

/// Largest cost selected by `fog_of_partition`.
double bottleneck_of(const CostMatrix& costs, std::span<const FogId> fog_of_partition);

/// Bottleneck-optimal bijection: binary search over the sorted distinct
/// entries, each step testing for a perfect matching among entries <= threshold.
/// Ties at the optimal bottleneck are broken toward the bijection whose next
/// largest costs are smallest (one pair fixed at a time).
Assignment lbap_assign(const CostMatrix& costs);

/// Partitions in descending row-mean order each take the cheapest unused fog
/// (ties: lower partition index first, lower fog id).
Assignment greedy_assign(const CostMatrix& costs);

/// Seeded uniform bijection.
Assignment random_assign(const CostMatrix& costs, std::uint64_t seed);

}  // namespace fogserve
