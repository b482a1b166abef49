#include "fogserve/matching.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>
#include <string>

namespace fogserve {

CostMatrix CostMatrix::from_rows(const std::vector<std::vector<double>>& rows) {
  const auto n = static_cast<std::uint32_t>(rows.size());
  CostMatrix m(n);
  for (std::uint32_t k = 0; k < n; ++k) {
    if (rows[k].size() != n) throw DimensionError("cost matrix row " + std::to_string(k) + " has wrong length");
    for (std::uint32_t j = 0; j < n; ++j) m(k, j) = rows[k][j];
  }
  return m;
}

namespace {

bool augment(const BipartiteMask& mask, std::uint32_t k, std::vector<char>& seen, std::vector<std::int32_t>& row_of_col,
             std::vector<std::int32_t>& col_of_row) {
  for (std::uint32_t j = 0; j < mask.size(); ++j) {
    if (!mask(k, j) || seen[j]) continue;
    seen[j] = 1;
    if (row_of_col[j] < 0 || augment(mask, static_cast<std::uint32_t>(row_of_col[j]), seen, row_of_col, col_of_row)) {
      row_of_col[j] = static_cast<std::int32_t>(k);
      col_of_row[k] = static_cast<std::int32_t>(j);
      return true;
    }
  }
  return false;
}

}  // namespace

MatchingResult maximum_matching(const BipartiteMask& mask) {
  const auto n = mask.size();
  MatchingResult result;
  result.fog_of_partition.assign(n, -1);
  std::vector<std::int32_t> row_of_col(n, -1);
  std::vector<char> seen(n);
  for (std::uint32_t k = 0; k < n; ++k) {
    std::fill(seen.begin(), seen.end(), 0);
    if (augment(mask, k, seen, row_of_col, result.fog_of_partition)) ++result.size;
  }
  return result;
}

std::optional<std::vector<FogId>> perfect_matching(const BipartiteMask& mask) {
  const auto m = maximum_matching(mask);
  if (!m.perfect()) return std::nullopt;
  return std::vector<FogId>(m.fog_of_partition.begin(), m.fog_of_partition.end());
}

double bottleneck_of(const CostMatrix& costs, std::span<const FogId> fog_of_partition) {
  if (fog_of_partition.size() != costs.size()) throw DimensionError("assignment length differs from matrix size");
  double worst = -std::numeric_limits<double>::infinity();
  for (std::uint32_t k = 0; k < costs.size(); ++k) worst = std::max(worst, costs(k, fog_of_partition[k]));
  return worst;
}

namespace {

// Smallest bottleneck over the square submatrix rows x cols, or nullopt if no
// perfect matching exists with entries <= cap.
std::optional<double> sub_bottleneck(const CostMatrix& costs, const std::vector<std::uint32_t>& rows,
                                     const std::vector<std::uint32_t>& cols, double cap) {
  const auto m = static_cast<std::uint32_t>(rows.size());
  if (m == 0) return -std::numeric_limits<double>::infinity();
  std::vector<double> levels;
  for (auto k : rows)
    for (auto j : cols)
      if (costs(k, j) <= cap) levels.push_back(costs(k, j));
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());
  auto feasible = [&](double tau) {
    BipartiteMask mask(m);
    for (std::uint32_t a = 0; a < m; ++a)
      for (std::uint32_t b = 0; b < m; ++b)
        if (costs(rows[a], cols[b]) <= tau) mask.set(a, b);
    return maximum_matching(mask).perfect();
  };
  if (levels.empty() || !feasible(levels.back())) return std::nullopt;
  std::size_t lo = 0, hi = levels.size() - 1;
  while (lo < hi) {
    const auto mid = lo + (hi - lo) / 2;
    if (feasible(levels[mid])) hi = mid;
    else lo = mid + 1;
  }
  return levels[hi];
}

// Lexicographic refinement: fix one pair at a time at the current bottleneck,
// choosing the pair that leaves the smallest bottleneck for the rest.
std::vector<FogId> lexicographic_within(const CostMatrix& costs, double cap) {
  const auto n = costs.size();
  std::vector<std::uint32_t> rows(n), cols(n);
  std::iota(rows.begin(), rows.end(), 0u);
  std::iota(cols.begin(), cols.end(), 0u);
  std::vector<FogId> out(n);
  while (!rows.empty()) {
    const double b = *sub_bottleneck(costs, rows, cols, cap);
    std::size_t best_r = 0, best_c = 0;
    double best_rest = std::numeric_limits<double>::infinity();
    bool found = false;
    for (std::size_t r = 0; r < rows.size(); ++r)
      for (std::size_t c = 0; c < cols.size(); ++c) {
        if (costs(rows[r], cols[c]) != b) continue;
        auto rest_rows = rows, rest_cols = cols;
        rest_rows.erase(rest_rows.begin() + static_cast<std::ptrdiff_t>(r));
        rest_cols.erase(rest_cols.begin() + static_cast<std::ptrdiff_t>(c));
        const auto rest = sub_bottleneck(costs, rest_rows, rest_cols, b);
        if (rest && (!found || *rest < best_rest)) {
          found = true;
          best_rest = *rest;
          best_r = r;
          best_c = c;
        }
      }
    out[rows[best_r]] = cols[best_c];
    rows.erase(rows.begin() + static_cast<std::ptrdiff_t>(best_r));
    cols.erase(cols.begin() + static_cast<std::ptrdiff_t>(best_c));
    cap = b;
  }
  return out;
}

}  // namespace

Assignment lbap_assign(const CostMatrix& costs) {
  const auto n = costs.size();
  for (double x : costs.values())
    if (!std::isfinite(x)) throw ArgumentError("cost matrix has a non-finite entry");
  Assignment out;
  if (n == 0) return out;

  std::vector<double> levels(costs.values().begin(), costs.values().end());
  std::sort(levels.begin(), levels.end());
  levels.erase(std::unique(levels.begin(), levels.end()), levels.end());

  auto try_threshold = [&](double tau) {
    BipartiteMask mask(n);
    for (std::uint32_t k = 0; k < n; ++k)
      for (std::uint32_t j = 0; j < n; ++j)
        if (costs(k, j) <= tau) mask.set(k, j);
    ++out.feasibility_tests;
    return perfect_matching(mask);
  };

  // Invariant: threshold levels[hi] admits a perfect matching (the largest
  // entry keeps the complete bipartite graph).
  std::size_t lo = 0, hi = levels.size() - 1;
  std::optional<std::vector<FogId>> best;
  while (lo < hi) {
    const auto mid = lo + (hi - lo) / 2;
    if (auto m = try_threshold(levels[mid])) {
      best = std::move(m);
      hi = mid;
    } else {
      lo = mid + 1;
    }
  }
  if (!best) best = try_threshold(levels[hi]);
  // Among bijections that reach the optimal bottleneck, prefer the one whose
  // sorted costs are lexicographically smallest.
  out.fog_of_partition = lexicographic_within(costs, levels[hi]);
  out.bottleneck = bottleneck_of(costs, out.fog_of_partition);
  return out;
}

Assignment greedy_assign(const CostMatrix& costs) {
  const auto n = costs.size();
  std::vector<double> load(n);
  for (std::uint32_t k = 0; k < n; ++k) {
    const auto r = costs.row(k);
    load[k] = std::accumulate(r.begin(), r.end(), 0.0) / n;
  }
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return load[a] > load[b]; });

  Assignment out;
  out.fog_of_partition.assign(n, 0);
  std::vector<char> used(n, 0);
  for (auto k : order) {
    std::uint32_t pick = n;
    for (std::uint32_t j = 0; j < n; ++j)
      if (!used[j] && (pick == n || costs(k, j) < costs(k, pick))) pick = j;
    used[pick] = 1;
    out.fog_of_partition[k] = pick;
  }
  if (n > 0) out.bottleneck = bottleneck_of(costs, out.fog_of_partition);
  return out;
}

Assignment random_assign(const CostMatrix& costs, std::uint64_t seed) {
  Assignment out;
  out.fog_of_partition.resize(costs.size());
  std::iota(out.fog_of_partition.begin(), out.fog_of_partition.end(), 0u);
  std::mt19937_64 rng(seed);
  std::shuffle(out.fog_of_partition.begin(), out.fog_of_partition.end(), rng);
  if (costs.size() > 0) out.bottleneck = bottleneck_of(costs, out.fog_of_partition);
  return out;
}

}  // namespace fogserve
