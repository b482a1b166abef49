#pragma once

// Independent reference implementations used to check the library. They are
// deliberately naive: brute force, dense loops, edge lists instead of CSR.

#include <array>
#include <cstdint>
#include <vector>

#include "fogserve/gnn.hpp"
#include "fogserve/graph.hpp"
#include "fogserve/matching.hpp"

namespace fogserve::verify {

/// min over all n! permutations of the largest selected entry.
double brute_force_bottleneck(const CostMatrix& costs);

/// Maximum matching size via unit-capacity max flow (Edmonds-Karp).
std::uint32_t max_flow_matching_size(const BipartiteMask& mask);

/// Dense per-vertex outputs of a K-layer model, recomputed from the edge list.
std::vector<std::vector<double>> reference_inference(const GnnModel& model, const Graph& g);

/// Sum of per-vertex widths divided by |V| * 64, degrees bucketed by direct comparison.
double reference_bit_ratio(std::span<const std::uint32_t> degrees, const std::array<std::uint32_t, 3>& thresholds,
                           const std::array<std::uint8_t, 4>& bits);
/// Numerator of the same ratio in bits.
std::uint64_t reference_bit_count(std::span<const std::uint32_t> degrees, const std::array<std::uint32_t, 3>& thresholds,
                                  const std::array<std::uint8_t, 4>& bits);

/// Neighbor-union size of a vertex set, recomputed with a std::set.
std::uint64_t reference_neighbor_count(const Graph& g, std::span<const VertexId> vertices);

/// max |a - b| / max(|a|, |b|) over matching entries (0 when both are 0).
double max_relative_error(std::span<const double> a, std::span<const double> b);

}  // namespace fogserve::verify
