#pragma once

#include <cstdint>
#include <string_view>

#include "fogserve/graph.hpp"

namespace fogserve {

/// Recursive-matrix generator settings. Quadrant probabilities must sum to 1.
struct RmatParams {
  std::uint32_t num_vertices = 0;
  double density = 0.0;  ///< fraction of the n(n-1)/2 possible undirected edges
  std::uint32_t feature_dim = 32;
  std::uint32_t num_classes = 8;
  std::uint64_t seed = 0;
  double a = 0.57;
  double b = 0.19;
  double c = 0.19;
  double d = 0.05;
  double zero_fraction = 0.0;  ///< probability that a feature element is exactly 0
};

/// ceil(density * n(n-1)/2), the exact edge count generate_rmat produces.
std::uint64_t rmat_target_edges(std::uint32_t num_vertices, double density);

/// Deterministic for a fixed RmatParams. Features are i.i.d. uniform in [-1, 1]
/// (with `zero_fraction` of elements zeroed), labels come from multi-source
/// label propagation seeded at `num_classes` random vertices.
Graph generate_rmat(const RmatParams& params);

/// The RMAT-20K ... RMAT-100K dataset rows: 32-dim features, 8 classes, density 0.001.
RmatParams rmat_preset(std::string_view name, std::uint64_t seed = 1);

}  // namespace fogserve
