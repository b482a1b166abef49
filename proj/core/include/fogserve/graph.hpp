#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "fogserve/types.hpp"

namespace fogserve {

/// Undirected, unweighted graph with dense per-vertex feature rows.
///
/// Edges are stored canonically (u < v, lexicographically sorted) and mirrored
/// into a CSR adjacency whose neighbor lists are ascending. The object is
/// immutable after construction.
class Graph {
 public:
  using Edge = std::pair<VertexId, VertexId>;

  Graph() = default;

  /// Validates and canonicalizes `edges`. Throws InvariantError on self-loops,
  /// duplicate undirected edges, or endpoints outside [0, vertex_count).
  Graph(std::uint32_t vertex_count, std::vector<Edge> edges, std::uint32_t feature_dim,
        std::vector<double> features, std::optional<std::vector<std::int32_t>> labels = std::nullopt);

  std::uint32_t vertex_count() const { return vertex_count_; }
  std::size_t edge_count() const { return edges_.size(); }
  std::uint32_t feature_dim() const { return feature_dim_; }
  /// Bits per stored feature element (features are 64-bit floats).
  static constexpr std::uint32_t feature_bitwidth() { return 64; }
  /// Size in bytes of one vertex's raw feature vector.
  std::size_t feature_bytes() const { return std::size_t{feature_dim_} * feature_bitwidth() / 8; }

  std::span<const Edge> edges() const { return edges_; }
  std::span<const VertexId> neighbors(VertexId v) const {
    return {adjacency_.data() + offsets_[v], adjacency_.data() + offsets_[v + 1]};
  }
  std::uint32_t degree(VertexId v) const { return static_cast<std::uint32_t>(offsets_[v + 1] - offsets_[v]); }
  std::uint32_t max_degree() const;

  std::span<const double> feature(VertexId v) const {
    return {features_.data() + std::size_t{v} * feature_dim_, feature_dim_};
  }
  std::span<const double> features() const { return features_; }
  const std::optional<std::vector<std::int32_t>>& labels() const { return labels_; }

  /// Same topology with a different feature matrix.
  Graph with_features(std::vector<double> features) const;
  Graph with_labels(std::vector<std::int32_t> labels) &&;

  friend bool operator==(const Graph& a, const Graph& b);

 private:
  std::uint32_t vertex_count_ = 0;
  std::uint32_t feature_dim_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::uint64_t> offsets_{0};
  std::vector<VertexId> adjacency_;
  std::vector<double> features_;
  std::optional<std::vector<std::int32_t>> labels_;
};

/// Subgraph size descriptor: vertex count plus the external one-hop neighbor union.
struct Cardinality {
  std::uint64_t num_vertices = 0;
  std::uint64_t num_neighbors = 0;

  friend bool operator==(const Cardinality&, const Cardinality&) = default;
};

/// Empirical CDF of vertex degrees, stored with exact integer counts.
class DegreeCdf {
 public:
  DegreeCdf() = default;
  explicit DegreeCdf(std::span<const std::uint32_t> degrees);

  std::uint64_t vertex_count() const { return vertex_count_; }
  std::uint32_t max_degree() const { return max_degree_; }

  /// Number of vertices with degree <= d.
  std::uint64_t count_at_most(std::int64_t d) const;
  /// Number of vertices with degree < d.
  std::uint64_t count_below(std::int64_t d) const { return count_at_most(d - 1); }

  /// F_D(d) = P(D <= d).
  double at(std::int64_t d) const;
  /// P(D < d), the left limit of F_D at d.
  double below(std::int64_t d) const;

  /// Distinct degrees in ascending order with their cumulative probabilities.
  std::span<const std::uint32_t> support() const { return support_; }
  std::span<const double> cumulative() const { return cumulative_; }

 private:
  std::uint64_t vertex_count_ = 0;
  std::uint32_t max_degree_ = 0;
  std::vector<std::uint32_t> support_;
  std::vector<std::uint64_t> cumulative_counts_;
  std::vector<double> cumulative_;
};

DegreeCdf degree_cdf(const Graph& g);

/// Counts `vertices` and the distinct one-hop neighbors lying outside the set.
/// `vertices` must not contain duplicates.
Cardinality measure_cardinality(const Graph& g, std::span<const VertexId> vertices);

enum class SampleMode {
  uniform,  ///< uniformly random vertex set
  ball,     ///< BFS ball grown from a uniformly random root (restarts on exhaustion)
};

struct SubgraphSample {
  std::vector<VertexId> vertices;  ///< ascending
  Cardinality cardinality;         ///< measured, not the requested target
};

/// Draws a vertex set of size `target.num_vertices`; `target.num_neighbors` is
/// advisory only. Throws ArgumentError when the target exceeds the graph.
SubgraphSample sample_subgraph(const Graph& g, const Cardinality& target, std::uint64_t seed,
                               SampleMode mode = SampleMode::uniform);

/// Number of edges whose endpoints are assigned to different parts.
std::uint64_t edge_cut(const Graph& g, std::span<const std::uint32_t> part_of);

// On-disk layout: a directory with edges.txt, features.bin and optional labels.txt.
Graph load_graph(const std::filesystem::path& dir);
void save_graph(const Graph& g, const std::filesystem::path& dir);

}  // namespace fogserve
