#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "fogserve/graph.hpp"
#include "fogserve/profiler.hpp"

namespace fogserve {

struct FogNode {
  FogId id = 0;
  std::string type;                   ///< free-form label, e.g. "A", "B", "C"
  double bandwidth_bytes_per_s = 0.0;  ///< device -> fog collection bandwidth b_j
  double access_latency_ms = 0.0;      ///< fixed device -> fog access delay
  LatencyModel cost;                  ///< ground-truth execution cost used by the simulator
};

struct FogCluster {
  std::vector<FogNode> nodes;
  double sync_cost_ms = 0.0;  ///< delta, one inter-fog synchronization
  std::uint32_t layers = 2;   ///< K, number of BSP supersteps

  std::uint32_t size() const { return static_cast<std::uint32_t>(nodes.size()); }
  /// Throws ArgumentError unless n >= 1, delta >= 0 and every b_j > 0.
  void validate() const;
  /// First `count` nodes, same delta and K.
  FogCluster truncated(std::uint32_t count) const;
};

/// Total vertex -> fog map with per-fog vertex lists kept sorted.
class Placement {
 public:
  Placement() = default;
  Placement(std::vector<FogId> fog_of, std::uint32_t fog_count);
  /// Partition k goes to fog assignment[k].
  static Placement from_partitions(std::span<const std::vector<VertexId>> partitions,
                                   std::span<const FogId> assignment, std::uint32_t vertex_count);

  std::uint32_t fog_count() const { return static_cast<std::uint32_t>(members_.size()); }
  std::uint32_t vertex_count() const { return static_cast<std::uint32_t>(fog_of_.size()); }
  FogId fog_of(VertexId v) const { return fog_of_[v]; }
  std::span<const FogId> assignment() const { return fog_of_; }
  std::span<const VertexId> vertices_on(FogId j) const { return members_[j]; }

  Cardinality cardinality(const Graph& g, FogId j) const;
  /// Vertices on fog j with at least one neighbor on another fog, ascending.
  std::vector<VertexId> boundary(const Graph& g, FogId j) const;
  /// Vertices on other fogs adjacent to fog j (the halo fog j must receive), ascending.
  std::vector<VertexId> halo(const Graph& g, FogId j) const;

  void move(VertexId v, FogId to);

  friend bool operator==(const Placement& a, const Placement& b) { return a.fog_of_ == b.fog_of_; }

 private:
  std::vector<FogId> fog_of_;
  std::vector<std::vector<VertexId>> members_;
};

/// "vertex_id fog_id" per line, ascending by vertex.
void save_placement(const Placement& placement, const std::filesystem::path& path);
Placement load_placement(const std::filesystem::path& path, std::uint32_t vertex_count, std::uint32_t fog_count);

}  // namespace fogserve
