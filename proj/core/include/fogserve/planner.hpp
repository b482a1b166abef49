#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fogserve/cluster.hpp"
#include "fogserve/graph.hpp"
#include "fogserve/matching.hpp"
#include "fogserve/profiler.hpp"

namespace fogserve {

/// Entry (k, j) = |P_k| * phi / b_j + access_j + omega_j(card(P_k)) + K * delta, in ms.
/// `cardinalities[k].num_vertices` is |P_k|.
CostMatrix cost_matrix(std::span<const Cardinality> cardinalities, const FogCluster& cluster,
                       std::span<const LatencyModel> models, double phi_bytes);
CostMatrix cost_matrix(const Graph& g, std::span<const std::vector<VertexId>> partitions, const FogCluster& cluster,
                       std::span<const LatencyModel> models, double phi_bytes);

enum class AssignStrategy { lbap, greedy, random };
std::string to_string(AssignStrategy s);
AssignStrategy parse_assign_strategy(const std::string& name);

struct FogPrediction {
  FogId fog = 0;
  std::uint32_t partition = 0;
  Cardinality cardinality;
  double collection_ms = 0.0;
  double execution_ms = 0.0;  ///< omega_j + K * delta
  double total_ms() const { return collection_ms + execution_ms; }
};

struct PlanResult {
  AssignStrategy strategy = AssignStrategy::lbap;
  std::vector<std::vector<VertexId>> partitions;
  std::vector<FogId> fog_of_partition;
  CostMatrix costs;
  Placement placement;
  std::vector<FogPrediction> per_fog;  ///< indexed by fog id
  double predicted_makespan_ms = 0.0;   ///< max_j (collection_j + execution_j)
  std::uint32_t feasibility_tests = 0;
};

struct PlanOptions {
  double imbalance = 0.03;
  std::uint64_t seed = 0;
};

/// Maps given partitions (one per fog) onto the cluster with the chosen strategy.
PlanResult place_partitions(const Graph& g, std::vector<std::vector<VertexId>> partitions, const FogCluster& cluster,
                            std::span<const LatencyModel> models, double phi_bytes, AssignStrategy strategy,
                            std::uint64_t seed = 0);

/// Balanced min-cut partitioning followed by bottleneck-optimal assignment.
PlanResult plan(const Graph& g, const FogCluster& cluster, std::span<const LatencyModel> models, double phi_bytes,
                const PlanOptions& options = {});

/// Partition-then-random or partition-then-greedy placement for comparison.
PlanResult baseline_assign(const Graph& g, std::vector<std::vector<VertexId>> partitions, const FogCluster& cluster,
                           std::span<const LatencyModel> models, double phi_bytes, AssignStrategy strategy,
                           std::uint64_t seed);

}  // namespace fogserve
