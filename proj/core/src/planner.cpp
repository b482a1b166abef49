#include "fogserve/planner.hpp"

#include <algorithm>

#include "fogserve/partition.hpp"

namespace fogserve {

namespace {

double collection_ms(std::uint64_t vertices, const FogNode& node, double phi_bytes) {
  return static_cast<double>(vertices) * phi_bytes / node.bandwidth_bytes_per_s * 1000.0 + node.access_latency_ms;
}

}  // namespace

CostMatrix cost_matrix(std::span<const Cardinality> cardinalities, const FogCluster& cluster,
                       std::span<const LatencyModel> models, double phi_bytes) {
  cluster.validate();
  const auto n = cluster.size();
  if (cardinalities.size() != n) throw DimensionError("need one partition per fog node");
  if (models.size() != n) throw DimensionError("need one latency model per fog node");
  if (!(phi_bytes >= 0.0)) throw ArgumentError("phi must be non-negative");
  const double sync = cluster.layers * cluster.sync_cost_ms;
  CostMatrix costs(n);
  for (std::uint32_t k = 0; k < n; ++k)
    for (std::uint32_t j = 0; j < n; ++j)
      costs(k, j) = collection_ms(cardinalities[k].num_vertices, cluster.nodes[j], phi_bytes) +
                    models[j].predict(cardinalities[k]) + sync;
  return costs;
}

CostMatrix cost_matrix(const Graph& g, std::span<const std::vector<VertexId>> partitions, const FogCluster& cluster,
                       std::span<const LatencyModel> models, double phi_bytes) {
  std::vector<Cardinality> cards;
  cards.reserve(partitions.size());
  for (const auto& p : partitions) cards.push_back(measure_cardinality(g, p));
  return cost_matrix(cards, cluster, models, phi_bytes);
}

std::string to_string(AssignStrategy s) {
  switch (s) {
    case AssignStrategy::lbap: return "lbap";
    case AssignStrategy::greedy: return "greedy";
    case AssignStrategy::random: return "random";
  }
  return "?";
}

AssignStrategy parse_assign_strategy(const std::string& name) {
  if (name == "lbap") return AssignStrategy::lbap;
  if (name == "greedy") return AssignStrategy::greedy;
  if (name == "random") return AssignStrategy::random;
  throw ArgumentError("unknown assignment strategy: " + name);
}

PlanResult place_partitions(const Graph& g, std::vector<std::vector<VertexId>> partitions, const FogCluster& cluster,
                            std::span<const LatencyModel> models, double phi_bytes, AssignStrategy strategy,
                            std::uint64_t seed) {
  const auto n = cluster.size();
  std::vector<Cardinality> cards;
  for (const auto& p : partitions) cards.push_back(measure_cardinality(g, p));
  PlanResult r;
  r.strategy = strategy;
  r.costs = cost_matrix(cards, cluster, models, phi_bytes);

  Assignment a;
  switch (strategy) {
    case AssignStrategy::lbap: a = lbap_assign(r.costs); break;
    case AssignStrategy::greedy: a = greedy_assign(r.costs); break;
    case AssignStrategy::random: a = random_assign(r.costs, seed); break;
  }
  r.fog_of_partition = std::move(a.fog_of_partition);
  r.feasibility_tests = a.feasibility_tests;
  r.placement = Placement::from_partitions(partitions, r.fog_of_partition, g.vertex_count());

  r.per_fog.resize(n);
  const double sync = cluster.layers * cluster.sync_cost_ms;
  for (std::uint32_t k = 0; k < n; ++k) {
    const auto j = r.fog_of_partition[k];
    auto& p = r.per_fog[j];
    p.fog = j;
    p.partition = k;
    p.cardinality = cards[k];
    p.collection_ms = collection_ms(cards[k].num_vertices, cluster.nodes[j], phi_bytes);
    p.execution_ms = models[j].predict(cards[k]) + sync;
    r.predicted_makespan_ms = std::max(r.predicted_makespan_ms, p.total_ms());
  }
  r.partitions = std::move(partitions);
  return r;
}

PlanResult plan(const Graph& g, const FogCluster& cluster, std::span<const LatencyModel> models, double phi_bytes,
                const PlanOptions& options) {
  cluster.validate();
  auto parts = balanced_partition(g, cluster.size(), options.imbalance, options.seed);
  return place_partitions(g, std::move(parts), cluster, models, phi_bytes, AssignStrategy::lbap);
}

PlanResult baseline_assign(const Graph& g, std::vector<std::vector<VertexId>> partitions, const FogCluster& cluster,
                           std::span<const LatencyModel> models, double phi_bytes, AssignStrategy strategy,
                           std::uint64_t seed) {
  return place_partitions(g, std::move(partitions), cluster, models, phi_bytes, strategy, seed);
}

}  // namespace fogserve
