#include <doctest.h>

#include "fogserve/planner.hpp"
#include "fogserve/simulator.hpp"
#include "fogserve/types.hpp"
#include "helpers.hpp"

using namespace fogserve;
using namespace fogserve::testing;

namespace {

FogCluster uniform_cluster(std::uint32_t n, double bandwidth, double delta, std::uint32_t layers) {
  FogCluster c;
  for (FogId j = 0; j < n; ++j) c.nodes.push_back({j, "B", bandwidth, 0.0, {}});
  c.sync_cost_ms = delta;
  c.layers = layers;
  return c;
}

Graph ring(std::uint32_t n) {
  std::vector<Graph::Edge> edges;
  for (VertexId v = 0; v < n; ++v) edges.emplace_back(std::min(v, (v + 1) % n), std::max(v, (v + 1) % n));
  return make_graph(n, std::move(edges));
}

}  // namespace

TEST_CASE("collection term alone") {
  const auto c = uniform_cluster(1, 1.0e6, 0.0, 1);
  const std::vector<Cardinality> cards{{10, 0}};
  const std::vector<LatencyModel> zero(1);
  CHECK(cost_matrix(cards, c, zero, 400.0)(0, 0) == doctest::Approx(4.0));
}

TEST_CASE("synchronization term alone") {
  const auto c = uniform_cluster(3, 1.0e6, 2.0, 3);
  const std::vector<Cardinality> cards{{0, 0}, {0, 0}, {0, 0}};
  const std::vector<LatencyModel> zero(3);
  const auto m = cost_matrix(cards, c, zero, 400.0);
  for (std::uint32_t k = 0; k < 3; ++k)
    for (std::uint32_t j = 0; j < 3; ++j) CHECK(m(k, j) == doctest::Approx(6.0));
}

TEST_CASE("mixed three by three evaluated by hand") {
  FogCluster c;
  c.nodes = {{0, "A", 1.0e6, 1.0, {}}, {1, "B", 2.0e6, 0.0, {}}, {2, "C", 4.0e6, 2.0, {}}};
  c.sync_cost_ms = 1.5;
  c.layers = 2;
  const std::vector<Cardinality> cards{{100, 20}, {50, 40}, {10, 0}};
  const std::vector<LatencyModel> models{{0.1, 0.05, 2.0, 0}, {0.05, 0.02, 1.0, 0}, {0.02, 0.01, 0.5, 0}};
  const auto m = cost_matrix(cards, c, models, 1000.0);
  // P1 on f1: 100*1000/1e6*1000 = 100 ms upload, +1 access, +10+1+2 compute, +3 sync
  CHECK(m(0, 0) == doctest::Approx(117.0));
  // P2 on f2: 25 ms upload, 2.5+0.8+1 compute, 3 sync
  CHECK(m(1, 1) == doctest::Approx(32.3));
  // P3 on f3: 2.5 upload, 2 access, 0.2+0+0.5 compute, 3 sync
  CHECK(m(2, 2) == doctest::Approx(8.2));
  // P1 on f3: 25 + 2 + (2 + 0.2 + 0.5) + 3
  CHECK(m(0, 2) == doctest::Approx(32.7));
}

TEST_CASE("homogeneous cluster on a ring gives near-equal totals") {
  const auto g = ring(400);
  const auto c = uniform_cluster(4, 8.0e6, 10.0, 2);
  const std::vector<LatencyModel> models(4, fog_type_cost("B"));
  const auto p = plan(g, c, models, 256.0, {0.03, 1});
  double lo = 1e300, hi = 0;
  for (const auto& f : p.per_fog) {
    lo = std::min(lo, f.total_ms());
    hi = std::max(hi, f.total_ms());
  }
  CHECK(hi <= lo * 1.03);
  CHECK(p.predicted_makespan_ms == doctest::Approx(hi));
}

TEST_CASE("fast node takes the heavier partition when that lowers the bottleneck") {
  const auto g = random_graph(300, 6.0, 1, 4);
  auto c = uniform_cluster(2, 8.0e6, 10.0, 2);
  const std::vector<LatencyModel> models{fog_type_cost("C"), fog_type_cost("A")};
  const auto p = plan(g, c, models, 256.0, {0.03, 2});
  const auto& m = p.costs;
  const std::vector<FogId> swapped{p.fog_of_partition[1], p.fog_of_partition[0]};
  CHECK(bottleneck_of(m, p.fog_of_partition) <= bottleneck_of(m, swapped));
  // heavier partition by workload on the fast node whenever it is strictly better
  const std::uint32_t heavy = models[0].predict(measure_cardinality(g, p.partitions[0])) >=
                                      models[0].predict(measure_cardinality(g, p.partitions[1]))
                                  ? 0
                                  : 1;
  const std::vector<FogId> heavy_fast = heavy == 0 ? std::vector<FogId>{0, 1} : std::vector<FogId>{1, 0};
  const std::vector<FogId> heavy_slow{heavy_fast[1], heavy_fast[0]};
  if (bottleneck_of(m, heavy_fast) < bottleneck_of(m, heavy_slow)) CHECK(p.fog_of_partition == heavy_fast);
}

TEST_CASE("plan beats random on heterogeneous clusters") {
  int wins = 0;
  double plan_sum = 0, greedy_sum = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const auto g = random_graph(600, 6.0, 4, seed);
    const auto s = random_heterogeneous_scenario(seed);
    std::vector<LatencyModel> models;
    for (const auto& n : s.cluster.nodes) models.push_back(n.cost);
    const auto p = plan(g, s.cluster, models, static_cast<double>(g.feature_bytes()), {0.03, seed});
    const auto r = place_partitions(g, p.partitions, s.cluster, models, g.feature_bytes(), AssignStrategy::random, seed);
    const auto gr = place_partitions(g, p.partitions, s.cluster, models, g.feature_bytes(), AssignStrategy::greedy);
    wins += p.predicted_makespan_ms <= r.predicted_makespan_ms;
    plan_sum += p.predicted_makespan_ms;
    greedy_sum += gr.predicted_makespan_ms;
  }
  CHECK(wins >= 95);
  CHECK(plan_sum <= greedy_sum);
}

TEST_CASE("baselines") {
  const auto g = random_graph(200, 5.0, 2, 3);
  const auto s = standard_scenario();
  std::vector<LatencyModel> models;
  for (const auto& n : s.cluster.nodes) models.push_back(n.cost);
  const auto p = plan(g, s.cluster, models, 128.0, {0.03, 3});
  const auto a = baseline_assign(g, p.partitions, s.cluster, models, 128.0, AssignStrategy::random, 5);
  const auto b = baseline_assign(g, p.partitions, s.cluster, models, 128.0, AssignStrategy::random, 5);
  CHECK(a.placement == b.placement);

  auto one = s.cluster.truncated(1);
  const std::vector<LatencyModel> m1{models[0]};
  const auto single = plan(g, one, m1, 128.0, {0.03, 3});
  const auto base = baseline_assign(g, single.partitions, one, m1, 128.0, AssignStrategy::greedy, 0);
  CHECK(single.placement == base.placement);
  CHECK(single.predicted_makespan_ms == doctest::Approx(base.predicted_makespan_ms));
  CHECK(parse_assign_strategy("greedy") == AssignStrategy::greedy);
  CHECK_THROWS_AS(parse_assign_strategy("best"), ArgumentError);
}
