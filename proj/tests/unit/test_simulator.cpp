#include <doctest.h>

#include <cmath>

#include "fogserve/rmat.hpp"
#include "fogserve/simulator.hpp"
#include "fogserve/types.hpp"
#include "fogserve/verify/oracles.hpp"
#include "helpers.hpp"

using namespace fogserve;
using namespace fogserve::testing;

namespace {

Graph small_rmat(std::uint64_t seed, std::uint32_t n = 1500) {
  RmatParams p;
  p.num_vertices = n;
  p.density = 0.006;
  p.feature_dim = 16;
  p.seed = seed;
  return generate_rmat(p);
}

}  // namespace

TEST_CASE("event queue fires in time then insertion order") {
  EventQueue q;
  std::vector<int> order;
  q.schedule(5.0, [&] { order.push_back(2); });
  q.schedule(1.0, [&] {
    order.push_back(1);
    q.schedule(5.0, [&] { order.push_back(3); });
  });
  q.schedule(5.0, [&] { order.push_back(4); });
  CHECK(q.run() == 4);
  CHECK(order == std::vector<int>{1, 2, 4, 3});
  CHECK(q.now() == 5.0);
  CHECK_THROWS_AS(q.schedule(1.0, [] {}), ArgumentError);
}

TEST_CASE("collection timing") {
  FogCluster c;
  c.nodes = {{0, "B", 1.0e6, 0.0, {}}, {1, "B", 1.0e6, 3.0, {}}};
  c.sync_cost_ms = 0;
  std::vector<FogId> fog_of(10, 0);
  const Placement p(fog_of, 2);
  const std::vector<std::uint64_t> bytes{4000, 0};
  const auto t = simulate_collection(p, c, bytes);
  CHECK(t[0] == doctest::Approx(4.0));
  CHECK(t[1] == doctest::Approx(3.0));
}

TEST_CASE("single fog execution is the whole-graph cost plus sync") {
  const auto g = small_rmat(1, 500);
  FogCluster c;
  c.nodes = {{0, "B", 1.0e6, 0.0, fog_type_cost("B")}};
  c.sync_cost_ms = 10.0;
  c.layers = 2;
  const Placement p(std::vector<FogId>(g.vertex_count(), 0), 1);
  const std::vector<LatencyModel> costs{fog_type_cost("B")};
  const std::vector<double> loads{1.5};
  const auto t = simulate_execution(p, g, c, costs, loads);
  const double expected = 1.5 * fog_type_cost("B").predict({g.vertex_count(), 0}) + 20.0;
  CHECK(t.execution_ms[0] == doctest::Approx(expected));
  for (auto b : t.sync_bytes) CHECK(b == 0);
}

TEST_CASE("clique per fog needs no exchange") {
  std::vector<Graph::Edge> edges;
  for (VertexId base : {0u, 5u})
    for (VertexId u = 0; u < 5; ++u)
      for (VertexId v = u + 1; v < 5; ++v) edges.emplace_back(base + u, base + v);
  const auto g = make_graph(10, edges, 3);
  const Placement p({0, 0, 0, 0, 0, 1, 1, 1, 1, 1}, 2);
  FogCluster c;
  c.nodes = {{0, "B", 1e6, 0, fog_type_cost("B")}, {1, "B", 1e6, 0, fog_type_cost("B")}};
  c.layers = 2;
  const std::vector<LatencyModel> costs{fog_type_cost("B"), fog_type_cost("B")};
  const std::vector<double> loads{1, 1};
  for (auto b : simulate_execution(p, g, c, costs, loads).sync_bytes) CHECK(b == 0);
  const std::vector<std::uint32_t> dims{3, 4, 2};
  const auto model = GnnModel::random(ModelKind::gcn, dims, 3);
  const auto a = distributed_inference(model, g, p), b = full_inference(model, g);
  for (VertexId v = 0; v < 10; ++v) CHECK(verify::max_relative_error(a.row(v), b.row(v)) == 0.0);
}

TEST_CASE("distributed inference equals centralized on random placements") {
  const auto g = random_graph(300, 5.0, 6, 8);
  for (auto kind : {ModelKind::gcn, ModelKind::gat, ModelKind::sage}) {
    const std::vector<std::uint32_t> dims{6, 8, 5};
    const auto model = GnnModel::random(kind, dims, 4);
    std::vector<FogId> fog_of(g.vertex_count());
    for (VertexId v = 0; v < g.vertex_count(); ++v) fog_of[v] = (v * 7) % 4;
    const auto a = distributed_inference(model, g, Placement(fog_of, 4));
    const auto b = full_inference(model, g);
    for (VertexId v = 0; v < g.vertex_count(); ++v) CHECK(verify::max_relative_error(a.row(v), b.row(v)) <= 1e-9);
  }
}

TEST_CASE("serving strategies") {
  const ServingSystem system(small_rmat(3), standard_scenario());
  ServeOptions fast;
  fast.compute_embeddings = false;

  SUBCASE("cloud is upload-bound, fogs are compute-bound") {
    const auto cloud = system.serve(Strategy::cloud, 1, fast);
    const auto fog = system.serve(Strategy::single_fog, 1, fast);
    CHECK(cloud.collection_ms[0] > fog.collection_ms[0]);
    CHECK(cloud.execution_ms[0] < fog.execution_ms[0]);
    CHECK(std::isnan(cloud.flip_rate));
  }
  SUBCASE("planned placement beats the baseline") {
    int wins = 0;
    for (std::uint64_t seed = 1; seed <= 20; ++seed)
      wins += system.serve(Strategy::fograph, seed, fast).e2e_ms <=
              system.serve(Strategy::multifog_baseline, seed, fast).e2e_ms;
    CHECK(wins >= 19);
  }
  SUBCASE("same seed, same report") {
    const auto a = system.serve(Strategy::fograph, 4);
    const auto b = system.serve(Strategy::fograph, 4);
    CHECK(a.e2e_ms == b.e2e_ms);
    CHECK(a.execution_ms == b.execution_ms);
    CHECK(a.flip_rate == b.flip_rate);
  }
  SUBCASE("report fields are consistent") {
    const auto r = system.serve(Strategy::fograph, 2);
    REQUIRE(r.fogs.size() == 6);
    double worst = 0;
    for (std::size_t j = 0; j < r.fogs.size(); ++j) worst = std::max(worst, r.collection_ms[j] + r.execution_ms[j]);
    CHECK(r.e2e_ms == doctest::Approx(worst + r.assembly_ms));
    CHECK(r.flip_rate >= 0.0);
    CHECK(r.flip_rate <= 0.01);
  }
}

TEST_CASE("codec shrinks the collection payload") {
  auto s = standard_scenario();
  RmatParams p;
  p.num_vertices = 1500;
  p.density = 0.006;
  p.seed = 5;
  p.zero_fraction = 0.6;
  const ServingSystem system(generate_rmat(p), s);
  const auto& placement = system.plan().placement;
  const auto raw = system.fog_payload_bytes(placement, false);
  const auto packed = system.fog_payload_bytes(placement, true);
  for (std::size_t j = 0; j < raw.size(); ++j) CHECK(packed[j] < raw[j]);
  CHECK(system.packed_phi_bytes() < system.phi_bytes());
}

TEST_CASE("fog count sweep") {
  auto s = standard_scenario();
  s.codec = false;
  const auto g = small_rmat(6, 3000);
  const std::vector<std::uint32_t> counts{1, 2, 3, 4, 5, 6};
  const auto curve = sweep_fogs(g, s, counts, Strategy::fograph, 1);
  REQUIRE(curve.size() == 6);
  for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i].e2e_ms <= curve[i - 1].e2e_ms * 1.05);

  auto one = s;
  one.cluster = s.cluster.truncated(1);
  ServeOptions fast;
  fast.compute_embeddings = false;
  const ServingSystem single(g, one);
  CHECK(curve[0].e2e_ms == doctest::Approx(single.serve(Strategy::single_fog, 1, fast).e2e_ms));
}

TEST_CASE("scenario validation") {
  auto s = standard_scenario();
  s.cluster.nodes[0].bandwidth_bytes_per_s = 0;
  CHECK_THROWS_AS(s.validate(), ArgumentError);
  CHECK(parse_strategy("fograph") == Strategy::fograph);
  CHECK_THROWS_AS(parse_strategy("edge"), ArgumentError);
}
