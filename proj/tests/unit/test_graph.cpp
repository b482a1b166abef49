#include <doctest.h>

#include <fstream>
#include <numeric>

#include "fogserve/rmat.hpp"
#include "fogserve/types.hpp"
#include "fogserve/verify/oracles.hpp"
#include "helpers.hpp"

using namespace fogserve;
using namespace fogserve::testing;

TEST_CASE("two edges over three vertices") {
  const Graph g(3, {{0, 1}, {1, 2}}, 2, std::vector<double>(6, 1.0));
  CHECK(g.vertex_count() == 3);
  CHECK(g.edge_count() == 2);
  CHECK(g.degree(1) == 2);
  CHECK(g.neighbors(1)[0] == 0);
  CHECK(g.neighbors(1)[1] == 2);
}

TEST_CASE("invalid edges are rejected") {
  CHECK_THROWS_AS(Graph(3, {{0, 5}}, 1, std::vector<double>(3)), InvariantError);
  CHECK_THROWS_AS(Graph(3, {{1, 1}}, 1, std::vector<double>(3)), InvariantError);
  CHECK_THROWS_AS(Graph(3, {{0, 1}, {1, 0}}, 1, std::vector<double>(3)), InvariantError);
  CHECK_THROWS(Graph(3, {{0, 1}}, 2, std::vector<double>(3)));
}

TEST_CASE("edges are canonicalized") {
  const Graph g(4, {{3, 1}, {2, 0}}, 1, std::vector<double>(4));
  REQUIRE(g.edges().size() == 2);
  CHECK(g.edges()[0] == Graph::Edge{0, 2});
  CHECK(g.edges()[1] == Graph::Edge{1, 3});
}

TEST_CASE("degree sum is twice the edge count") {
  const auto g = random_graph(300, 6.0, 1, 11);
  std::uint64_t sum = 0;
  for (VertexId v = 0; v < g.vertex_count(); ++v) sum += g.degree(v);
  CHECK(sum == 2 * g.edge_count());
}

TEST_CASE("save and load reproduce the graph bit for bit") {
  TempDir dir("graph");
  RmatParams p;
  p.num_vertices = 500;
  p.density = 0.01;
  p.feature_dim = 5;
  p.seed = 3;
  const auto g = generate_rmat(p);
  save_graph(g, dir.path() / "g");
  const auto back = load_graph(dir.path() / "g");
  CHECK(back == g);
  REQUIRE(back.features().size() == g.features().size());
  for (std::size_t i = 0; i < g.features().size(); ++i)
    CHECK(std::bit_cast<std::uint64_t>(back.features()[i]) == std::bit_cast<std::uint64_t>(g.features()[i]));
}

TEST_CASE("edge file with an out-of-range endpoint fails to load") {
  TempDir dir("bad");
  save_graph(make_graph(3, {{0, 1}}), dir.path());
  std::ofstream(dir.path() / "edges.txt") << "0 5\n";
  CHECK_THROWS(load_graph(dir.path()));
}

TEST_CASE("degree cdf on small graphs") {
  SUBCASE("path of three") {
    const auto cdf = degree_cdf(path_graph(3));
    CHECK(cdf.at(1) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(cdf.at(2) == 1.0);
    CHECK(cdf.at(-1) == 0.0);
    CHECK(cdf.below(2) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
  }
  SUBCASE("edgeless") {
    const auto cdf = degree_cdf(make_graph(4, {}));
    CHECK(cdf.at(0) == 1.0);
    CHECK(cdf.max_degree() == 0);
  }
  SUBCASE("star with four leaves") {
    const auto cdf = degree_cdf(star_graph(4));
    CHECK(cdf.at(1) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(cdf.at(3) == doctest::Approx(0.8).epsilon(1e-15));
    CHECK(cdf.at(4) == 1.0);
  }
}

TEST_CASE("degree cdf is monotone and ends at one") {
  const auto g = random_graph(400, 8.0, 1, 5);
  const auto cdf = degree_cdf(g);
  double prev = 0.0;
  for (std::int64_t d = -1; d <= cdf.max_degree() + 1; ++d) {
    CHECK(cdf.at(d) >= prev);
    prev = cdf.at(d);
    std::uint64_t count = 0;
    for (VertexId v = 0; v < g.vertex_count(); ++v) count += g.degree(v) <= d;
    CHECK(cdf.count_at_most(d) == count);
  }
  CHECK(cdf.at(cdf.max_degree()) == 1.0);
}

TEST_CASE("rmat hits the exact edge count and is deterministic") {
  RmatParams p;
  p.num_vertices = 2000;
  p.density = 0.003;
  p.seed = 9;
  const auto a = generate_rmat(p);
  CHECK(a.edge_count() == rmat_target_edges(2000, 0.003));
  CHECK(a == generate_rmat(p));
  p.seed = 10;
  CHECK_FALSE(a == generate_rmat(p));
}

TEST_CASE("rmat presets use the published edge counts") {
  CHECK(rmat_target_edges(20000, rmat_preset("RMAT-20K").density) == 199990);
  CHECK(rmat_target_edges(100000, rmat_preset("RMAT-100K").density) == 4999950);
  CHECK_THROWS_AS(rmat_preset("RMAT-7"), ArgumentError);
}

TEST_CASE("subgraph sampling") {
  const auto g = random_graph(200, 5.0, 1, 2);
  SUBCASE("whole graph has no outside neighbors") {
    const auto s = sample_subgraph(g, {200, 0}, 1);
    CHECK(s.vertices.size() == 200);
    CHECK(s.cardinality.num_neighbors == 0);
  }
  SUBCASE("star center sees every leaf") {
    const auto star = star_graph(6);
    const std::vector<VertexId> center{0};
    CHECK(measure_cardinality(star, center).num_neighbors == 6);
  }
  SUBCASE("same seed gives the same sample") {
    for (auto mode : {SampleMode::uniform, SampleMode::ball})
      CHECK(sample_subgraph(g, {50, 0}, 7, mode).vertices == sample_subgraph(g, {50, 0}, 7, mode).vertices);
  }
  SUBCASE("cardinality matches a set-based count") {
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      const auto s = sample_subgraph(g, {10 + seed * 7, 0}, seed, seed % 2 ? SampleMode::ball : SampleMode::uniform);
      CHECK(s.cardinality.num_vertices == s.vertices.size());
      CHECK(s.cardinality.num_neighbors == verify::reference_neighbor_count(g, s.vertices));
    }
  }
  SUBCASE("oversized target") { CHECK_THROWS_AS(sample_subgraph(g, {201, 0}, 1), ArgumentError); }
}

TEST_CASE("edge cut counts crossing edges") {
  const auto g = path_graph(4);
  const std::vector<std::uint32_t> parts{0, 0, 1, 1};
  CHECK(edge_cut(g, parts) == 1);
}
