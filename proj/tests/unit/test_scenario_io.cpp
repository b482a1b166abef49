#include <doctest.h>

#include <cmath>

#include "fogserve/rmat.hpp"
#include "fogserve/scenario_io.hpp"
#include "fogserve/types.hpp"
#include "helpers.hpp"

using namespace fogserve;
using namespace fogserve::testing;

TEST_CASE("scenario document round trip") {
  auto s = random_heterogeneous_scenario(4);
  s.loads = {1, 1.5, 1, 1, 1, 1};
  s.quant_bits = {32, 16, 8, 8};
  const auto back = parse_scenario(format_scenario(s));
  CHECK(back.name == s.name);
  REQUIRE(back.cluster.size() == s.cluster.size());
  for (std::size_t j = 0; j < s.cluster.size(); ++j) {
    CHECK(back.cluster.nodes[j].bandwidth_bytes_per_s == s.cluster.nodes[j].bandwidth_bytes_per_s);
    CHECK(back.cluster.nodes[j].cost == s.cluster.nodes[j].cost);
  }
  CHECK(back.loads == s.loads);
  CHECK(back.quant_bits == s.quant_bits);
  CHECK(back.wan.latency_ms == s.wan.latency_ms);
  CHECK(format_scenario(back) == format_scenario(s));
}

TEST_CASE("node type supplies a default cost") {
  const auto s = parse_scenario(R"({"nodes": [{"id": 0, "type": "C", "bandwidth_bytes_per_s": 1e6}]})");
  REQUIRE(s.cluster.size() == 1);
  CHECK(s.cluster.nodes[0].cost == fog_type_cost("C"));
}

TEST_CASE("scenario errors") {
  TempDir dir("scenario");
  try {
    load_scenario(dir.path() / "nope.json");
    FAIL("expected an error");
  } catch (const ParseError& e) {
    CHECK(std::string(e.what()).find("scenario not found") != std::string::npos);
  }
  CHECK_THROWS_AS(parse_scenario("{"), ParseError);
  CHECK_THROWS(parse_scenario(R"({"nodes": [{"id": 0, "bandwidth_bytes_per_s": -1}]})"));
}

TEST_CASE("results csv is sorted and complete") {
  RmatParams p;
  p.num_vertices = 800;
  p.density = 0.01;
  p.seed = 1;
  const ServingSystem system(generate_rmat(p), standard_scenario());
  ServeOptions fast;
  fast.compute_embeddings = false;
  std::vector<ServingReport> reports;
  for (std::uint64_t seed : {2, 1})
    for (auto s : kAllStrategies) reports.push_back(system.serve(s, seed, fast));
  const auto csv = results_csv(reports);
  CHECK(csv.rfind("strategy,seed,t_colle_ms,t_exec_ms,e2e_ms,throughput_per_s,flip_rate\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
  CHECK(csv.find("cloud,1,") < csv.find("cloud,2,"));
  CHECK(csv.find("cloud,2,") < csv.find("fograph,1,"));
  CHECK(csv.find(",nan\n") != std::string::npos);
  CHECK(results_csv(reports) == csv);
}

TEST_CASE("load trace text") {
  const auto t = parse_load_trace("round,fog_id,load_multiplier\n2,1,1.5\n0,0,2\n", 2);
  CHECK(t.rounds() == 3);
  CHECK(t.at(2, 1) == 1.5);
  CHECK(t.at(0, 0) == 2.0);
  CHECK(t.at(1, 1) == 1.0);
  CHECK(parse_load_trace(format_load_trace(t), 2).round(2) == t.round(2));
  CHECK_THROWS(parse_load_trace("round,fog_id,load_multiplier\n0,5,1\n", 2));
}
