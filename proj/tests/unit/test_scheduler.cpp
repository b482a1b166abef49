#include <doctest.h>

#include "fogserve/rmat.hpp"
#include "fogserve/scheduler.hpp"
#include "fogserve/types.hpp"
#include "helpers.hpp"

using namespace fogserve;
using namespace fogserve::testing;

namespace {

const LatencyModel kPerVertex{1.0, 0.0, 0.0, 0.0};

ServingSystem trace_system(std::uint64_t seed) {
  RmatParams p;
  p.num_vertices = 3000;
  p.density = 0.004;
  p.seed = seed;
  auto s = homogeneous_scenario(4);
  s.codec = false;
  return ServingSystem(generate_rmat(p), s);
}

}  // namespace

TEST_CASE("indicator arithmetic") {
  const std::vector<double> flat{2, 2, 2, 2};
  const auto a = compute_indicators(flat, 1.2);
  CHECK(a.mu == std::vector<double>{1, 1, 1, 1});
  CHECK(a.overloaded == 0);
  CHECK(select_mode(a) == ScheduleMode::none);

  const std::vector<double> two{3, 1};
  const auto b = compute_indicators(two, 1.2);
  CHECK(b.mu[0] == doctest::Approx(1.5));
  CHECK(b.mu[1] == doctest::Approx(0.5));
  CHECK(b.overloaded == 1);

  const std::vector<double> four{1.5, 1.3, 0.8, 0.4};
  const auto c = compute_indicators(four, 1.2, 0.5);
  CHECK(c.overloaded == 2);
  CHECK(select_mode(c) == ScheduleMode::diffuse);

  const std::vector<double> three_hot{2, 2, 2, 0.1};
  CHECK(select_mode(compute_indicators(three_hot, 1.25, 0.5)) == ScheduleMode::replan);
  const std::vector<double> two_hot{2, 2, 1, 1};
  CHECK(select_mode(compute_indicators(two_hot, 1.25, 0.5)) == ScheduleMode::diffuse);

  CHECK_THROWS_AS(compute_indicators(std::vector<double>{}, 1.2), ArgumentError);
  CHECK_THROWS_AS(compute_indicators(flat, 1.0), ArgumentError);
  CHECK_THROWS_AS(compute_indicators(std::vector<double>{1, 0}, 1.2), ArgumentError);
}

TEST_CASE("diffusion moves the vertex with the most cross edges") {
  // Fog 0 holds A..D, fog 1 holds E, F. D has two neighbors on fog 1, C has one.
  const auto g = make_graph(6, {{0, 1}, {1, 2}, {0, 2}, {2, 3}, {3, 4}, {3, 5}, {2, 4}, {4, 5}});
  const Placement p({0, 0, 0, 0, 1, 1}, 2);
  const std::vector<LatencyModel> models{kPerVertex, kPerVertex};
  const std::vector<double> loads{1, 1};
  const auto d = diffuse(p, g, models, loads, 1.25);
  REQUIRE(d.steps.size() == 1);
  CHECK(d.steps[0].vertex == 3);
  CHECK(d.steps[0].from == 0);
  CHECK(d.steps[0].to == 1);
  CHECK(d.placement.fog_of(3) == 1);
  CHECK(d.predicted_max_mu == doctest::Approx(1.0));
}

TEST_CASE("balanced placement is left alone") {
  const auto g = path_graph(8);
  const Placement p({0, 0, 0, 0, 1, 1, 1, 1}, 2);
  const std::vector<LatencyModel> models{kPerVertex, kPerVertex};
  const std::vector<double> loads{1, 1};
  const auto d = diffuse(p, g, models, loads);
  CHECK(d.steps.empty());
  CHECK(d.placement == p);
  FogCluster c = homogeneous_scenario(2).cluster;
  const auto s = schedule(p, g, c, models, loads);
  CHECK(s.mode == ScheduleMode::none);
  CHECK(s.placement == p);
}

TEST_CASE("a load spike lowers the predicted maximum") {
  const auto g = random_graph(100, 4.0, 1, 3);
  std::vector<FogId> fog_of(100);
  for (VertexId v = 0; v < 100; ++v) fog_of[v] = v % 4;
  const Placement p(fog_of, 4);
  const std::vector<LatencyModel> models(4, fog_type_cost("B"));
  const std::vector<double> loads{2, 1, 1, 1};
  const auto before = predicted_times(p, g, models, loads);
  const auto d = diffuse(p, g, models, loads);
  const auto after = predicted_times(d.placement, g, models, loads);
  CHECK(*std::max_element(after.begin(), after.end()) < *std::max_element(before.begin(), before.end()));
  for (const auto& step : d.steps) CHECK(step.predicted_max_after < step.predicted_max_before);
}

TEST_CASE("scheduler branches") {
  const auto g = random_graph(200, 4.0, 1, 5);
  std::vector<FogId> fog_of(200);
  for (VertexId v = 0; v < 200; ++v) fog_of[v] = v % 4;
  const Placement p(fog_of, 4);
  const auto cluster = homogeneous_scenario(4).cluster;
  const std::vector<LatencyModel> models(4, fog_type_cost("B"));
  SUBCASE("one hot fog diffuses") {
    const std::vector<double> loads{2, 1, 1, 1};
    const auto r = schedule(p, g, cluster, models, loads);
    CHECK(r.mode == ScheduleMode::diffuse);
    CHECK(r.predicted_max_mu < r.state.max_mu());
  }
  SUBCASE("three hot fogs replan with scaled models") {
    const std::vector<double> loads{3, 3, 3, 0.5};
    SchedulerConfig config;
    config.seed = 4;
    const auto r = schedule(p, g, cluster, models, loads, config);
    CHECK(r.mode == ScheduleMode::replan);
    std::vector<LatencyModel> scaled;
    for (FogId j = 0; j < 4; ++j) scaled.push_back(models[j].scaled(loads[j]));
    CHECK(r.placement == plan(g, cluster, scaled, config.phi_bytes, {config.imbalance, config.seed}).placement);
  }
}

TEST_CASE("load factors from measurements") {
  const auto g = path_graph(6);
  const Placement p({0, 0, 0, 1, 1, 1}, 2);
  const std::vector<LatencyModel> models{kPerVertex, kPerVertex};
  const std::vector<double> measured{6.0, 3.0};
  const auto eta = estimate_loads(p, g, models, measured);
  CHECK(eta[0] == doctest::Approx(2.0));
  CHECK(eta[1] == doctest::Approx(1.0));
}

TEST_CASE("spike trace shape") {
  const auto t = spike_trace(3, 1, 2.0, 2, 4, 3, 2);
  CHECK(t.rounds() == 2 + 4 + 3 + 4 + 2);
  CHECK(t.at(0, 1) == 1.0);
  CHECK(t.at(5, 1) == doctest::Approx(1.8));
  CHECK(t.at(6, 1) == 2.0);
  CHECK(t.at(7, 1) == 2.0);
  CHECK(t.at(14, 1) == 1.0);
  for (std::uint32_t r = 0; r < t.rounds(); ++r) CHECK(t.at(r, 0) == 1.0);
}

TEST_CASE("trace replay") {
  const auto system = trace_system(2);
  SUBCASE("flat trace changes nothing") {
    const LoadTrace flat(20, 4);
    const auto r = replay_trace(system, flat, 1.25, 0.5, 1);
    for (const auto& row : r.rounds) {
      CHECK(row.scheduled_ms == row.unscheduled_ms);
      CHECK(row.migrations == 0);
    }
  }
  SUBCASE("spike on one node") {
    const auto r = replay_trace(system, spike_trace(4, 2, 2.0, 5, 10, 40, 5), 1.25, 0.5, 1);
    CHECK(r.scheduled_peak_ms() < r.unscheduled_peak_ms());
  }
  SUBCASE("spike then recovery") {
    const std::uint32_t lead = 5, ramp = 10, hold = 30, tail = 30;
    const auto r = replay_trace(system, spike_trace(4, 2, 2.0, lead, ramp, hold, tail), 1.1, 0.5, 1);
    const std::uint32_t recovered = lead + ramp + hold + ramp;
    // Right after recovery the placement still favors the spiked node's
    // neighbors; later rounds should be faster again.
    const double just_after = r.rounds[recovered].scheduled_ms;
    const double at_end = r.rounds.back().scheduled_ms;
    CHECK(at_end < just_after);
  }
}
