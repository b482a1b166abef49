#include <doctest.h>

#include <random>

#include "fogserve/profiler.hpp"
#include "fogserve/types.hpp"
#include "helpers.hpp"

using namespace fogserve;
using namespace fogserve::testing;

namespace {

std::vector<Observation> observe(const LatencyModel& truth, const std::vector<SubgraphSample>& samples, double noise,
                                 std::mt19937_64& rng) {
  std::normal_distribution<double> n01(0.0, 1.0);
  std::vector<Observation> obs;
  for (const auto& s : samples) obs.push_back({s.cardinality, truth.predict(s.cardinality) * (1.0 + noise * n01(rng))});
  return obs;
}

}  // namespace

TEST_CASE("calibration set sizes") {
  const auto g = random_graph(1000, 6.0, 1, 1);
  const auto axes = default_calibration_axes(g, 5);
  CHECK(axes.size() == 5);
  CHECK(build_calibration_set(g, axes, 20, 3).size() == 100);

  const std::vector<Cardinality> full{{1000, 0}};
  const auto whole = build_calibration_set(g, full, 20, 3);
  REQUIRE(whole.size() == 20);
  for (const auto& s : whole) {
    CHECK(s.vertices.size() == 1000);
    CHECK(s.cardinality.num_neighbors == 0);
  }

  const auto a = build_calibration_set(g, axes, 4, 9), b = build_calibration_set(g, axes, 4, 9);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i].vertices == b[i].vertices);
}

TEST_CASE("noiseless observations recover the coefficients") {
  const auto g = random_graph(2000, 6.0, 1, 2);
  const LatencyModel truth{0.01, 0.002, 5.0, 0.0};
  std::mt19937_64 rng(1);
  const auto obs = observe(truth, build_calibration_set(g, default_calibration_axes(g), 4, 5), 0.0, rng);
  const auto fit = fit_latency_model(obs);
  CHECK(std::abs(fit.per_vertex - 0.01) <= 1e-9);
  CHECK(std::abs(fit.per_neighbor - 0.002) <= 1e-9);
  CHECK(std::abs(fit.intercept - 5.0) <= 1e-9);
}

TEST_CASE("five percent noise keeps coefficients within ten percent") {
  // Monte-Carlo mean over 100 trials; single fits of the neighbor term vary
  // more because neighbor counts follow vertex counts in the calibration set.
  const auto g = random_graph(3000, 6.0, 1, 3);
  const LatencyModel truth{0.01, 0.002, 5.0, 0.0};
  std::mt19937_64 rng(7);
  double v = 0, n = 0, e = 0;
  for (std::uint64_t trial = 0; trial < 100; ++trial) {
    const auto samples = build_calibration_set(g, default_calibration_axes(g), 20, trial);
    const auto fit = fit_latency_model(observe(truth, samples, 0.05, rng));
    v += fit.per_vertex / 100;
    n += fit.per_neighbor / 100;
    e += fit.intercept / 100;
  }
  CHECK(std::abs(v / 0.01 - 1) <= 0.1);
  CHECK(std::abs(n / 0.002 - 1) <= 0.1);
  CHECK(std::abs(e / 5.0 - 1) <= 0.1);
}

TEST_CASE("degenerate regressions are rejected") {
  const std::vector<Observation> same{{{10, 5}, 1.0}, {{10, 5}, 1.1}, {{10, 5}, 0.9}};
  CHECK_THROWS_AS(fit_latency_model(same), RankDeficientError);
  const std::vector<Observation> two{{{10, 5}, 1.0}, {{20, 5}, 2.0}};
  CHECK_THROWS_AS(fit_latency_model(two), ArgumentError);
}

TEST_CASE("load factor arithmetic") {
  const LatencyModel m{1.0, 0.0, 0.0, 0.0};
  CHECK(update_load_factor(m, {100, 0}, 150.0).eta == doctest::Approx(1.5));
  CHECK(update_load_factor(m, {100, 0}, 100.0).eta == doctest::Approx(1.0));
  CHECK(predict_online(m, {1.5, 0}, {30, 0}) == doctest::Approx(45.0));
  CHECK(predict_online(m, {1.0, 0}, {30, 0}) == doctest::Approx(30.0));
  CHECK(predict_online(m, {2.0, 0}, {40, 0}) == doctest::Approx(80.0));
  CHECK_THROWS_AS(update_load_factor(m, {0, 0}, 10.0), ArgumentError);
  CHECK_THROWS_AS(update_load_factor(m, {10, 0}, 0.0), ArgumentError);
}

TEST_CASE("stale load factors read as neutral") {
  const LatencyModel m{1.0, 0.0, 0.0, 0.0};
  LoadTracker tracker(4);
  CHECK(tracker.at(0).eta == 1.0);
  tracker.record(m, {10, 0}, 20.0, 3);
  CHECK(tracker.at(5).eta == doctest::Approx(2.0));
  CHECK(tracker.at(8).eta == 1.0);
}

TEST_CASE("predictions stay within ten percent over the calibration set") {
  const auto g = random_graph(2000, 6.0, 1, 8);
  const LatencyModel truth{0.02, 0.004, 3.0, 0.0};
  std::mt19937_64 rng(11);
  const auto samples = build_calibration_set(g, default_calibration_axes(g), 20, 2);
  const auto fit = fit_latency_model(observe(truth, samples, 0.02, rng));
  for (const auto& s : samples)
    CHECK(std::abs(fit.predict(s.cardinality) / truth.predict(s.cardinality) - 1) <= 0.1);
}

TEST_CASE("profile document round trip") {
  const std::vector<NodeProfile> profiles{{0, {0.01, 0.002, 5.0, 0.3}, {1.5, 7}}, {1, {0.02, 0.001, 2.5, 0.0}, {}}};
  const auto back = parse_profiles(format_profiles(profiles));
  REQUIRE(back.size() == 2);
  CHECK(back[0].model == profiles[0].model);
  CHECK(back[0].load.eta == 1.5);
  CHECK(back[0].load.timestamp == 7);
  CHECK(back[1].model == profiles[1].model);
  CHECK_THROWS_AS(parse_profiles("beta_vertices = 1\n"), ParseError);
}
