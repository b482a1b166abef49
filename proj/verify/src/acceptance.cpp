#include "fogserve/verify/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "fogserve/codec.hpp"
#include "fogserve/gnn.hpp"
#include "fogserve/matching.hpp"
#include "fogserve/partition.hpp"
#include "fogserve/planner.hpp"
#include "fogserve/profiler.hpp"
#include "fogserve/quant.hpp"
#include "fogserve/rmat.hpp"
#include "fogserve/scheduler.hpp"
#include "fogserve/simulator.hpp"
#include "fogserve/verify/oracles.hpp"

namespace fogserve::verify {

namespace {

// Tolerances pinned here so every caller uses the same numbers.
constexpr double kDistributedRelTol = 1e-9;
constexpr double kRatioTol = 1e-12;
constexpr double kQuantSlack = 1e-12;
constexpr double kFlipBound = 0.01;
constexpr double kProfilerBand = 0.10;
constexpr double kProfilerNoise = 0.05;
constexpr double kProfilerShare = 0.95;
constexpr double kSweepTol = 0.05;

std::string fmt(const char* f, double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, x);
  return buf;
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Uniform random graph with a target average degree and random features.
Graph random_graph(std::uint32_t n, double avg_degree, std::uint32_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> pick(0, n - 1);
  std::set<std::pair<VertexId, VertexId>> edges;
  const auto target = static_cast<std::size_t>(avg_degree * n / 2.0);
  const std::size_t max_edges = std::size_t{n} * (n - 1) / 2;
  while (edges.size() < std::min(target, max_edges)) {
    auto u = pick(rng), v = pick(rng);
    if (u == v) continue;
    edges.emplace(std::min(u, v), std::max(u, v));
  }
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::vector<double> features(std::size_t{n} * dim);
  for (auto& x : features) x = val(rng);
  return Graph(n, {edges.begin(), edges.end()}, dim, std::move(features));
}

Graph test_graph(std::uint32_t index, std::uint32_t max_vertices, std::uint32_t dim, std::uint64_t seed) {
  const std::uint32_t n = 10 + (index * 397u + 13u) % (max_vertices - 9);
  if (index % 2 == 0) return random_graph(n, 2.0 + index % 7, dim, seed);
  RmatParams p;
  p.num_vertices = n;
  p.density = std::min(0.5, 6.0 / n);
  p.feature_dim = dim;
  p.seed = seed;
  p.zero_fraction = 0.2;
  return generate_rmat(p);
}

CheckResult distributed_correctness(const SuiteOptions& o) {
  CheckResult r;
  const std::uint32_t graphs = o.quick ? 8 : 50;
  const std::uint32_t max_v = o.quick ? 300 : 1000;
  std::size_t runs = 0, failures = 0;
  double worst = 0.0;
  std::string first_failure;
  for (std::uint32_t i = 0; i < graphs; ++i) {
    const auto g = test_graph(i, max_v, 8, mix(o.seed * 7919 + i));
    for (auto kind : {ModelKind::gcn, ModelKind::gat, ModelKind::sage}) {
      for (std::uint32_t layers : {1u, 2u, 3u}) {
        std::vector<std::uint32_t> dims{8};
        for (std::uint32_t k = 1; k < layers; ++k) dims.push_back(6);
        dims.push_back(4);
        const auto model = GnnModel::random(kind, dims, mix(o.seed + i * 31 + layers), Activation::identity);
        const auto central = full_inference(model, g);
        for (std::uint32_t fogs : {2u, 4u, 6u}) {
          std::vector<FogId> fog_of(g.vertex_count());
          if (i % 2 == 0) {
            fog_of = MultilevelPartitioner({0.03, mix(o.seed + i)}).partition(g, fogs);
          } else {
            std::mt19937_64 rng(mix(o.seed * 3 + i * 11 + fogs));
            std::uniform_int_distribution<FogId> pick(0, fogs - 1);
            for (auto& f : fog_of) f = pick(rng);
          }
          const Placement placement(std::move(fog_of), fogs);
          const auto dist = distributed_inference(model, g, placement);
          double err = 0.0;
          for (VertexId v = 0; v < g.vertex_count(); ++v)
            err = std::max(err, max_relative_error(dist.row(v), central.row(v)));
          ++runs;
          worst = std::max(worst, err);
          if (!(err <= kDistributedRelTol)) {
            ++failures;
            if (first_failure.empty())
              first_failure = "; first failure: graph " + std::to_string(i) + " " + to_string(kind) + " K=" +
                              std::to_string(layers) + " n=" + std::to_string(fogs);
          }
        }
      }
    }
  }
  r.passed = failures == 0;
  r.detail = std::to_string(runs - failures) + "/" + std::to_string(runs) + " placements match, max rel err " +
             fmt("%.3g", worst) + first_failure;
  return r;
}

CostMatrix random_costs(std::uint32_t n, std::uint32_t trial, std::mt19937_64& rng) {
  CostMatrix m(n);
  std::uniform_int_distribution<int> small(0, 4);
  std::uniform_real_distribution<double> real(0.0, 100.0);
  for (std::uint32_t k = 0; k < n; ++k)
    for (std::uint32_t j = 0; j < n; ++j) {
      switch (trial % 3) {
        case 0: m(k, j) = small(rng); break;  // heavy ties
        case 1: m(k, j) = real(rng); break;
        default: m(k, j) = (k + 1) * real(rng) / (j + 1); break;
      }
    }
  return m;
}

CheckResult lbap_exactness(const SuiteOptions& o) {
  CheckResult r;
  const std::uint32_t per_n = o.quick ? 20 : 100;
  std::mt19937_64 rng(mix(o.seed ^ 0x6c626170));
  std::size_t total = 0, exact = 0, bound_ok = 0;
  for (std::uint32_t n = 2; n <= 7; ++n)
    for (std::uint32_t t = 0; t < per_n; ++t) {
      const auto m = random_costs(n, t, rng);
      const auto a = lbap_assign(m);
      std::set<FogId> used(a.fog_of_partition.begin(), a.fog_of_partition.end());
      const bool bijection = used.size() == n && *used.rbegin() < n;
      ++total;
      if (bijection && a.bottleneck == brute_force_bottleneck(m) && bottleneck_of(m, a.fog_of_partition) == a.bottleneck)
        ++exact;
      std::set<double> distinct(m.values().begin(), m.values().end());
      const auto limit = static_cast<std::uint32_t>(std::ceil(std::log2(static_cast<double>(distinct.size())))) + 1;
      if (a.feasibility_tests <= limit) ++bound_ok;
    }
  r.passed = exact == total && bound_ok == total;
  r.detail = std::to_string(exact) + "/" + std::to_string(total) + " bottlenecks equal brute force; " +
             std::to_string(bound_ok) + "/" + std::to_string(total) + " within the log2 test bound";
  return r;
}

QuantPlan random_plan(std::uint32_t max_degree, std::mt19937_64& rng) {
  std::uniform_int_distribution<std::uint32_t> thr(0, max_degree + 1);
  std::array<std::uint32_t, 3> t{thr(rng), thr(rng), thr(rng)};
  std::sort(t.begin(), t.end());
  const std::array<std::uint8_t, 4> widths{8, 16, 32, 64};
  std::uniform_int_distribution<int> w(0, 3);
  std::array<std::uint8_t, 4> b{widths[w(rng)], widths[w(rng)], widths[w(rng)], widths[w(rng)]};
  std::sort(b.begin(), b.end(), std::greater<>());
  return {t, b};
}

CheckResult bit_ratio_identity(const SuiteOptions& o) {
  CheckResult r;
  const std::uint32_t graphs = o.quick ? 10 : 50, plans = o.quick ? 5 : 20;
  std::mt19937_64 rng(mix(o.seed ^ 0x74686d32));
  std::size_t total = 0, exact = 0, atom_differs = 0;
  double worst = 0.0;
  for (std::uint32_t i = 0; i < graphs; ++i) {
    RmatParams p;
    p.num_vertices = 100 + (i * 173) % 1900;
    p.density = 0.002 + 0.002 * (i % 10);
    p.feature_dim = 4;
    p.seed = mix(o.seed + i);
    const auto g = generate_rmat(p);
    std::vector<std::uint32_t> degrees(g.vertex_count());
    for (VertexId v = 0; v < g.vertex_count(); ++v) degrees[v] = g.degree(v);
    const DegreeCdf cdf(degrees);
    for (std::uint32_t k = 0; k < plans; ++k) {
      const auto plan = (k == 0) ? make_quant_plan(cdf) : random_plan(g.max_degree(), rng);
      const double closed = compression_ratio(plan, cdf);
      const double counted = reference_bit_ratio(degrees, plan.thresholds, plan.bits);
      // Same identity in integers: q3 |V| - sum count(D < D_i) (q_i - q_{i-1}).
      std::int64_t numerator = static_cast<std::int64_t>(plan.bits[3]) * g.vertex_count();
      for (int t = 0; t < 3; ++t)
        numerator -= static_cast<std::int64_t>(cdf.count_below(plan.thresholds[t])) *
                     (static_cast<std::int64_t>(plan.bits[t + 1]) - plan.bits[t]);
      const bool ints = numerator == static_cast<std::int64_t>(reference_bit_count(degrees, plan.thresholds, plan.bits));
      worst = std::max(worst, std::abs(closed - counted));
      ++total;
      if (ints && std::abs(closed - counted) <= kRatioTol) ++exact;
      if (compression_report(plan, cdf).discrepancy) ++atom_differs;
    }
  }
  r.passed = exact == total;
  r.detail = std::to_string(exact) + "/" + std::to_string(total) + " plans match direct counting (max diff " +
             fmt("%.2g", worst) + "); " + std::to_string(atom_differs) +
             " would differ under the P(D<=d) convention";
  return r;
}

CheckResult codec_roundtrip(const SuiteOptions& o) {
  CheckResult r;
  const std::uint32_t payloads = o.quick ? 200 : 1000;
  std::mt19937_64 rng(mix(o.seed ^ 0x636f6463));
  const DeflateCodec deflate;
  const IdentityCodec identity;
  std::size_t lossless = 0;
  for (std::uint32_t i = 0; i < payloads; ++i) {
    std::uniform_int_distribution<std::size_t> len(0, i % 10 == 0 ? 200000 : 4096);
    std::vector<std::uint8_t> data(len(rng));
    std::uniform_int_distribution<int> byte(0, 255);
    for (auto& b : data) {
      switch (i % 3) {
        case 0: b = static_cast<std::uint8_t>(byte(rng)); break;
        case 1: b = byte(rng) < 200 ? 0 : static_cast<std::uint8_t>(byte(rng)); break;
        default: b = static_cast<std::uint8_t>(byte(rng) % 4); break;
      }
    }
    const bool ok = deflate.decode(deflate.encode(data)) == data && identity.decode(identity.encode(data)) == data;
    lossless += ok;
  }

  // Packed feature streams through both codecs.
  std::size_t streams = 0, streams_ok = 0;
  for (std::uint32_t i = 0; i < (o.quick ? 5u : 20u); ++i) {
    const auto g = test_graph(i, 400, 1 + i % 40, mix(o.seed + 100 + i));
    const auto plan = make_quant_plan(std::max<std::uint32_t>(1, g.max_degree()));
    for (const ByteCodec* codec : {static_cast<const ByteCodec*>(&deflate), static_cast<const ByteCodec*>(&identity)}) {
      const auto packed = pack_graph(g, plan, *codec);
      ++streams;
      streams_ok += unpack_graph(packed.stream, *codec) == packed.packed;
    }
  }

  // Element error bound of the affine quantizer.
  std::size_t vectors = 0, within = 0;
  double worst_ratio = 0.0;
  std::uniform_real_distribution<double> mag(-6.0, 6.0);
  for (std::uint32_t i = 0; i < (o.quick ? 300u : 1000u); ++i) {
    const std::uint32_t dim = 1 + i % 64;
    const double spread = std::pow(10.0, mag(rng));
    std::uniform_real_distribution<double> val(-spread, spread);
    std::vector<double> x(dim);
    for (auto& v : x) v = val(rng);
    for (std::uint8_t bits : {std::uint8_t{8}, std::uint8_t{16}, std::uint8_t{32}, std::uint8_t{64}}) {
      const auto q = quantize_vector(x, bits);
      const auto back = dequantize(q);
      bool ok = true;
      for (std::uint32_t e = 0; e < dim; ++e) {
        const double err = std::abs(back[e] - x[e]);
        if (bits == 64) ok &= std::bit_cast<std::uint64_t>(back[e]) == std::bit_cast<std::uint64_t>(x[e]);
        else ok &= err <= q.scale / 2 + kQuantSlack;
        if (bits != 64 && q.scale > 0) worst_ratio = std::max(worst_ratio, err / q.scale);
      }
      ++vectors;
      within += ok;
    }
  }
  r.passed = lossless == payloads && streams_ok == streams && within == vectors;
  r.detail = std::to_string(lossless) + "/" + std::to_string(payloads) + " payloads lossless, " +
             std::to_string(streams_ok) + "/" + std::to_string(streams) + " packed streams, " + std::to_string(within) +
             "/" + std::to_string(vectors) + " vectors within scale/2 (max err/scale " + fmt("%.4f", worst_ratio) + ")";
  return r;
}

CheckResult accuracy_impact(const SuiteOptions& o) {
  CheckResult r;
  const auto g = generate_rmat(rmat_preset(o.quick ? "RMAT-20K" : "RMAT-20K", o.seed));
  const std::vector<std::uint32_t> dims{g.feature_dim(), 32, 8};
  const auto model = GnnModel::random(ModelKind::gcn, dims, mix(o.seed ^ 0x67636e), Activation::identity);
  const auto plan = make_quant_plan(degree_cdf(g));
  const auto full = predict_labels(full_inference(model, g));
  const auto quant = predict_labels(full_inference(model, quantize_graph(g, plan)));
  std::size_t flips = 0;
  for (std::size_t v = 0; v < full.size(); ++v) flips += full[v] != quant[v];
  const double rate = static_cast<double>(flips) / static_cast<double>(full.size());
  const auto ratio = compression_ratio(plan, degree_cdf(g));
  r.passed = rate <= kFlipBound;
  r.detail = "flip rate " + fmt("%.4f%%", 100 * rate) + " (" + std::to_string(flips) + " of " +
             std::to_string(full.size()) + "), bound 1%, payload ratio " + fmt("%.4f", ratio);
  return r;
}

CheckResult planner_quality(const SuiteOptions& o) {
  CheckResult r;
  const std::uint32_t scenarios = o.quick ? 20 : 100;
  std::size_t beats_random = 0;
  double sum_plan = 0, sum_greedy = 0, sum_random = 0;
  for (std::uint32_t s = 0; s < scenarios; ++s) {
    const auto seed = o.seed * 1000 + s;
    RmatParams p;
    p.num_vertices = 2000;
    p.density = 0.005;
    p.seed = mix(seed);
    auto scenario = random_heterogeneous_scenario(seed);
    scenario.codec = false;
    const ServingSystem system(generate_rmat(p), scenario);
    ServeOptions options;
    options.compute_embeddings = false;
    const auto& g = system.graph();
    const auto& c = scenario.cluster;
    const auto random = place_partitions(g, system.partitions(), c, system.profiles(), system.phi_bytes(),
                                         AssignStrategy::random, mix(seed ^ 0x72));
    const auto greedy = place_partitions(g, system.partitions(), c, system.profiles(), system.phi_bytes(),
                                         AssignStrategy::greedy);
    const double t_plan = system.serve_placement(system.plan().placement, false, seed, options).e2e_ms;
    const double t_random = system.serve_placement(random.placement, false, seed, options).e2e_ms;
    const double t_greedy = system.serve_placement(greedy.placement, false, seed, options).e2e_ms;
    beats_random += t_plan <= t_random;
    sum_plan += t_plan;
    sum_random += t_random;
    sum_greedy += t_greedy;
  }
  const auto need = static_cast<std::size_t>(std::ceil(0.95 * scenarios));
  r.passed = beats_random >= need && sum_plan <= sum_greedy;
  r.detail = "plan <= random in " + std::to_string(beats_random) + "/" + std::to_string(scenarios) +
             "; mean latency plan " + fmt("%.1f", sum_plan / scenarios) + " ms, greedy " +
             fmt("%.1f", sum_greedy / scenarios) + " ms, random " + fmt("%.1f", sum_random / scenarios) +
             " ms; mean reduction vs greedy " + fmt("%.1f%%", 100 * (1 - sum_plan / sum_greedy)) + ", vs random " +
             fmt("%.1f%%", 100 * (1 - sum_plan / sum_random));
  return r;
}

CheckResult trend_ordering(const SuiteOptions& o) {
  CheckResult r;
  const std::uint32_t seeds = o.quick ? 20 : 100;
  const ServingSystem system(generate_rmat(rmat_preset("RMAT-20K", o.seed)), standard_scenario());
  ServeOptions options;
  options.compute_embeddings = false;
  std::size_t ordered = 0;
  std::array<double, 4> sums{};
  for (std::uint32_t s = 1; s <= seeds; ++s) {
    std::array<double, 4> t{};
    for (std::size_t i = 0; i < kAllStrategies.size(); ++i) {
      t[i] = system.serve(kAllStrategies[i], s, options).e2e_ms;
      sums[i] += t[i];
    }
    ordered += t[0] > t[1] && t[1] > t[2] && t[2] > t[3];
  }
  const auto need = static_cast<std::size_t>(std::ceil(0.95 * seeds));
  r.passed = ordered >= need;
  r.detail = "cloud > single_fog > multifog_baseline > fograph in " + std::to_string(ordered) + "/" +
             std::to_string(seeds) + " seeds; mean ms " + fmt("%.0f", sums[0] / seeds) + " / " +
             fmt("%.0f", sums[1] / seeds) + " / " + fmt("%.0f", sums[2] / seeds) + " / " + fmt("%.0f", sums[3] / seeds);
  return r;
}

CheckResult profiler_band(const SuiteOptions& o) {
  CheckResult r;
  RmatParams p;
  p.num_vertices = o.quick ? 2000 : 5000;
  p.density = 0.004;
  p.seed = mix(o.seed ^ 0x70726f);
  const auto g = generate_rmat(p);
  const LatencyModel truth{0.02, 0.004, 3.0, 0.0};
  std::mt19937_64 rng(mix(o.seed ^ 0x6e6f6973));
  std::uniform_real_distribution<double> noise(-kProfilerNoise, kProfilerNoise);

  std::size_t held_out = 0, inside = 0;
  for (std::uint32_t trial = 0; trial < (o.quick ? 2u : 5u); ++trial) {
    const auto train = build_calibration_set(g, default_calibration_axes(g), 4, mix(o.seed + trial));
    std::vector<Observation> obs;
    for (const auto& s : train) obs.push_back({s.cardinality, truth.predict(s.cardinality) * (1 + noise(rng))});
    const auto fitted = fit_latency_model(obs);
    std::uniform_int_distribution<std::uint32_t> size(g.vertex_count() / 50, g.vertex_count());
    for (std::uint32_t i = 0; i < 200; ++i) {
      const auto mode = i % 2 ? SampleMode::ball : SampleMode::uniform;
      const auto s = sample_subgraph(g, Cardinality{size(rng), 0}, mix(o.seed * 977 + trial * 1000 + i + 1), mode);
      const double measured = truth.predict(s.cardinality) * (1 + noise(rng));
      const double predicted = fitted.predict(s.cardinality);
      ++held_out;
      inside += std::abs(predicted - measured) <= kProfilerBand * measured;
    }
  }
  const double share = static_cast<double>(inside) / static_cast<double>(held_out);
  r.passed = share >= kProfilerShare;
  r.detail = std::to_string(inside) + "/" + std::to_string(held_out) + " held-out predictions within +-10% (" +
             fmt("%.1f%%", 100 * share) + ", need 95%)";
  return r;
}

ScheduleMode rule_oracle(std::span<const double> times, double lambda, double theta) {
  const double mean = std::accumulate(times.begin(), times.end(), 0.0) / times.size();
  std::size_t over = 0;
  for (double t : times) over += t / mean > lambda;
  if (over == 0) return ScheduleMode::none;
  return over <= theta * times.size() ? ScheduleMode::diffuse : ScheduleMode::replan;
}

CheckResult scheduler_behavior(const SuiteOptions& o) {
  CheckResult r;
  RmatParams p;
  p.num_vertices = o.quick ? 4000 : 10000;
  p.density = o.quick ? 0.004 : 0.002;
  p.seed = mix(o.seed ^ 0x7363686564);
  auto scenario = homogeneous_scenario(4);
  scenario.codec = false;
  const ServingSystem system(generate_rmat(p), scenario);
  const auto trace = spike_trace(4, 1, 2.0, 10, 20, o.quick ? 60 : 200, 20);
  const auto result = replay_trace(system, trace, 1.25, 0.5, o.seed);

  std::size_t monotone = 0;
  for (const auto& s : result.steps) monotone += s.predicted_max_after <= s.predicted_max_before;

  struct Case {
    std::vector<double> times;
    double lambda, theta;
  };
  const std::vector<Case> cases{{{2, 2, 2, 2}, 1.2, 0.5},      {{3, 1}, 1.2, 0.5},
                                {{1.5, 1.3, 0.8, 0.4}, 1.2, 0.5}, {{3, 3, 3, 1}, 1.05, 0.5},
                                {{5, 1, 1, 1}, 1.25, 0.25},     {{5, 5, 1, 1}, 1.25, 0.25},
                                {{4, 4, 1, 1, 1, 1}, 1.25, 0.34}, {{4, 4, 4, 1, 1, 1}, 1.25, 0.5},
                                {{1, 1, 1, 1, 1, 9}, 1.5, 0.1}};
  std::size_t rules = 0;
  for (const auto& c : cases)
    rules += select_mode(compute_indicators(c.times, c.lambda, c.theta)) == rule_oracle(c.times, c.lambda, c.theta);
  std::size_t diffusions = 0, replans = 0;
  for (const auto& row : result.rounds) {
    diffusions += row.mode == ScheduleMode::diffuse;
    replans += row.mode == ScheduleMode::replan;
  }
  const double sched = result.scheduled_peak_ms(), unsched = result.unscheduled_peak_ms();
  r.passed = sched < unsched && monotone == result.steps.size() && rules == cases.size();
  r.detail = "peak " + fmt("%.1f", sched) + " ms scheduled vs " + fmt("%.1f", unsched) + " ms unscheduled; " +
             std::to_string(monotone) + "/" + std::to_string(result.steps.size()) +
             " migrations keep the predicted max non-increasing; " + std::to_string(diffusions) + " diffuse / " +
             std::to_string(replans) + " replan rounds; branch rule " + std::to_string(rules) + "/" +
             std::to_string(cases.size());
  return r;
}

CheckResult scalability(const SuiteOptions& o) {
  CheckResult r;
  const std::vector<std::string> presets = o.quick ? std::vector<std::string>{"RMAT-20K", "RMAT-40K"}
                                                   : std::vector<std::string>{"RMAT-20K", "RMAT-40K", "RMAT-60K",
                                                                              "RMAT-80K", "RMAT-100K"};
  const std::vector<std::uint32_t> counts{1, 2, 3, 4, 5, 6};
  bool monotone = true, growing = true;
  double previous_gain = -1.0;
  std::ostringstream detail;
  for (const auto& name : presets) {
    const auto g = generate_rmat(rmat_preset(name, o.seed));
    const auto curve = sweep_fogs(g, standard_scenario(), counts, Strategy::fograph, o.seed);
    detail << name << " [";
    for (std::size_t i = 0; i < curve.size(); ++i) {
      detail << (i ? " " : "") << fmt("%.0f", curve[i].e2e_ms);
      if (i > 0 && curve[i].e2e_ms > curve[i - 1].e2e_ms * (1 + kSweepTol)) monotone = false;
    }
    const double gain = curve.front().e2e_ms - curve.back().e2e_ms;
    if (!(gain > previous_gain)) growing = false;
    previous_gain = gain;
    detail << "] gain " << fmt("%.0f", gain) << " ms; ";
  }
  r.passed = monotone && growing;
  r.detail = detail.str() + (monotone ? "non-increasing" : "NOT non-increasing") +
             (growing ? ", gains grow with graph size" : ", gains do NOT grow with graph size");
  return r;
}

using CheckFn = std::function<CheckResult(const SuiteOptions&)>;

const std::vector<std::pair<CriterionInfo, CheckFn>>& registry() {
  static const std::vector<std::pair<CriterionInfo, CheckFn>> r{
      {{"C1", "distributed inference equals centralized"}, distributed_correctness},
      {{"C2", "bottleneck assignment equals brute force"}, lbap_exactness},
      {{"C3", "bit-ratio closed form equals counting"}, bit_ratio_identity},
      {{"C4", "codec round trip and quantization error"}, codec_roundtrip},
      {{"C5", "degree-aware quantization flip rate"}, accuracy_impact},
      {{"C6", "planner vs random and greedy placement"}, planner_quality},
      {{"C7", "cloud > single fog > multi-fog > planned"}, trend_ordering},
      {{"C8", "profiler held-out band"}, profiler_band},
      {{"C9", "scheduler under a load spike"}, scheduler_behavior},
      {{"C10", "latency vs fog count"}, scalability},
  };
  return r;
}

CheckResult timed(const CriterionInfo& info, const CheckFn& fn, const SuiteOptions& o) {
  const auto start = std::chrono::steady_clock::now();
  CheckResult r;
  try {
    r = fn(o);
  } catch (const std::exception& e) {
    r.passed = false;
    r.detail = std::string("error: ") + e.what();
  }
  r.id = info.id;
  r.title = info.title;
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return r;
}

}  // namespace

const std::vector<CriterionInfo>& criteria() {
  static const std::vector<CriterionInfo> list = [] {
    std::vector<CriterionInfo> out;
    for (const auto& [info, fn] : registry()) out.push_back(info);
    return out;
  }();
  return list;
}

CheckResult run_criterion(const std::string& id, const SuiteOptions& options) {
  for (const auto& [info, fn] : registry())
    if (info.id == id) return timed(info, fn, options);
  throw ArgumentError("unknown criterion: " + id);
}

std::vector<CheckResult> run_acceptance(const SuiteOptions& options) {
  std::vector<CheckResult> out;
  for (const auto& [info, fn] : registry()) out.push_back(timed(info, fn, options));
  return out;
}

std::vector<CheckResult> run_oracle_suite(const SuiteOptions& options,
                                          const std::optional<std::filesystem::path>& weights) {
  std::vector<CheckResult> out;
  if (weights) {
    out.push_back(timed({"weights", "weights file integrity"},
                        [&](const SuiteOptions& o) {
                          CheckResult r;
                          const auto model = load_model(*weights);
                          // Evaluate the loaded model both ways on a small graph of matching width.
                          const auto g = random_graph(200, 4.0, model.input_dim(), mix(o.seed));
                          const Placement placement(MultilevelPartitioner({0.03, o.seed}).partition(g, 4), 4);
                          const auto a = distributed_inference(model, g, placement);
                          const auto b = full_inference(model, g);
                          double err = 0.0;
                          for (VertexId v = 0; v < g.vertex_count(); ++v)
                            err = std::max(err, max_relative_error(a.row(v), b.row(v)));
                          r.passed = err <= kDistributedRelTol;
                          r.detail = std::string(to_string(model.kind())) + ", " +
                                     std::to_string(model.num_layers()) + " layers, checksum ok, max rel err " +
                                     fmt("%.3g", err);
                          return r;
                        },
                        options));
  }
  const std::vector<std::pair<CriterionInfo, CheckFn>> oracles{
      {{"lbap", "bottleneck assignment vs brute force"}, lbap_exactness},
      {{"bsp", "distributed vs centralized inference"}, distributed_correctness},
      {{"ratio", "bit-ratio closed form vs counting"}, bit_ratio_identity},
      {{"codec", "codec round trips"}, codec_roundtrip},
  };
  for (const auto& [info, fn] : oracles) out.push_back(timed(info, fn, options));
  return out;
}

std::string format_result(const CheckResult& r) {
  return std::string(r.passed ? "[PASS] " : "[FAIL] ") + r.id + " " + r.title + ": " + r.detail + " (" +
         fmt("%.1f", r.seconds) + " s)";
}

}  // namespace fogserve::verify
