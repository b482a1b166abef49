#include "fogserve/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "fogserve/partition.hpp"

namespace fogserve {

void EventQueue::schedule(double time_ms, Action action) {
  if (!(time_ms >= now_)) throw ArgumentError("event scheduled in the past");
  queue_.push({time_ms, next_seq_++, std::move(action)});
}

std::size_t EventQueue::run() {
  std::size_t fired = 0;
  while (!queue_.empty()) {
    auto item = queue_.top();
    queue_.pop();
    now_ = item.time;
    item.action();
    ++fired;
  }
  return fired;
}

void Scenario::validate() const {
  cluster.validate();
  if (!(wan.bandwidth_bytes_per_s > 0.0)) throw ArgumentError("WAN bandwidth must be positive");
  if (!(wan.latency_ms >= 0.0)) throw ArgumentError("WAN latency must be non-negative");
  if (!loads.empty() && loads.size() != cluster.size()) throw DimensionError("need one load per fog node");
  for (double l : loads)
    if (!(l > 0.0)) throw ArgumentError("loads must be positive");
  if (profiles && profiles->size() != cluster.size()) throw DimensionError("need one profile per fog node");
  if (exec_noise < 0.0 || profile_noise < 0.0 || access_jitter_ms < 0.0)
    throw ArgumentError("noise parameters must be non-negative");
  if (model.classes == 0 || model.hidden == 0) throw ArgumentError("model dimensions must be positive");
  QuantPlan{{0, 0, 0}, quant_bits}.validate();
}

LatencyModel fog_type_cost(const std::string& type) {
  const LatencyModel b{0.03, 0.01, 5.0, 0.0};
  if (type == "B") return b;
  if (type == "A") return b.scaled(1.378);
  if (type == "C") return b.scaled(0.5);
  throw ArgumentError("unknown fog type: " + type);
}

namespace {

FogNode make_node(FogId id, const std::string& type, double bandwidth, double access_ms = 2.0) {
  return {id, type, bandwidth, access_ms, fog_type_cost(type)};
}

std::uint64_t mix(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

Scenario standard_scenario() {
  Scenario s;
  s.name = "standard";
  s.cluster.sync_cost_ms = 10.0;
  s.cluster.layers = 2;
  s.cluster.nodes = {make_node(0, "A", 6.0e6), make_node(1, "B", 8.0e6), make_node(2, "B", 7.0e6),
                     make_node(3, "B", 9.0e6), make_node(4, "B", 8.0e6), make_node(5, "C", 10.0e6)};
  s.cloud_cost = fog_type_cost("B").scaled(0.1);
  return s;
}

Scenario homogeneous_scenario(std::uint32_t fogs) {
  Scenario s = standard_scenario();
  s.name = "homogeneous";
  s.cluster.nodes.clear();
  for (FogId j = 0; j < fogs; ++j) s.cluster.nodes.push_back(make_node(j, "B", 8.0e6));
  return s;
}

Scenario random_heterogeneous_scenario(std::uint64_t seed) {
  Scenario s = standard_scenario();
  s.name = "heterogeneous-" + std::to_string(seed);
  s.seed = seed;
  std::mt19937_64 rng(mix(seed));
  std::uniform_real_distribution<double> jitter(0.85, 1.15);
  std::uniform_real_distribution<double> bandwidth(4.0e6, 12.0e6);
  for (auto& node : s.cluster.nodes) {
    node.cost = node.cost.scaled(jitter(rng));
    node.bandwidth_bytes_per_s = bandwidth(rng);
  }
  return s;
}

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::cloud: return "cloud";
    case Strategy::single_fog: return "single_fog";
    case Strategy::multifog_baseline: return "multifog_baseline";
    case Strategy::fograph: return "fograph";
  }
  return "?";
}

Strategy parse_strategy(const std::string& name) {
  for (auto s : kAllStrategies)
    if (to_string(s) == name) return s;
  throw ArgumentError("unknown strategy: " + name);
}

std::vector<double> simulate_collection(const Placement& placement, const FogCluster& cluster,
                                        std::span<const std::uint64_t> fog_payload_bytes, double jitter_ms,
                                        std::uint64_t seed) {
  const auto n = placement.fog_count();
  if (cluster.size() != n || fog_payload_bytes.size() != n) throw DimensionError("collection inputs disagree on fog count");
  std::mt19937_64 rng(mix(seed ^ 0x636f6c6cULL));
  std::uniform_real_distribution<double> jitter(0.0, jitter_ms);
  std::vector<double> done(n);
  for (FogId j = 0; j < n; ++j) {
    const auto& node = cluster.nodes[j];
    const auto devices = placement.vertices_on(j).size();
    if (devices == 0) {
      done[j] = node.access_latency_ms;
      continue;
    }
    std::vector<double> start(devices, node.access_latency_ms);
    if (jitter_ms > 0.0)
      for (auto& t : start) t += jitter(rng);
    std::sort(start.begin(), start.end());
    // A work-conserving shared link finishes its last byte at the same time
    // whatever the sharing discipline, so the slowest device completes at:
    const auto base = fog_payload_bytes[j] / devices;
    const auto extra = fog_payload_bytes[j] % devices;
    double t = 0.0;
    for (std::size_t i = 0; i < devices; ++i) {
      const double bytes = static_cast<double>(base + (i < extra ? 1 : 0));
      t = std::max(t, start[i]) + bytes / node.bandwidth_bytes_per_s * 1000.0;
    }
    done[j] = t;
  }
  return done;
}

ExecutionTiming simulate_execution(const Placement& placement, const Graph& g, const FogCluster& cluster,
                                   std::span<const LatencyModel> costs, std::span<const double> loads,
                                   std::span<const double> noise_factors, std::uint32_t output_dim) {
  const auto n = placement.fog_count();
  if (cluster.size() != n || costs.size() != n || loads.size() != n)
    throw DimensionError("execution inputs disagree on fog count");
  if (!noise_factors.empty() && noise_factors.size() < n) throw DimensionError("too few noise factors");
  ExecutionTiming t;
  t.compute_ms.resize(n);
  t.execution_ms.resize(n);
  const double sync = cluster.layers * cluster.sync_cost_ms;
  std::uint64_t halo_total = 0;
  for (FogId j = 0; j < n; ++j) {
    const auto card = placement.cardinality(g, j);
    halo_total += card.num_neighbors;
    const double factor = noise_factors.empty() ? 1.0 : noise_factors[j];
    t.compute_ms[j] = placement.vertices_on(j).empty() ? 0.0 : loads[j] * costs[j].predict(card) * factor;
    t.execution_ms[j] = t.compute_ms[j] + sync;
  }
  const std::uint32_t dim = output_dim == 0 ? g.feature_dim() : output_dim;
  if (cluster.layers > 1) t.sync_bytes.assign(cluster.layers - 1, halo_total * dim * sizeof(double));
  return t;
}

ActivationSet distributed_inference(const GnnModel& model, const Graph& g, const Placement& placement) {
  const auto n = placement.fog_count();
  const auto universe = g.vertex_count();
  if (placement.vertex_count() != universe) throw DimensionError("placement does not match the graph");
  if (model.input_dim() != g.feature_dim()) throw DimensionError("model input width differs from feature width");

  std::vector<std::vector<VertexId>> halo(n);
  std::vector<ActivationSet> prev(n);
  for (FogId j = 0; j < n; ++j) {
    halo[j] = placement.halo(g, j);
    prev[j] = ActivationSet(0, g.feature_dim(), universe);
    for (auto v : placement.vertices_on(j)) prev[j].set(v, g.feature(v));
    for (auto v : halo[j]) prev[j].set(v, g.feature(v));
  }
  for (std::uint32_t k = 1; k <= model.num_layers(); ++k) {
    std::vector<ActivationSet> cur(n);
    for (FogId j = 0; j < n; ++j) cur[j] = layer_forward(model, k, placement.vertices_on(j), prev[j], g);
    if (k < model.num_layers()) {
      // Barrier: every fog receives the fresh activations of its halo from their owners.
      std::vector<std::vector<double>> inbox(n);
      for (FogId j = 0; j < n; ++j)
        for (auto u : halo[j]) {
          const auto row = cur[placement.fog_of(u)].row(u);
          inbox[j].insert(inbox[j].end(), row.begin(), row.end());
        }
      const auto dim = model.output_dim(k);
      for (FogId j = 0; j < n; ++j)
        for (std::size_t i = 0; i < halo[j].size(); ++i)
          cur[j].set(halo[j][i], std::span<const double>(inbox[j]).subspan(i * dim, dim));
    }
    prev = std::move(cur);
  }
  ActivationSet out(model.num_layers(), model.output_dim(), universe);
  for (VertexId v = 0; v < universe; ++v) out.set(v, prev[placement.fog_of(v)].row(v));
  return out;
}

std::vector<LatencyModel> profile_cluster(const Graph& g, const FogCluster& cluster, double noise,
                                          std::uint32_t samples_per_axis, std::uint64_t seed) {
  const auto axes = default_calibration_axes(g);
  const auto samples = build_calibration_set(g, axes, samples_per_axis, seed);
  std::vector<LatencyModel> out;
  for (const auto& node : cluster.nodes) {
    std::mt19937_64 rng(mix(seed ^ (std::uint64_t{node.id} << 32) ^ 0x70726f66ULL));
    std::normal_distribution<double> gauss(0.0, noise);
    std::vector<Observation> obs;
    for (const auto& s : samples) {
      const double factor = std::max(0.05, 1.0 + (noise > 0.0 ? gauss(rng) : 0.0));
      obs.push_back({s.cardinality, node.cost.predict(s.cardinality) * factor});
    }
    out.push_back(fit_latency_model(obs));
  }
  return out;
}

ServingSystem::ServingSystem(Graph g, Scenario scenario)
    : graph_(std::move(g)), scenario_(std::move(scenario)) {
  scenario_.validate();
  if (scenario_.cluster.size() > graph_.vertex_count()) throw ArgumentError("more fog nodes than vertices");
  std::vector<std::uint32_t> dims{graph_.feature_dim()};
  for (std::uint32_t k = 1; k < scenario_.cluster.layers; ++k) dims.push_back(scenario_.model.hidden);
  dims.push_back(scenario_.model.classes);
  model_ = GnnModel::random(scenario_.model.kind, dims, scenario_.model.seed, Activation::identity);

  profiles_ = scenario_.profiles ? *scenario_.profiles
                                 : profile_cluster(graph_, scenario_.cluster, scenario_.profile_noise,
                                                   scenario_.profile_samples, scenario_.seed);

  quant_plan_ = make_quant_plan(std::max<std::uint32_t>(1, graph_.max_degree()), scenario_.quant_bits);
  codec_ = make_codec(scenario_.codec_name);
  quantized_ = quantize_graph(graph_, quant_plan_);
  packed_phi_ = static_cast<double>(pack_graph(graph_, quant_plan_, *codec_).stream.size()) / graph_.vertex_count();

  partitions_ = balanced_partition(graph_, scenario_.cluster.size(), scenario_.imbalance, scenario_.seed);
  const double plan_phi = scenario_.codec ? packed_phi_ : phi_bytes();
  plan_ = place_partitions(graph_, partitions_, scenario_.cluster, profiles_, plan_phi, AssignStrategy::lbap);
  if (scenario_.codec) plan_packed_bytes_ = fog_payload_bytes(plan_.placement, true);
}

std::vector<std::uint64_t> ServingSystem::fog_payload_bytes(const Placement& placement, bool codec) const {
  std::vector<std::uint64_t> bytes(placement.fog_count(), 0);
  if (codec && !plan_packed_bytes_.empty() && placement == plan_.placement) return plan_packed_bytes_;
  for (FogId j = 0; j < placement.fog_count(); ++j) {
    const auto members = placement.vertices_on(j);
    if (members.empty()) continue;
    bytes[j] = codec ? pack_graph(graph_, quant_plan_, *codec_, members).stream.size()
                     : members.size() * graph_.feature_bytes();
  }
  return bytes;
}

const std::vector<std::int32_t>& ServingSystem::reference_labels() const {
  if (!reference_labels_) reference_labels_ = predict_labels(full_inference(model_, graph_));
  return *reference_labels_;
}

std::vector<double> ServingSystem::noise_factors(std::uint64_t seed) const {
  std::mt19937_64 rng(mix(seed));
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> f(scenario_.cluster.size() + 1);
  for (auto& x : f) x = std::max(0.5, 1.0 + scenario_.exec_noise * gauss(rng));
  return f;
}

std::vector<double> ServingSystem::true_loads(const ServeOptions& options) const {
  if (options.loads) {
    if (options.loads->size() != scenario_.cluster.size()) throw DimensionError("need one load per fog node");
    return *options.loads;
  }
  if (!scenario_.loads.empty()) return scenario_.loads;
  return std::vector<double>(scenario_.cluster.size(), 1.0);
}

namespace {

double flip_rate(std::span<const std::int32_t> reference, const ActivationSet& out) {
  const auto labels = predict_labels(out);
  std::size_t flips = 0;
  for (std::size_t v = 0; v < reference.size(); ++v) flips += labels[v] != reference[v];
  return reference.empty() ? 0.0 : static_cast<double>(flips) / static_cast<double>(reference.size());
}

// Drives the per-fog pipeline (collect, K compute + sync rounds, assembly)
// through the event queue and fills the timing fields of `report`.
void run_timeline(ServingReport& report, std::span<const double> collection, std::span<const double> compute,
                  std::uint32_t layers, double sync_ms, double assembly_ms) {
  EventQueue q;
  const auto n = collection.size();
  std::vector<double> finished(n, 0.0);
  std::function<void(std::size_t, std::uint32_t)> step = [&](std::size_t j, std::uint32_t k) {
    if (k == layers) {
      finished[j] = q.now();
      return;
    }
    q.schedule(q.now() + compute[j] / layers, [&, j, k] { q.schedule(q.now() + sync_ms, [&, j, k] { step(j, k + 1); }); });
  };
  for (std::size_t j = 0; j < n; ++j) q.schedule(collection[j], [&, j] { step(j, 0); });
  report.events = q.run();
  double last = 0.0;
  for (double f : finished) last = std::max(last, f);
  report.e2e_ms = last + assembly_ms;
  report.assembly_ms = assembly_ms;
  report.collection_ms.assign(collection.begin(), collection.end());
  report.execution_ms.resize(n);
  double stage = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    report.execution_ms[j] = compute[j] + layers * sync_ms;
    stage = std::max({stage, collection[j], report.execution_ms[j]});
  }
  report.sync_ms_per_layer.assign(layers, sync_ms);
  report.throughput_per_s = stage > 0.0 ? 1000.0 / stage : 0.0;
}

}  // namespace

ServingReport ServingSystem::serve_placement(const Placement& placement, bool codec, std::uint64_t seed,
                                             const ServeOptions& options, Strategy label) const {
  const auto& cluster = scenario_.cluster;
  if (placement.fog_count() != cluster.size()) throw DimensionError("placement fog count differs from cluster");
  ServingReport r;
  r.strategy = label;
  r.seed = seed;
  for (FogId j = 0; j < cluster.size(); ++j) r.fogs.push_back(j);

  const auto payload = fog_payload_bytes(placement, codec);
  for (auto b : payload) r.payload_bytes += b;
  const auto collection = simulate_collection(placement, cluster, payload, scenario_.access_jitter_ms, seed);
  std::vector<LatencyModel> costs;
  for (const auto& node : cluster.nodes) costs.push_back(node.cost);
  const auto timing = simulate_execution(placement, graph_, cluster, costs, true_loads(options), noise_factors(seed));
  run_timeline(r, collection, timing.compute_ms, cluster.layers, cluster.sync_cost_ms,
               cluster.size() > 1 ? cluster.sync_cost_ms : 0.0);

  r.flip_rate = std::numeric_limits<double>::quiet_NaN();
  if (options.compute_embeddings) {
    auto out = distributed_inference(model_, codec ? quantized_ : graph_, placement);
    r.flip_rate = flip_rate(reference_labels(), out);
    if (options.keep_output) r.output = std::move(out);
  }
  return r;
}

ServingReport ServingSystem::serve(Strategy strategy, std::uint64_t seed, const ServeOptions& options) const {
  const auto& cluster = scenario_.cluster;
  const bool codec = options.codec.value_or(scenario_.codec);
  switch (strategy) {
    case Strategy::fograph:
      return serve_placement(plan_.placement, codec, seed, options, strategy);
    case Strategy::multifog_baseline: {
      const auto base = place_partitions(graph_, partitions_, cluster, profiles_, phi_bytes(), AssignStrategy::random,
                                         mix(seed ^ 0x72616e64ULL));
      return serve_placement(base.placement, false, seed, options, strategy);
    }
    case Strategy::single_fog: {
      // Pick the node with the lowest predicted whole-graph latency.
      const Cardinality whole{graph_.vertex_count(), 0};
      const double raw_bytes = static_cast<double>(graph_.vertex_count()) * phi_bytes();
      FogId best = 0;
      double best_t = std::numeric_limits<double>::infinity();
      for (FogId j = 0; j < cluster.size(); ++j) {
        const auto& node = cluster.nodes[j];
        const double t = raw_bytes / node.bandwidth_bytes_per_s * 1000.0 + node.access_latency_ms +
                         profiles_[j].predict(whole);
        if (t < best_t) {
          best_t = t;
          best = j;
        }
      }
      ServingReport r;
      r.strategy = strategy;
      r.seed = seed;
      r.fogs = {best};
      FogCluster solo;
      solo.nodes = {cluster.nodes[best]};
      solo.nodes[0].id = 0;
      solo.sync_cost_ms = cluster.sync_cost_ms;
      solo.layers = cluster.layers;
      const Placement all(std::vector<FogId>(graph_.vertex_count(), 0), 1);
      const std::uint64_t bytes = std::uint64_t{graph_.vertex_count()} * graph_.feature_bytes();
      r.payload_bytes = bytes;
      const auto collection = simulate_collection(all, solo, std::span(&bytes, 1), scenario_.access_jitter_ms, seed);
      const auto loads = true_loads(options);
      const auto noise = noise_factors(seed);
      const double compute = loads[best] * cluster.nodes[best].cost.predict(whole) * noise[best];
      run_timeline(r, collection, std::span(&compute, 1), cluster.layers, cluster.sync_cost_ms, 0.0);
      r.flip_rate = std::numeric_limits<double>::quiet_NaN();
      if (options.compute_embeddings) {
        auto out = full_inference(model_, graph_);
        r.flip_rate = flip_rate(reference_labels(), out);
        if (options.keep_output) r.output = std::move(out);
      }
      return r;
    }
    case Strategy::cloud: {
      ServingReport r;
      r.strategy = strategy;
      r.seed = seed;
      const double bytes = static_cast<double>(graph_.vertex_count()) * phi_bytes();
      r.payload_bytes = static_cast<std::uint64_t>(bytes);
      const double collection = scenario_.wan.latency_ms + bytes / scenario_.wan.bandwidth_bytes_per_s * 1000.0;
      const double compute =
          scenario_.cloud_cost.predict({graph_.vertex_count(), 0}) * noise_factors(seed).back();
      run_timeline(r, std::span(&collection, 1), std::span(&compute, 1), cluster.layers, 0.0, 0.0);
      r.flip_rate = std::numeric_limits<double>::quiet_NaN();
      if (options.compute_embeddings) {
        auto out = full_inference(model_, graph_);
        r.flip_rate = flip_rate(reference_labels(), out);
        if (options.keep_output) r.output = std::move(out);
      }
      return r;
    }
  }
  throw ArgumentError("unknown strategy");
}

std::vector<SweepPoint> sweep_fogs(const Graph& g, const Scenario& scenario, std::span<const std::uint32_t> fog_counts,
                                   Strategy strategy, std::uint64_t seed) {
  std::vector<SweepPoint> out;
  for (auto count : fog_counts) {
    Scenario s = scenario;
    s.cluster = scenario.cluster.truncated(count);
    if (!s.loads.empty()) s.loads.resize(count);
    if (s.profiles) s.profiles->resize(count);
    const ServingSystem system(g, s);
    ServeOptions options;
    options.compute_embeddings = false;
    out.push_back({count, system.serve(strategy, seed, options).e2e_ms});
  }
  return out;
}

}  // namespace fogserve
