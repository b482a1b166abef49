#include "fogserve/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace fogserve {

double BalanceState::max_mu() const { return mu.empty() ? 0.0 : *std::max_element(mu.begin(), mu.end()); }

BalanceState compute_indicators(std::span<const double> times_ms, double lambda, double theta) {
  if (times_ms.empty()) throw ArgumentError("no execution times");
  if (!(lambda > 1.0)) throw ArgumentError("slackness factor must exceed 1");
  if (!(theta > 0.0 && theta <= 1.0)) throw ArgumentError("skewness threshold must lie in (0, 1]");
  for (double t : times_ms)
    if (!(t > 0.0)) throw ArgumentError("execution times must be positive");
  BalanceState s;
  s.lambda = lambda;
  s.theta = theta;
  const double mean = std::accumulate(times_ms.begin(), times_ms.end(), 0.0) / static_cast<double>(times_ms.size());
  for (double t : times_ms) {
    s.mu.push_back(t / mean);
    if (s.mu.back() > lambda) ++s.overloaded;
  }
  return s;
}

std::string to_string(ScheduleMode m) {
  switch (m) {
    case ScheduleMode::none: return "none";
    case ScheduleMode::diffuse: return "diffuse";
    case ScheduleMode::replan: return "replan";
  }
  return "?";
}

ScheduleMode select_mode(const BalanceState& state) {
  if (state.overloaded == 0) return ScheduleMode::none;
  // overloaded / n <= theta, kept in integers where possible
  if (static_cast<double>(state.overloaded) <= state.theta * static_cast<double>(state.mu.size()) + 1e-12)
    return ScheduleMode::diffuse;
  return ScheduleMode::replan;
}

std::vector<double> estimate_loads(const Placement& placement, const Graph& g, std::span<const LatencyModel> models,
                                   std::span<const double> measured_ms) {
  const auto n = placement.fog_count();
  if (models.size() != n || measured_ms.size() != n) throw DimensionError("need one model and time per fog");
  std::vector<double> eta(n, 1.0);
  for (FogId j = 0; j < n; ++j) {
    const double w = models[j].predict(placement.cardinality(g, j));
    if (w > 0.0 && measured_ms[j] > 0.0) eta[j] = measured_ms[j] / w;
  }
  return eta;
}

std::vector<double> predicted_times(const Placement& placement, const Graph& g, std::span<const LatencyModel> models,
                                    std::span<const double> loads) {
  const auto n = placement.fog_count();
  if (models.size() != n || loads.size() != n) throw DimensionError("need one model and load per fog");
  std::vector<double> t(n);
  for (FogId j = 0; j < n; ++j)
    t[j] = placement.vertices_on(j).empty() ? 0.0 : loads[j] * models[j].predict(placement.cardinality(g, j));
  return t;
}

namespace {

double max_mu_of(std::span<const double> t) {
  const double mean = std::accumulate(t.begin(), t.end(), 0.0) / static_cast<double>(t.size());
  if (!(mean > 0.0)) return 1.0;
  return *std::max_element(t.begin(), t.end()) / mean;
}

// Per-fog cardinalities kept up to date under single-vertex moves.
// inside[j][u] = neighbors of u that live on fog j (meaningful for u off fog j).
class CardinalityTracker {
 public:
  CardinalityTracker(const Placement& p, const Graph& g) : g_(g), fog_of_(p.assignment().begin(), p.assignment().end()) {
    const auto n = p.fog_count();
    inside_.assign(n, std::vector<std::uint32_t>(g.vertex_count(), 0));
    cards_.resize(n);
    for (VertexId v = 0; v < g.vertex_count(); ++v) {
      ++cards_[fog_of_[v]].num_vertices;
      for (auto u : g.neighbors(v))
        if (fog_of_[u] != fog_of_[v]) ++inside_[fog_of_[v]][u];
    }
    for (FogId j = 0; j < n; ++j)
      for (VertexId u = 0; u < g.vertex_count(); ++u)
        if (fog_of_[u] != j && inside_[j][u] > 0) ++cards_[j].num_neighbors;
  }

  const Cardinality& card(FogId j) const { return cards_[j]; }
  FogId fog_of(VertexId v) const { return fog_of_[v]; }
  std::uint32_t neighbors_on(VertexId v, FogId j) const { return inside_[j][v]; }

  /// Cardinalities of (from, to) if v moved from its fog to `to`.
  std::pair<Cardinality, Cardinality> after_move(VertexId v, FogId to) const {
    const auto from = fog_of_[v];
    auto a = cards_[from];
    auto b = cards_[to];
    --a.num_vertices;
    ++b.num_vertices;
    std::uint32_t in_from = 0;
    for (auto u : g_.neighbors(v)) {
      if (fog_of_[u] == from) {
        ++in_from;
      } else if (inside_[from][u] == 1) {
        --a.num_neighbors;
      }
      if (fog_of_[u] != to && inside_[to][u] == 0) ++b.num_neighbors;
    }
    if (in_from > 0) ++a.num_neighbors;
    if (inside_[to][v] > 0) --b.num_neighbors;
    return {a, b};
  }

  void move(VertexId v, FogId to) {
    const auto from = fog_of_[v];
    const auto [a, b] = after_move(v, to);
    std::uint32_t in_from = 0;
    for (auto u : g_.neighbors(v)) {
      if (fog_of_[u] == from) ++in_from;
      else --inside_[from][u];
      if (fog_of_[u] != to) ++inside_[to][u];
    }
    inside_[from][v] = in_from;
    inside_[to][v] = 0;
    fog_of_[v] = to;
    cards_[from] = a;
    cards_[to] = b;
  }

 private:
  const Graph& g_;
  std::vector<FogId> fog_of_;
  std::vector<std::vector<std::uint32_t>> inside_;
  std::vector<Cardinality> cards_;
};

}  // namespace

DiffusionResult diffuse(const Placement& placement, const Graph& g, std::span<const LatencyModel> models,
                        std::span<const double> loads, double lambda, std::optional<std::uint64_t> max_migrations) {
  const auto n = placement.fog_count();
  if (n < 2) throw ArgumentError("diffusion needs at least two fogs");
  if (models.size() != n || loads.size() != n) throw DimensionError("need one model and load per fog");
  const std::uint64_t cap = max_migrations.value_or(2ull * g.vertex_count() / n);

  DiffusionResult r;
  r.placement = placement;
  CardinalityTracker tracker(placement, g);
  auto predict = [&](FogId j, const Cardinality& c) { return c.num_vertices == 0 ? 0.0 : loads[j] * models[j].predict(c); };
  std::vector<double> t(n);
  for (FogId j = 0; j < n; ++j) t[j] = predict(j, tracker.card(j));

  std::vector<FogId> order(n);
  while (r.steps.size() < cap && max_mu_of(t) > lambda) {
    const auto hi = static_cast<FogId>(std::max_element(t.begin(), t.end()) - t.begin());
    std::iota(order.begin(), order.end(), 0u);
    std::stable_sort(order.begin(), order.end(), [&](FogId a, FogId b) { return t[a] < t[b]; });

    bool moved = false;
    for (auto lo : order) {
      if (lo == hi || t[hi] <= lambda * t[lo]) continue;
      std::vector<std::pair<std::uint32_t, VertexId>> candidates;
      for (auto v : r.placement.vertices_on(hi))
        if (auto k = tracker.neighbors_on(v, lo); k > 0) candidates.emplace_back(k, v);
      std::stable_sort(candidates.begin(), candidates.end(),
                       [](const auto& a, const auto& b) { return a.first > b.first; });
      if (r.placement.vertices_on(hi).size() < 2) break;
      for (const auto& [k, v] : candidates) {
        const auto [a, b] = tracker.after_move(v, lo);
        const double ta = predict(hi, a), tb = predict(lo, b);
        if (std::max(ta, tb) < std::max(t[hi], t[lo])) {
          MigrationStep step{v, hi, lo, *std::max_element(t.begin(), t.end()), 0.0};
          tracker.move(v, lo);
          r.placement.move(v, lo);
          t[hi] = ta;
          t[lo] = tb;
          step.predicted_max_after = *std::max_element(t.begin(), t.end());
          r.steps.push_back(step);
          moved = true;
          break;
        }
      }
      if (moved) break;
    }
    if (!moved) break;
  }
  r.predicted_max_mu = max_mu_of(t);
  return r;
}

ScheduleResult schedule(const Placement& placement, const Graph& g, const FogCluster& cluster,
                        std::span<const LatencyModel> models, std::span<const double> loads,
                        const SchedulerConfig& config) {
  const auto times = predicted_times(placement, g, models, loads);
  ScheduleResult r;
  r.placement = placement;
  // Fogs with no predicted work cannot be overloaded; keep them in the mean
  // with a tiny positive time so the indicator stays defined.
  std::vector<double> safe(times);
  for (auto& x : safe) x = std::max(x, 1e-9);
  r.state = compute_indicators(safe, config.lambda, config.theta);
  r.mode = cluster.size() < 2 ? ScheduleMode::none : select_mode(r.state);
  r.predicted_max_mu = r.state.max_mu();
  if (r.mode == ScheduleMode::diffuse) {
    auto d = diffuse(placement, g, models, loads, config.lambda);
    r.placement = std::move(d.placement);
    r.migrations = d.steps.size();
    r.predicted_max_mu = d.predicted_max_mu;
    r.steps = std::move(d.steps);
  } else if (r.mode == ScheduleMode::replan) {
    std::vector<LatencyModel> scaled;
    for (FogId j = 0; j < cluster.size(); ++j) scaled.push_back(models[j].scaled(loads[j]));
    PlanOptions options;
    options.imbalance = config.imbalance;
    options.seed = config.seed;
    auto p = plan(g, cluster, scaled, config.phi_bytes, options);
    for (VertexId v = 0; v < g.vertex_count(); ++v) r.migrations += p.placement.fog_of(v) != placement.fog_of(v);
    r.placement = std::move(p.placement);
    std::vector<double> after(cluster.size());
    for (FogId j = 0; j < cluster.size(); ++j) after[j] = scaled[j].predict(r.placement.cardinality(g, j));
    r.predicted_max_mu = max_mu_of(after);
  }
  return r;
}

void LoadTrace::set(std::uint32_t round, FogId fog, double multiplier) {
  if (!(multiplier > 0.0)) throw ArgumentError("load multipliers must be positive");
  values_.at(std::size_t{round} * fogs_ + fog) = multiplier;
}

std::vector<double> LoadTrace::round(std::uint32_t r) const {
  if (r >= rounds_) throw ArgumentError("round out of range");
  return {values_.begin() + static_cast<std::ptrdiff_t>(std::size_t{r} * fogs_),
          values_.begin() + static_cast<std::ptrdiff_t>(std::size_t{r + 1} * fogs_)};
}

LoadTrace spike_trace(std::uint32_t fogs, FogId fog, double peak, std::uint32_t lead, std::uint32_t ramp,
                      std::uint32_t hold, std::uint32_t tail) {
  if (fog >= fogs) throw ArgumentError("spiking fog out of range");
  LoadTrace trace(lead + 2 * ramp + hold + tail, fogs);
  std::uint32_t r = lead;
  for (std::uint32_t i = 1; i <= ramp; ++i) trace.set(r++, fog, 1.0 + (peak - 1.0) * i / (ramp + 1));
  for (std::uint32_t i = 0; i < hold; ++i) trace.set(r++, fog, peak);
  for (std::uint32_t i = ramp; i >= 1; --i) trace.set(r++, fog, 1.0 + (peak - 1.0) * i / (ramp + 1));
  return trace;
}

double TraceResult::scheduled_peak_ms() const {
  double m = 0.0;
  for (const auto& r : rounds) m = std::max(m, r.scheduled_ms);
  return m;
}

double TraceResult::unscheduled_peak_ms() const {
  double m = 0.0;
  for (const auto& r : rounds) m = std::max(m, r.unscheduled_ms);
  return m;
}

TraceResult replay_trace(const ServingSystem& system, const LoadTrace& trace, double lambda, double theta,
                         std::uint64_t seed) {
  const auto& scenario = system.scenario();
  const auto& g = system.graph();
  const auto n = scenario.cluster.size();
  if (trace.fogs() != n) throw DimensionError("trace fog count differs from the cluster");
  const auto base = system.true_loads({});
  const bool codec = scenario.codec;

  SchedulerConfig config;
  config.lambda = lambda;
  config.theta = theta;
  config.imbalance = scenario.imbalance;
  config.seed = scenario.seed;
  config.phi_bytes = codec ? system.packed_phi_bytes() : system.phi_bytes();

  const Placement initial = system.plan().placement;
  Placement current = initial;
  const double sync = scenario.cluster.layers * scenario.cluster.sync_cost_ms;
  TraceResult out;
  for (std::uint32_t round = 0; round < trace.rounds(); ++round) {
    ServeOptions options;
    options.compute_embeddings = false;
    options.loads = trace.round(round);
    for (FogId j = 0; j < n; ++j) (*options.loads)[j] *= base[j];
    const auto round_seed = seed * 1000003ull + round;

    TraceRound row;
    row.round = round;
    const auto scheduled = system.serve_placement(current, codec, round_seed, options);
    row.scheduled_ms = scheduled.e2e_ms;
    row.unscheduled_ms = current == initial ? scheduled.e2e_ms
                                            : system.serve_placement(initial, codec, round_seed, options).e2e_ms;

    std::vector<double> measured(n);
    for (FogId j = 0; j < n; ++j) measured[j] = scheduled.execution_ms[j] - sync;
    const auto eta = estimate_loads(current, g, system.profiles(), measured);
    auto decision = schedule(current, g, scenario.cluster, system.profiles(), eta, config);
    row.mode = decision.mode;
    row.migrations = decision.migrations;
    row.predicted_max_mu = decision.predicted_max_mu;
    out.steps.insert(out.steps.end(), decision.steps.begin(), decision.steps.end());
    current = std::move(decision.placement);  // committed between rounds
    out.rounds.push_back(row);
  }
  return out;
}

}  // namespace fogserve
