#include "fogserve/rmat.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <random>
#include <string>
#include <unordered_set>

namespace fogserve {

namespace {

std::uint64_t pair_key(VertexId u, VertexId v) { return (std::uint64_t{u} << 32) | v; }

// Multi-source BFS from random seeds; components no seed reaches are seeded
// with a random class of their own. Each vertex adopts the majority label of
// its labeled neighbors in one final sweep (ties toward the smaller class).
std::vector<std::int32_t> propagate_labels(const Graph& g, std::uint32_t num_classes, std::mt19937_64& rng) {
  const auto n = g.vertex_count();
  std::vector<std::int32_t> label(n, -1);
  if (n == 0 || num_classes == 0) return std::vector<std::int32_t>(n, 0);

  std::uniform_int_distribution<VertexId> pick_vertex(0, n - 1);
  std::uniform_int_distribution<std::int32_t> pick_class(0, static_cast<std::int32_t>(num_classes) - 1);
  std::deque<VertexId> queue;
  for (std::uint32_t c = 0; c < num_classes && c < n; ++c) {
    VertexId s = pick_vertex(rng);
    while (label[s] != -1) s = (s + 1) % n;
    label[s] = static_cast<std::int32_t>(c);
    queue.push_back(s);
  }
  auto flood = [&] {
    while (!queue.empty()) {
      const VertexId v = queue.front();
      queue.pop_front();
      for (VertexId u : g.neighbors(v))
        if (label[u] == -1) {
          label[u] = label[v];
          queue.push_back(u);
        }
    }
  };
  flood();
  for (VertexId v = 0; v < n; ++v)
    if (label[v] == -1) {
      label[v] = pick_class(rng);
      queue.push_back(v);
      flood();
    }

  std::vector<std::int32_t> smoothed(label);
  std::vector<std::uint32_t> votes(num_classes, 0);
  for (VertexId v = 0; v < n; ++v) {
    if (g.degree(v) == 0) continue;
    std::fill(votes.begin(), votes.end(), 0);
    for (VertexId u : g.neighbors(v)) ++votes[static_cast<std::size_t>(label[u])];
    ++votes[static_cast<std::size_t>(label[v])];
    smoothed[v] = static_cast<std::int32_t>(std::max_element(votes.begin(), votes.end()) - votes.begin());
  }
  return smoothed;
}

}  // namespace

std::uint64_t rmat_target_edges(std::uint32_t num_vertices, double density) {
  const long double pairs = static_cast<long double>(num_vertices) * (num_vertices - 1) / 2.0L;
  return static_cast<std::uint64_t>(std::ceil(static_cast<long double>(density) * pairs - 1e-9L));
}

Graph generate_rmat(const RmatParams& p) {
  if (p.num_vertices < 2) throw ArgumentError("RMAT needs at least 2 vertices");
  if (!(p.density > 0.0 && p.density < 1.0)) throw ArgumentError("RMAT density must lie in (0, 1)");
  const double total = p.a + p.b + p.c + p.d;
  if (std::abs(total - 1.0) > 1e-9 || p.a < 0 || p.b < 0 || p.c < 0 || p.d < 0)
    throw ArgumentError("RMAT quadrant probabilities must be non-negative and sum to 1");
  if (p.zero_fraction < 0.0 || p.zero_fraction > 1.0) throw ArgumentError("zero_fraction must lie in [0, 1]");

  const std::uint64_t n = p.num_vertices;
  const std::uint64_t max_edges = n * (n - 1) / 2;
  const std::uint64_t target = rmat_target_edges(p.num_vertices, p.density);
  if (target > max_edges)
    throw ArgumentError("requested " + std::to_string(target) + " edges exceeds the complete-graph bound " +
                        std::to_string(max_edges));

  std::mt19937_64 rng(p.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int scale = 0;
  while ((std::uint64_t{1} << scale) < n) ++scale;

  std::unordered_set<std::uint64_t> seen;
  seen.reserve(static_cast<std::size_t>(target * 2));
  std::vector<Graph::Edge> edges;
  edges.reserve(static_cast<std::size_t>(target));

  auto try_add = [&](std::uint64_t u, std::uint64_t v) {
    if (u >= n || v >= n || u == v) return;
    if (u > v) std::swap(u, v);
    const auto key = pair_key(static_cast<VertexId>(u), static_cast<VertexId>(v));
    if (seen.insert(key).second) edges.emplace_back(static_cast<VertexId>(u), static_cast<VertexId>(v));
  };

  // Rejection sampling from the recursive quadrant distribution. When the
  // skewed distribution saturates (dense requests), the remaining edges are
  // drawn uniformly from the unused pairs so generation always terminates.
  const std::uint64_t attempt_budget = 64 * target + 1024;
  std::uint64_t attempts = 0;
  const double ab = p.a + p.b;
  const double abc = ab + p.c;
  while (edges.size() < target && attempts < attempt_budget) {
    ++attempts;
    std::uint64_t u = 0, v = 0;
    for (int level = 0; level < scale; ++level) {
      const double r = unit(rng);
      u <<= 1;
      v <<= 1;
      if (r < p.a) {
      } else if (r < ab) {
        v |= 1;
      } else if (r < abc) {
        u |= 1;
      } else {
        u |= 1;
        v |= 1;
      }
    }
    try_add(u, v);
  }
  if (edges.size() < target) {
    std::vector<Graph::Edge> unused;
    for (std::uint64_t u = 0; u < n; ++u)
      for (std::uint64_t v = u + 1; v < n; ++v)
        if (!seen.contains(pair_key(static_cast<VertexId>(u), static_cast<VertexId>(v))))
          unused.emplace_back(static_cast<VertexId>(u), static_cast<VertexId>(v));
    std::shuffle(unused.begin(), unused.end(), rng);
    const auto missing = static_cast<std::size_t>(target - edges.size());
    edges.insert(edges.end(), unused.begin(), unused.begin() + static_cast<std::ptrdiff_t>(missing));
  }

  std::vector<double> features(static_cast<std::size_t>(n) * p.feature_dim);
  std::uniform_real_distribution<double> value(-1.0, 1.0);
  for (auto& x : features) {
    const double v = value(rng);
    x = (p.zero_fraction > 0.0 && unit(rng) < p.zero_fraction) ? 0.0 : v;
  }

  Graph topology(p.num_vertices, std::move(edges), p.feature_dim, std::move(features));
  auto labels = propagate_labels(topology, p.num_classes, rng);
  return std::move(topology).with_labels(std::move(labels));
}

RmatParams rmat_preset(std::string_view name, std::uint64_t seed) {
  RmatParams p;
  p.density = 0.001;
  p.feature_dim = 32;
  p.num_classes = 8;
  p.seed = seed;
  if (name == "RMAT-20K") p.num_vertices = 20'000;
  else if (name == "RMAT-40K") p.num_vertices = 40'000;
  else if (name == "RMAT-60K") p.num_vertices = 60'000;
  else if (name == "RMAT-80K") p.num_vertices = 80'000;
  else if (name == "RMAT-100K") p.num_vertices = 100'000;
  else throw ArgumentError("unknown RMAT preset \"" + std::string(name) + "\"");
  return p;
}

}  // namespace fogserve
