#include "fogserve/verify/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <queue>
#include <set>

namespace fogserve::verify {

double brute_force_bottleneck(const CostMatrix& costs) {
  const auto n = costs.size();
  std::vector<std::uint32_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0u);
  double best = std::numeric_limits<double>::infinity();
  do {
    double worst = -std::numeric_limits<double>::infinity();
    for (std::uint32_t k = 0; k < n; ++k) worst = std::max(worst, costs(k, perm[k]));
    best = std::min(best, worst);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

std::uint32_t max_flow_matching_size(const BipartiteMask& mask) {
  const auto n = mask.size();
  // nodes: 0 source, 1..n rows, n+1..2n cols, 2n+1 sink
  const std::uint32_t nodes = 2 * n + 2, s = 0, t = 2 * n + 1;
  std::vector<std::vector<int>> cap(nodes, std::vector<int>(nodes, 0));
  for (std::uint32_t k = 0; k < n; ++k) {
    cap[s][1 + k] = 1;
    cap[n + 1 + k][t] = 1;
    for (std::uint32_t j = 0; j < n; ++j)
      if (mask(k, j)) cap[1 + k][n + 1 + j] = 1;
  }
  std::uint32_t flow = 0;
  while (true) {
    std::vector<int> parent(nodes, -1);
    parent[s] = static_cast<int>(s);
    std::queue<std::uint32_t> q;
    q.push(s);
    while (!q.empty() && parent[t] < 0) {
      const auto x = q.front();
      q.pop();
      for (std::uint32_t y = 0; y < nodes; ++y)
        if (parent[y] < 0 && cap[x][y] > 0) {
          parent[y] = static_cast<int>(x);
          q.push(y);
        }
    }
    if (parent[t] < 0) break;
    for (auto y = t; y != s; y = static_cast<std::uint32_t>(parent[y])) {
      --cap[parent[y]][y];
      ++cap[y][parent[y]];
    }
    ++flow;
  }
  return flow;
}

namespace {

using Rows = std::vector<std::vector<double>>;

std::vector<double> mat_vec(const DenseMatrix& w, const std::vector<double>& x) {
  std::vector<double> y(w.rows, 0.0);
  for (std::uint32_t r = 0; r < w.rows; ++r)
    for (std::uint32_t c = 0; c < w.cols; ++c) y[r] += w(r, c) * x[c];
  return y;
}

void activate(Activation a, std::vector<double>& x) {
  if (a == Activation::relu)
    for (auto& v : x) v = std::max(v, 0.0);
}

}  // namespace

std::vector<std::vector<double>> reference_inference(const GnnModel& model, const Graph& g) {
  const auto n = g.vertex_count();
  std::vector<std::set<VertexId>> adj(n);
  for (const auto& [u, v] : g.edges()) {
    adj[u].insert(v);
    adj[v].insert(u);
  }
  Rows h(n);
  for (VertexId v = 0; v < n; ++v) h[v].assign(g.feature(v).begin(), g.feature(v).end());

  for (std::uint32_t k = 1; k <= model.num_layers(); ++k) {
    const auto& layer = model.layer(k);
    const auto in = h[0].size();
    Rows next(n);
    if (model.kind() == ModelKind::gat) {
      Rows z(n);
      for (VertexId v = 0; v < n; ++v) z[v] = mat_vec(layer.weight, h[v]);
      for (VertexId v = 0; v < n; ++v) {
        std::vector<VertexId> group(adj[v].begin(), adj[v].end());
        group.push_back(v);
        std::vector<double> coef(group.size());
        if (layer.fixed_attention) {
          for (std::size_t i = 0; i < group.size(); ++i)
            coef[i] = layer.fixed_attention->at(coefficient_key(v, group[i]));
        } else {
          double tv = 0.0;
          for (std::size_t c = 0; c < z[v].size(); ++c) tv += layer.attention.target[c] * z[v][c];
          double denom = 0.0;
          for (std::size_t i = 0; i < group.size(); ++i) {
            double su = 0.0;
            for (std::size_t c = 0; c < z[v].size(); ++c) su += layer.attention.source[c] * z[group[i]][c];
            const double e = tv + su;
            coef[i] = std::exp(e >= 0 ? e : layer.attention.negative_slope * e);
            denom += coef[i];
          }
          for (auto& c : coef) c /= denom;
        }
        std::vector<double> out(layer.weight.rows, 0.0);
        for (std::size_t i = 0; i < group.size(); ++i)
          for (std::size_t c = 0; c < out.size(); ++c) out[c] += coef[i] * z[group[i]][c];
        activate(layer.activation, out);
        next[v] = std::move(out);
      }
    } else {
      for (VertexId v = 0; v < n; ++v) {
        std::vector<double> sum(in, 0.0);
        for (auto u : adj[v])
          for (std::size_t c = 0; c < in; ++c) sum[c] += h[u][c];
        std::vector<double> x;
        if (model.kind() == ModelKind::gcn) {
          x.resize(in);
          for (std::size_t c = 0; c < in; ++c) x[c] = (sum[c] + h[v][c]) / (adj[v].size() + 1.0);
        } else {
          x.assign(2 * in, 0.0);
          for (std::size_t c = 0; c < in; ++c) {
            x[c] = adj[v].empty() ? 0.0 : sum[c] / adj[v].size();
            x[in + c] = h[v][c];
          }
        }
        next[v] = mat_vec(layer.weight, x);
        activate(layer.activation, next[v]);
      }
    }
    h = std::move(next);
  }
  return h;
}

std::uint64_t reference_bit_count(std::span<const std::uint32_t> degrees, const std::array<std::uint32_t, 3>& thresholds,
                                  const std::array<std::uint8_t, 4>& bits) {
  std::uint64_t total = 0;
  for (auto d : degrees) {
    if (d < thresholds[0]) total += bits[0];
    else if (d < thresholds[1]) total += bits[1];
    else if (d < thresholds[2]) total += bits[2];
    else total += bits[3];
  }
  return total;
}

double reference_bit_ratio(std::span<const std::uint32_t> degrees, const std::array<std::uint32_t, 3>& thresholds,
                           const std::array<std::uint8_t, 4>& bits) {
  return static_cast<double>(reference_bit_count(degrees, thresholds, bits)) /
         (static_cast<double>(degrees.size()) * 64.0);
}

std::uint64_t reference_neighbor_count(const Graph& g, std::span<const VertexId> vertices) {
  std::set<VertexId> inside(vertices.begin(), vertices.end()), outside;
  for (const auto& [u, v] : g.edges()) {
    if (inside.count(u) && !inside.count(v)) outside.insert(v);
    if (inside.count(v) && !inside.count(u)) outside.insert(u);
  }
  return outside.size();
}

double max_relative_error(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) return std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double scale = std::max(std::abs(a[i]), std::abs(b[i]));
    if (scale == 0.0) continue;
    worst = std::max(worst, std::abs(a[i] - b[i]) / scale);
  }
  return worst;
}

}  // namespace fogserve::verify
