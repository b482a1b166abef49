#include "fogserve/partition.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <queue>
#include <random>
#include <string>

namespace fogserve {

namespace {

constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();

// Vertex- and edge-weighted CSR graph used across coarsening levels.
struct WeightedGraph {
  std::vector<std::uint64_t> xadj{0};
  std::vector<std::uint32_t> adj;
  std::vector<std::int64_t> ewgt;
  std::vector<std::int64_t> vwgt;

  std::uint32_t size() const { return static_cast<std::uint32_t>(vwgt.size()); }
  std::int64_t total_weight() const { return std::accumulate(vwgt.begin(), vwgt.end(), std::int64_t{0}); }
};

WeightedGraph from_graph(const Graph& g) {
  WeightedGraph w;
  const auto n = g.vertex_count();
  w.vwgt.assign(n, 1);
  w.xadj.resize(n + 1);
  w.xadj[0] = 0;
  for (VertexId v = 0; v < n; ++v) w.xadj[v + 1] = w.xadj[v] + g.degree(v);
  w.adj.reserve(w.xadj.back());
  for (VertexId v = 0; v < n; ++v) {
    const auto nb = g.neighbors(v);
    w.adj.insert(w.adj.end(), nb.begin(), nb.end());
  }
  w.ewgt.assign(w.adj.size(), 1);
  return w;
}

std::vector<std::uint32_t> shuffled_order(std::uint32_t n, std::mt19937_64& rng) {
  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  std::shuffle(order.begin(), order.end(), rng);
  return order;
}

// Heavy-edge matching followed by pairing of still-unmatched vertices that share
// a common neighbor (keeps power-law graphs from stalling around hubs).
WeightedGraph coarsen(const WeightedGraph& g, std::int64_t max_vertex_weight, std::mt19937_64& rng,
                      std::vector<std::uint32_t>& coarse_of) {
  const auto n = g.size();
  std::vector<std::uint32_t> match(n, kUnset);
  const auto order = shuffled_order(n, rng);

  for (auto v : order) {
    if (match[v] != kUnset) continue;
    std::uint32_t best = kUnset;
    std::int64_t best_w = -1;
    for (auto e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
      const auto u = g.adj[e];
      if (match[u] != kUnset || u == v) continue;
      if (g.vwgt[v] + g.vwgt[u] > max_vertex_weight) continue;
      if (g.ewgt[e] > best_w) {
        best_w = g.ewgt[e];
        best = u;
      }
    }
    if (best != kUnset) {
      match[v] = best;
      match[best] = v;
    }
  }
  for (auto h : order) {
    std::uint32_t pending = kUnset;
    for (auto e = g.xadj[h]; e < g.xadj[h + 1]; ++e) {
      const auto u = g.adj[e];
      if (match[u] != kUnset) continue;
      if (pending == kUnset) {
        pending = u;
      } else if (g.vwgt[pending] + g.vwgt[u] <= max_vertex_weight) {
        match[pending] = u;
        match[u] = pending;
        pending = kUnset;
      }
    }
  }
  for (std::uint32_t v = 0; v < n; ++v)
    if (match[v] == kUnset) match[v] = v;

  coarse_of.assign(n, kUnset);
  std::vector<std::uint32_t> first, second;
  for (std::uint32_t v = 0; v < n; ++v) {
    if (coarse_of[v] != kUnset) continue;
    const auto c = static_cast<std::uint32_t>(first.size());
    coarse_of[v] = c;
    coarse_of[match[v]] = c;
    first.push_back(v);
    second.push_back(match[v]);
  }

  const auto nc = static_cast<std::uint32_t>(first.size());
  WeightedGraph coarse;
  coarse.vwgt.resize(nc);
  coarse.xadj.assign(nc + 1, 0);
  coarse.adj.reserve(g.adj.size() / 2);
  coarse.ewgt.reserve(g.adj.size() / 2);
  std::vector<std::int64_t> slot(nc, -1);
  for (std::uint32_t c = 0; c < nc; ++c) {
    const auto begin = coarse.adj.size();
    auto absorb = [&](std::uint32_t v) {
      for (auto e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
        const auto cu = coarse_of[g.adj[e]];
        if (cu == c) continue;
        if (slot[cu] < 0) {
          slot[cu] = static_cast<std::int64_t>(coarse.adj.size());
          coarse.adj.push_back(cu);
          coarse.ewgt.push_back(g.ewgt[e]);
        } else {
          coarse.ewgt[static_cast<std::size_t>(slot[cu])] += g.ewgt[e];
        }
      }
    };
    absorb(first[c]);
    coarse.vwgt[c] = g.vwgt[first[c]];
    if (second[c] != first[c]) {
      absorb(second[c]);
      coarse.vwgt[c] += g.vwgt[second[c]];
    }
    for (auto i = begin; i < coarse.adj.size(); ++i) slot[coarse.adj[i]] = -1;
    coarse.xadj[c + 1] = coarse.adj.size();
  }
  return coarse;
}

std::int64_t weighted_cut(const WeightedGraph& g, const std::vector<std::uint32_t>& part) {
  std::int64_t cut = 0;
  for (std::uint32_t v = 0; v < g.size(); ++v)
    for (auto e = g.xadj[v]; e < g.xadj[v + 1]; ++e)
      if (part[v] != part[g.adj[e]]) cut += g.ewgt[e];
  return cut / 2;
}

std::vector<std::int64_t> part_weights(const WeightedGraph& g, const std::vector<std::uint32_t>& part,
                                       std::uint32_t parts) {
  std::vector<std::int64_t> w(parts, 0);
  for (std::uint32_t v = 0; v < g.size(); ++v) w[part[v]] += g.vwgt[v];
  return w;
}

// Greedy graph growing: parts are grown one at a time from a random seed,
// always absorbing the frontier vertex most connected to the growing part.
std::vector<std::uint32_t> grow_initial(const WeightedGraph& g, std::uint32_t parts, std::int64_t max_weight,
                                        std::mt19937_64& rng) {
  const auto n = g.size();
  std::vector<std::uint32_t> part(n, kUnset);
  std::vector<std::int64_t> conn(n, 0);
  std::vector<char> rejected(n, 0);
  const auto seeds = shuffled_order(n, rng);
  std::size_t seed_cursor = 0;
  std::int64_t remaining = g.total_weight();
  std::uint32_t unassigned = n;

  for (std::uint32_t p = 0; p + 1 < parts && unassigned > 0; ++p) {
    const std::int64_t target = remaining / static_cast<std::int64_t>(parts - p);
    std::int64_t weight = 0;
    std::priority_queue<std::pair<std::int64_t, std::uint32_t>> frontier;
    std::vector<std::uint32_t> touched, too_heavy;
    std::size_t cursor = seed_cursor;
    while (weight < target && unassigned > 0) {
      if (frontier.empty()) {
        while (cursor < seeds.size() && (part[seeds[cursor]] != kUnset || rejected[seeds[cursor]])) ++cursor;
        if (cursor == seeds.size()) break;
        frontier.emplace(conn[seeds[cursor]], seeds[cursor]);
      }
      const auto [gain, v] = frontier.top();
      frontier.pop();
      if (part[v] != kUnset || rejected[v] || gain != conn[v]) continue;
      if (weight > 0 && weight + g.vwgt[v] > max_weight) {
        rejected[v] = 1;
        too_heavy.push_back(v);
        continue;
      }
      part[v] = p;
      weight += g.vwgt[v];
      --unassigned;
      for (auto e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
        const auto u = g.adj[e];
        if (part[u] != kUnset) continue;
        if (conn[u] == 0) touched.push_back(u);
        conn[u] += g.ewgt[e];
        frontier.emplace(conn[u], u);
      }
    }
    for (auto u : touched) conn[u] = 0;
    for (auto u : too_heavy) rejected[u] = 0;
    while (seed_cursor < seeds.size() && part[seeds[seed_cursor]] != kUnset) ++seed_cursor;
    remaining -= weight;
  }
  for (auto& x : part)
    if (x == kUnset) x = parts - 1;
  return part;
}

// Boundary greedy refinement: move a vertex to the adjacent part with the
// largest cut reduction if the destination stays within max_weight; zero-gain
// moves are taken only when they strictly improve balance.
void refine(const WeightedGraph& g, std::vector<std::uint32_t>& part, std::uint32_t parts, std::int64_t max_weight,
            std::uint32_t passes, std::mt19937_64& rng) {
  auto pw = part_weights(g, part, parts);
  std::vector<std::uint32_t> members(parts, 0);
  for (auto p : part) ++members[p];
  std::vector<std::int64_t> conn(parts, 0);
  std::vector<std::uint32_t> touched;

  for (std::uint32_t pass = 0; pass < passes; ++pass) {
    std::uint64_t moved = 0;
    for (auto v : shuffled_order(g.size(), rng)) {
      const auto from = part[v];
      touched.clear();
      bool external = false;
      for (auto e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
        const auto p = part[g.adj[e]];
        if (conn[p] == 0) touched.push_back(p);
        conn[p] += g.ewgt[e];
        external |= p != from;
      }
      if (external && members[from] > 1) {
        const auto internal = conn[from];
        std::uint32_t best = from;
        std::int64_t best_gain = 0;
        for (auto t : touched) {
          if (t == from || pw[t] + g.vwgt[v] > max_weight) continue;
          const auto gain = conn[t] - internal;
          if (gain < 0 || (gain == 0 && pw[t] + g.vwgt[v] >= pw[from])) continue;
          if (best == from || gain > best_gain || (gain == best_gain && pw[t] < pw[best])) {
            best = t;
            best_gain = gain;
          }
        }
        if (best != from) {
          part[v] = best;
          pw[from] -= g.vwgt[v];
          pw[best] += g.vwgt[v];
          --members[from];
          ++members[best];
          ++moved;
        }
      }
      for (auto p : touched) conn[p] = 0;
    }
    if (moved == 0) break;
  }
}

// Moves vertices out of overweight parts (least cut damage first) and fills
// empty parts. Succeeds whenever vertex weights are fine enough.
void enforce_balance(const WeightedGraph& g, std::vector<std::uint32_t>& part, std::uint32_t parts,
                     std::int64_t max_weight) {
  auto pw = part_weights(g, part, parts);
  std::vector<std::int64_t> conn(parts, 0);
  std::vector<std::uint32_t> touched;

  for (int round = 0; round < 8; ++round) {
    bool over = false;
    for (auto w : pw) over |= w > max_weight;
    if (!over) break;
    // Candidate moves out of overweight parts, best gain first.
    struct Move {
      std::int64_t gain;
      std::uint32_t v;
      std::uint32_t to;
    };
    std::vector<Move> moves;
    for (std::uint32_t v = 0; v < g.size(); ++v) {
      const auto from = part[v];
      if (pw[from] <= max_weight) continue;
      touched.clear();
      for (auto e = g.xadj[v]; e < g.xadj[v + 1]; ++e) {
        const auto p = part[g.adj[e]];
        if (conn[p] == 0) touched.push_back(p);
        conn[p] += g.ewgt[e];
      }
      std::uint32_t best = kUnset;
      std::int64_t best_gain = std::numeric_limits<std::int64_t>::min();
      for (std::uint32_t t = 0; t < parts; ++t) {
        if (t == from || pw[t] >= max_weight) continue;
        const auto gain = conn[t] - conn[from];
        if (gain > best_gain || (gain == best_gain && pw[t] < pw[best])) {
          best_gain = gain;
          best = t;
        }
      }
      for (auto p : touched) conn[p] = 0;
      if (best != kUnset) moves.push_back({best_gain, v, best});
    }
    std::stable_sort(moves.begin(), moves.end(), [](const Move& a, const Move& b) { return a.gain > b.gain; });
    for (const auto& m : moves) {
      const auto from = part[m.v];
      if (pw[from] <= max_weight) continue;
      auto to = m.to;
      if (pw[to] + g.vwgt[m.v] > max_weight) {
        to = static_cast<std::uint32_t>(std::min_element(pw.begin(), pw.end()) - pw.begin());
        if (pw[to] + g.vwgt[m.v] > max_weight) continue;
      }
      part[m.v] = to;
      pw[from] -= g.vwgt[m.v];
      pw[to] += g.vwgt[m.v];
    }
  }

  std::vector<std::uint32_t> members(parts, 0);
  for (auto p : part) ++members[p];
  for (std::uint32_t p = 0; p < parts; ++p) {
    if (members[p] > 0) continue;
    const auto donor = static_cast<std::uint32_t>(std::max_element(members.begin(), members.end()) - members.begin());
    if (members[donor] < 2) break;
    std::uint32_t pick = kUnset;
    for (std::uint32_t v = 0; v < g.size(); ++v)
      if (part[v] == donor && (pick == kUnset || g.vwgt[v] < g.vwgt[pick])) pick = v;
    part[pick] = p;
    --members[donor];
    ++members[p];
  }
}

}  // namespace

std::uint64_t max_part_weight(std::uint64_t total, std::uint32_t parts, double imbalance) {
  if (parts == 0) throw ArgumentError("part count must be positive");
  const std::uint64_t even = (total + parts - 1) / parts;
  const auto bound = static_cast<std::uint64_t>(std::floor((1.0 + imbalance) * static_cast<double>(even) + 1e-9));
  return std::max(bound, even);
}

PartitionVector MultilevelPartitioner::partition(const Graph& g, std::uint32_t parts) const {
  const auto n = g.vertex_count();
  if (parts == 0) throw ArgumentError("part count must be positive");
  if (parts > n)
    throw ArgumentError("cannot split " + std::to_string(n) + " vertices into " + std::to_string(parts) + " parts");
  if (parts == 1) return PartitionVector(n, 0);
  if (parts == n) {
    PartitionVector out(n);
    std::iota(out.begin(), out.end(), 0u);
    return out;
  }

  std::mt19937_64 rng(options_.seed);
  const auto max_weight = static_cast<std::int64_t>(max_part_weight(n, parts, options_.imbalance));
  const std::uint32_t coarsen_to = std::max<std::uint32_t>(20 * parts, 120);

  std::vector<WeightedGraph> levels;
  std::vector<std::vector<std::uint32_t>> maps;
  levels.push_back(from_graph(g));
  while (levels.back().size() > coarsen_to) {
    const auto& fine = levels.back();
    const auto cap = std::max<std::int64_t>(1, static_cast<std::int64_t>(1.5 * static_cast<double>(fine.total_weight()) / coarsen_to));
    std::vector<std::uint32_t> map;
    auto coarse = coarsen(fine, cap, rng, map);
    if (coarse.size() > 0.92 * fine.size()) break;
    maps.push_back(std::move(map));
    levels.push_back(std::move(coarse));
  }

  const auto& coarsest = levels.back();
  std::vector<std::uint32_t> best;
  std::int64_t best_cut = std::numeric_limits<std::int64_t>::max();
  std::int64_t best_excess = std::numeric_limits<std::int64_t>::max();
  for (std::uint32_t trial = 0; trial < std::max<std::uint32_t>(1, options_.initial_trials); ++trial) {
    auto part = grow_initial(coarsest, parts, max_weight, rng);
    refine(coarsest, part, parts, max_weight, options_.refine_passes, rng);
    enforce_balance(coarsest, part, parts, max_weight);
    const auto pw = part_weights(coarsest, part, parts);
    const auto excess = std::max<std::int64_t>(0, *std::max_element(pw.begin(), pw.end()) - max_weight);
    const auto cut = weighted_cut(coarsest, part);
    if (excess < best_excess || (excess == best_excess && cut < best_cut)) {
      best = std::move(part);
      best_cut = cut;
      best_excess = excess;
    }
  }

  std::vector<std::uint32_t> part = std::move(best);
  for (auto level = levels.size() - 1; level > 0; --level) {
    const auto& map = maps[level - 1];
    std::vector<std::uint32_t> finer(map.size());
    for (std::size_t v = 0; v < map.size(); ++v) finer[v] = part[map[v]];
    part = std::move(finer);
    const auto& graph = levels[level - 1];
    enforce_balance(graph, part, parts, max_weight);
    refine(graph, part, parts, max_weight, options_.refine_passes, rng);
  }
  enforce_balance(levels.front(), part, parts, max_weight);
  return part;
}

PartitionVector FilePartitioner::partition(const Graph& g, std::uint32_t parts) const {
  std::ifstream in(path_);
  if (!in) throw ParseError("partition file not found: " + path_.string());
  PartitionVector part(g.vertex_count(), kUnset);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::uint64_t v = 0, p = 0;
    const char* s = line.data();
    const char* end = s + line.size();
    while (s < end && (*s == ' ' || *s == '\t')) ++s;
    auto r1 = std::from_chars(s, end, v);
    s = r1.ptr;
    while (s < end && (*s == ' ' || *s == '\t')) ++s;
    auto r2 = std::from_chars(s, end, p);
    const std::string where = path_.string() + ":" + std::to_string(line_no);
    if (r1.ec != std::errc{} || r2.ec != std::errc{}) throw ParseError(where + ": expected \"vertex part\"");
    if (v >= g.vertex_count() || p >= parts) throw InvariantError(where + ": vertex or part id out of range");
    if (part[v] != kUnset) throw InvariantError(where + ": vertex " + std::to_string(v) + " listed twice");
    part[v] = static_cast<std::uint32_t>(p);
  }
  for (std::uint32_t v = 0; v < part.size(); ++v)
    if (part[v] == kUnset) throw InvariantError(path_.string() + ": vertex " + std::to_string(v) + " has no part");
  return part;
}

std::vector<std::vector<VertexId>> to_parts(const PartitionVector& part_of, std::uint32_t parts) {
  std::vector<std::vector<VertexId>> out(parts);
  for (VertexId v = 0; v < part_of.size(); ++v) {
    if (part_of[v] >= parts) throw InvariantError("part id out of range");
    out[part_of[v]].push_back(v);
  }
  return out;
}

std::vector<std::vector<VertexId>> balanced_partition(const Graph& g, std::uint32_t n, double imbalance,
                                                      std::uint64_t seed) {
  MultilevelOptions options;
  options.imbalance = imbalance;
  options.seed = seed;
  return to_parts(MultilevelPartitioner(options).partition(g, n), n);
}

}  // namespace fogserve
