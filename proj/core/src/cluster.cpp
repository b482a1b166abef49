#include "fogserve/cluster.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <limits>
#include <string>

namespace fogserve {

void FogCluster::validate() const {
  if (nodes.empty()) throw ArgumentError("cluster has no fog nodes");
  if (!(sync_cost_ms >= 0.0)) throw ArgumentError("sync cost must be non-negative");
  if (layers == 0) throw ArgumentError("layer count must be positive");
  for (const auto& node : nodes) {
    if (!(node.bandwidth_bytes_per_s > 0.0))
      throw ArgumentError("fog " + std::to_string(node.id) + ": bandwidth must be positive");
    if (!(node.access_latency_ms >= 0.0))
      throw ArgumentError("fog " + std::to_string(node.id) + ": access latency must be non-negative");
  }
}

FogCluster FogCluster::truncated(std::uint32_t count) const {
  if (count == 0 || count > size()) throw ArgumentError("cannot truncate cluster to " + std::to_string(count) + " nodes");
  FogCluster out = *this;
  out.nodes.resize(count);
  return out;
}

Placement::Placement(std::vector<FogId> fog_of, std::uint32_t fog_count)
    : fog_of_(std::move(fog_of)), members_(fog_count) {
  for (VertexId v = 0; v < fog_of_.size(); ++v) {
    if (fog_of_[v] >= fog_count)
      throw InvariantError("vertex " + std::to_string(v) + " placed on unknown fog " + std::to_string(fog_of_[v]));
    members_[fog_of_[v]].push_back(v);
  }
}

Placement Placement::from_partitions(std::span<const std::vector<VertexId>> partitions,
                                     std::span<const FogId> assignment, std::uint32_t vertex_count) {
  if (partitions.size() != assignment.size())
    throw DimensionError("partition count and assignment length differ");
  const auto n = static_cast<std::uint32_t>(assignment.size());
  std::vector<bool> used(n, false);
  for (auto j : assignment) {
    if (j >= n || used[j]) throw InvariantError("assignment is not a bijection");
    used[j] = true;
  }
  constexpr auto unset = std::numeric_limits<FogId>::max();
  std::vector<FogId> fog_of(vertex_count, unset);
  for (std::size_t k = 0; k < partitions.size(); ++k)
    for (auto v : partitions[k]) {
      if (v >= vertex_count || fog_of[v] != unset) throw InvariantError("partitions overlap or exceed the graph");
      fog_of[v] = assignment[k];
    }
  if (std::find(fog_of.begin(), fog_of.end(), unset) != fog_of.end())
    throw InvariantError("partitions do not cover every vertex");
  return Placement(std::move(fog_of), n);
}

Cardinality Placement::cardinality(const Graph& g, FogId j) const { return measure_cardinality(g, members_[j]); }

std::vector<VertexId> Placement::boundary(const Graph& g, FogId j) const {
  std::vector<VertexId> out;
  for (auto v : members_[j]) {
    const auto nb = g.neighbors(v);
    if (std::any_of(nb.begin(), nb.end(), [&](VertexId u) { return fog_of_[u] != j; })) out.push_back(v);
  }
  return out;
}

std::vector<VertexId> Placement::halo(const Graph& g, FogId j) const {
  std::vector<VertexId> out;
  for (auto v : members_[j])
    for (auto u : g.neighbors(v))
      if (fog_of_[u] != j) out.push_back(u);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

void Placement::move(VertexId v, FogId to) {
  if (v >= fog_of_.size() || to >= members_.size()) throw ArgumentError("move out of range");
  const auto from = fog_of_[v];
  if (from == to) return;
  auto& src = members_[from];
  src.erase(std::lower_bound(src.begin(), src.end(), v));
  auto& dst = members_[to];
  dst.insert(std::lower_bound(dst.begin(), dst.end(), v), v);
  fog_of_[v] = to;
}

void save_placement(const Placement& placement, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw ParseError("cannot write " + path.string());
  for (VertexId v = 0; v < placement.vertex_count(); ++v) out << v << ' ' << placement.fog_of(v) << '\n';
  if (!out) throw ParseError("write failed: " + path.string());
}

Placement load_placement(const std::filesystem::path& path, std::uint32_t vertex_count, std::uint32_t fog_count) {
  std::ifstream in(path);
  if (!in) throw ParseError("placement file not found: " + path.string());
  constexpr auto unset = std::numeric_limits<FogId>::max();
  std::vector<FogId> fog_of(vertex_count, unset);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = path.string() + ":" + std::to_string(line_no);
    std::uint64_t v = 0, j = 0;
    const char* s = line.data();
    const char* end = s + line.size();
    auto r1 = std::from_chars(s, end, v);
    s = r1.ptr;
    while (s < end && (*s == ' ' || *s == '\t')) ++s;
    auto r2 = std::from_chars(s, end, j);
    if (r1.ec != std::errc{} || r2.ec != std::errc{}) throw ParseError(where + ": expected \"vertex_id fog_id\"");
    if (v >= vertex_count || j >= fog_count) throw InvariantError(where + ": id out of range");
    if (fog_of[v] != unset) throw InvariantError(where + ": vertex listed twice");
    fog_of[v] = static_cast<FogId>(j);
  }
  for (VertexId v = 0; v < vertex_count; ++v)
    if (fog_of[v] == unset) throw InvariantError(path.string() + ": vertex " + std::to_string(v) + " is unplaced");
  return Placement(std::move(fog_of), fog_count);
}

}  // namespace fogserve
