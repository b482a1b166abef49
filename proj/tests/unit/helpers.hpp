#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <set>
#include <string>
#include <vector>

#include "fogserve/graph.hpp"

namespace fogserve::testing {

inline Graph make_graph(std::uint32_t n, std::vector<Graph::Edge> edges, std::uint32_t dim = 1) {
  std::vector<double> features(std::size_t{n} * dim);
  for (std::size_t i = 0; i < features.size(); ++i) features[i] = 0.25 * static_cast<double>(i % 7) - 0.5;
  return Graph(n, std::move(edges), dim, std::move(features));
}

inline Graph path_graph(std::uint32_t n, std::uint32_t dim = 1) {
  std::vector<Graph::Edge> edges;
  for (VertexId v = 0; v + 1 < n; ++v) edges.emplace_back(v, v + 1);
  return make_graph(n, std::move(edges), dim);
}

inline Graph star_graph(std::uint32_t leaves, std::uint32_t dim = 1) {
  std::vector<Graph::Edge> edges;
  for (VertexId v = 1; v <= leaves; ++v) edges.emplace_back(0, v);
  return make_graph(leaves + 1, std::move(edges), dim);
}

inline Graph random_graph(std::uint32_t n, double avg_degree, std::uint32_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::uint32_t> pick(0, n - 1);
  std::set<Graph::Edge> edges;
  const auto target = std::min<std::size_t>(static_cast<std::size_t>(avg_degree * n / 2), std::size_t{n} * (n - 1) / 2);
  while (edges.size() < target) {
    auto u = pick(rng), v = pick(rng);
    if (u != v) edges.emplace(std::min(u, v), std::max(u, v));
  }
  std::uniform_real_distribution<double> val(-1.0, 1.0);
  std::vector<double> features(std::size_t{n} * dim);
  for (auto& x : features) x = val(rng);
  return Graph(n, {edges.begin(), edges.end()}, dim, std::move(features));
}

// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
 public:
  explicit TempDir(const std::string& tag) {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("fogserve-" + tag + "-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace fogserve::testing
