#include "fogserve/profiler.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

namespace fogserve {

namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

}  // namespace

std::vector<Cardinality> default_calibration_axes(const Graph& g, std::uint32_t count) {
  std::vector<Cardinality> axes;
  if (count == 0 || g.vertex_count() == 0) return axes;
  for (std::uint32_t i = 0; i < count; ++i) {
    const double frac = std::ldexp(1.0, -static_cast<int>(count - 1 - i));
    const auto v = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(std::llround(frac * g.vertex_count())));
    axes.push_back({std::min<std::uint64_t>(v, g.vertex_count()), 0});
  }
  return axes;
}

std::vector<SubgraphSample> build_calibration_set(const Graph& g, std::span<const Cardinality> axes,
                                                  std::uint32_t samples_per_axis, std::uint64_t seed) {
  if (axes.empty()) throw ArgumentError("calibration needs at least one cardinality axis");
  for (const auto& axis : axes)
    if (axis.num_vertices > g.vertex_count())
      throw ArgumentError("calibration axis of " + std::to_string(axis.num_vertices) + " vertices exceeds graph of " +
                          std::to_string(g.vertex_count()));
  std::vector<SubgraphSample> samples;
  samples.reserve(axes.size() * samples_per_axis);
  for (std::size_t a = 0; a < axes.size(); ++a)
    for (std::uint32_t i = 0; i < samples_per_axis; ++i) {
      const auto sample_seed = splitmix(seed ^ splitmix((std::uint64_t{a} << 32) | i));
      const auto mode = i % 2 == 0 ? SampleMode::uniform : SampleMode::ball;
      samples.push_back(sample_subgraph(g, axes[a], sample_seed, mode));
    }
  return samples;
}

LatencyModel fit_latency_model(std::span<const Observation> observations) {
  const auto m = observations.size();
  if (m < 3) throw ArgumentError("latency fit needs at least 3 observations, got " + std::to_string(m));

  Eigen::MatrixXd design(static_cast<Eigen::Index>(m), 3);
  Eigen::VectorXd target(static_cast<Eigen::Index>(m));
  for (std::size_t i = 0; i < m; ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    design(r, 0) = static_cast<double>(observations[i].cardinality.num_vertices);
    design(r, 1) = static_cast<double>(observations[i].cardinality.num_neighbors);
    design(r, 2) = 1.0;
    target(r) = observations[i].measured_ms;
  }
  // Column equilibration keeps the rank threshold meaningful across scales.
  Eigen::Vector3d scale;
  for (Eigen::Index c = 0; c < 3; ++c) {
    const double s = design.col(c).cwiseAbs().maxCoeff();
    scale(c) = s > 0.0 ? s : 1.0;
    design.col(c) /= scale(c);
  }
  Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(design);
  cod.setThreshold(1e-10);
  if (cod.rank() <= 1)
    throw RankDeficientError("latency fit is rank-deficient: all observed cardinalities are identical");
  const Eigen::VectorXd coef = cod.solve(target);

  LatencyModel model;
  model.per_vertex = coef(0) / scale(0);
  model.per_neighbor = coef(1) / scale(1);
  model.intercept = coef(2) / scale(2);
  const double rss = (design * coef - target).squaredNorm();
  const auto dof = static_cast<double>(m) - static_cast<double>(cod.rank());
  model.residual_std_error = dof > 0 ? std::sqrt(rss / dof) : 0.0;
  return model;
}

LoadFactor update_load_factor(const LatencyModel& model, const Cardinality& c, double measured_ms,
                              std::uint64_t timestamp) {
  const double predicted = model.predict(c);
  if (!(predicted > 0.0)) throw ArgumentError("load factor needs a positive latency estimate");
  if (!(measured_ms > 0.0)) throw ArgumentError("load factor needs a positive measured time");
  return {measured_ms / predicted, timestamp};
}

double predict_online(const LatencyModel& model, const LoadFactor& load, const Cardinality& c) {
  return load.eta * model.predict(c);
}

// --- profile document ------------------------------------------------------

std::string format_profiles(std::span<const NodeProfile> profiles) {
  std::string out;
  char buf[64];
  auto put = [&](const char* key, double value) {
    std::snprintf(buf, sizeof buf, "%.17g", value);
    out += key;
    out += " = ";
    out += buf;
    out += '\n';
  };
  for (const auto& p : profiles) {
    out += "node = " + std::to_string(p.node) + "\n";
    put("beta_vertices", p.model.per_vertex);
    put("beta_neighbors", p.model.per_neighbor);
    put("epsilon", p.model.intercept);
    put("residual_std_error", p.model.residual_std_error);
    put("eta", p.load.eta);
    out += "timestamp = " + std::to_string(p.load.timestamp) + "\n\n";
  }
  return out;
}

std::vector<NodeProfile> parse_profiles(std::string_view text) {
  std::vector<NodeProfile> profiles;
  std::set<FogId> ids;
  std::size_t line_no = 0;
  std::istringstream stream{std::string(text)};
  std::string raw_line;
  while (std::getline(stream, raw_line)) {
    ++line_no;
    std::string_view line = raw_line;
    auto trim = [](std::string_view s) {
      while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
      while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
      return s;
    };
    line = trim(line);
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    const std::string where = "profiles:" + std::to_string(line_no);
    if (eq == std::string_view::npos) throw ParseError(where + ": expected key = value");
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    auto number = [&]() {
      double v = 0.0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc{} || ptr != value.data() + value.size())
        throw ParseError(where + ": invalid number \"" + std::string(value) + "\"");
      return v;
    };
    auto integer = [&]() {
      std::uint64_t v = 0;
      auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), v);
      if (ec != std::errc{} || ptr != value.data() + value.size())
        throw ParseError(where + ": invalid integer \"" + std::string(value) + "\"");
      return v;
    };
    if (key == "node") {
      NodeProfile p;
      p.node = static_cast<FogId>(integer());
      if (!ids.insert(p.node).second) throw ParseError(where + ": duplicate node " + std::to_string(p.node));
      profiles.push_back(p);
      continue;
    }
    if (profiles.empty()) throw ParseError(where + ": field before the first node record");
    auto& p = profiles.back();
    if (key == "beta_vertices") p.model.per_vertex = number();
    else if (key == "beta_neighbors") p.model.per_neighbor = number();
    else if (key == "epsilon") p.model.intercept = number();
    else if (key == "residual_std_error") p.model.residual_std_error = number();
    else if (key == "eta") p.load.eta = number();
    else if (key == "timestamp") p.load.timestamp = integer();
    else throw ParseError(where + ": unknown key \"" + std::string(key) + "\"");
  }
  for (const auto& p : profiles)
    if (!(p.load.eta > 0.0)) throw ParseError("profiles: node " + std::to_string(p.node) + " has non-positive eta");
  return profiles;
}

void save_profiles(std::span<const NodeProfile> profiles, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << format_profiles(profiles);
}

std::vector<NodeProfile> load_profiles(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("profiles not found: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_profiles(ss.str());
}

}  // namespace fogserve
