#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "fogserve/graph.hpp"

namespace fogserve {

/// Affine latency estimate over a subgraph cardinality, in milliseconds:
/// omega(c) = per_vertex * |V| + per_neighbor * |N_V| + intercept, clamped at zero.
struct LatencyModel {
  double per_vertex = 0.0;
  double per_neighbor = 0.0;
  double intercept = 0.0;
  double residual_std_error = 0.0;  ///< fit diagnostic, ms

  /// Unclamped affine value.
  double raw(const Cardinality& c) const {
    return per_vertex * static_cast<double>(c.num_vertices) + per_neighbor * static_cast<double>(c.num_neighbors) +
           intercept;
  }
  double predict(const Cardinality& c) const {
    const double v = raw(c);
    return v > 0.0 ? v : 0.0;
  }
  /// eta * omega as a model of its own.
  LatencyModel scaled(double eta) const {
    return {per_vertex * eta, per_neighbor * eta, intercept * eta, residual_std_error * eta};
  }

  friend bool operator==(const LatencyModel&, const LatencyModel&) = default;
};

/// Ratio of measured to predicted execution time.
struct LoadFactor {
  double eta = 1.0;
  std::uint64_t timestamp = 0;  ///< inference round of the last update
};

struct Observation {
  Cardinality cardinality;
  double measured_ms = 0.0;
};

/// Geometric sweep of `count` vertex counts from ~|V|/2^(count-1) up to |V|.
std::vector<Cardinality> default_calibration_axes(const Graph& g, std::uint32_t count = 6);

/// `samples_per_axis` subgraphs per axis with measured cardinalities attached.
/// Samples alternate between uniform vertex sets and BFS balls so that vertex
/// and neighbor counts vary independently enough for the two-term regression.
std::vector<SubgraphSample> build_calibration_set(const Graph& g, std::span<const Cardinality> axes,
                                                  std::uint32_t samples_per_axis, std::uint64_t seed);

/// Ordinary least squares over (|V|, |N_V|, 1). Throws ArgumentError on fewer
/// than three observations and RankDeficientError when all cardinalities coincide.
LatencyModel fit_latency_model(std::span<const Observation> observations);

class RankDeficientError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// eta = measured / omega(c). Throws ArgumentError if omega(c) <= 0 or measured <= 0.
LoadFactor update_load_factor(const LatencyModel& model, const Cardinality& c, double measured_ms,
                              std::uint64_t timestamp = 0);

/// eta * omega(c), never negative.
double predict_online(const LatencyModel& model, const LoadFactor& load, const Cardinality& c);

/// Per-node load factor with staleness: a factor older than `window` rounds reads as 1.
class LoadTracker {
 public:
  explicit LoadTracker(std::uint64_t window = 16) : window_(window) {}

  void record(const LatencyModel& model, const Cardinality& c, double measured_ms, std::uint64_t round) {
    current_ = update_load_factor(model, c, measured_ms, round);
    valid_ = true;
  }
  LoadFactor at(std::uint64_t round) const {
    if (!valid_ || round > current_.timestamp + window_) return {1.0, round};
    return current_;
  }

 private:
  std::uint64_t window_;
  LoadFactor current_{};
  bool valid_ = false;
};

/// One record of the profile document.
struct NodeProfile {
  FogId node = 0;
  LatencyModel model;
  LoadFactor load;
};

/// Text document of `key = value` lines; each record starts with `node = <id>`.
void save_profiles(std::span<const NodeProfile> profiles, const std::filesystem::path& path);
std::vector<NodeProfile> load_profiles(const std::filesystem::path& path);
std::string format_profiles(std::span<const NodeProfile> profiles);
std::vector<NodeProfile> parse_profiles(std::string_view text);

}  // namespace fogserve
