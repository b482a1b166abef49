#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <queue>
#include <span>
#include <string>
#include <vector>

#include "fogserve/cluster.hpp"
#include "fogserve/codec.hpp"
#include "fogserve/gnn.hpp"
#include "fogserve/planner.hpp"
#include "fogserve/quant.hpp"

namespace fogserve {

/// Logical-time event queue; events at equal times fire in scheduling order.
class EventQueue {
 public:
  using Action = std::function<void()>;

  /// Throws ArgumentError when `time_ms` lies before the current time.
  void schedule(double time_ms, Action action);
  double now() const { return now_; }
  bool empty() const { return queue_.empty(); }
  /// Drains the queue; returns the number of events fired.
  std::size_t run();

 private:
  struct Item {
    double time;
    std::uint64_t seq;
    Action action;
  };
  struct Later {
    bool operator()(const Item& a, const Item& b) const {
      return a.time != b.time ? a.time > b.time : a.seq > b.seq;
    }
  };
  std::priority_queue<Item, std::vector<Item>, Later> queue_;
  double now_ = 0.0;
  std::uint64_t next_seq_ = 0;
};

struct WanProfile {
  double bandwidth_bytes_per_s = 2.0e6;
  double latency_ms = 50.0;
};

struct ModelSpec {
  ModelKind kind = ModelKind::gcn;
  std::uint32_t hidden = 32;
  std::uint32_t classes = 8;
  std::uint64_t seed = 7;
};

/// Everything a serving simulation needs besides the graph.
struct Scenario {
  std::string name = "scenario";
  FogCluster cluster;       ///< node.cost is the hidden ground-truth execution cost
  WanProfile wan;
  LatencyModel cloud_cost;  ///< ground-truth cost of the cloud server
  ModelSpec model;          ///< depth is cluster.layers
  bool codec = true;
  std::string codec_name = "deflate";
  std::array<std::uint8_t, 4> quant_bits{64, 32, 16, 8};
  double exec_noise = 0.02;       ///< relative std of realized execution times
  double access_jitter_ms = 0.0;  ///< per-device upload start jitter, uniform in [0, jitter]
  double profile_noise = 0.05;    ///< relative std of calibration measurements
  std::uint32_t profile_samples = 4;
  std::vector<double> loads;      ///< true background load per fog (empty = all 1)
  /// Latency models to plan with; profiled from the ground truth when absent.
  std::optional<std::vector<LatencyModel>> profiles;
  double imbalance = 0.03;
  std::uint64_t seed = 1;  ///< partitioning and profiling seed

  void validate() const;
};

/// Reference fog node types: "B" moderate, "A" 1.378x slower, "C" 2x faster.
LatencyModel fog_type_cost(const std::string& type);
/// 1 x A, 4 x B, 1 x C with mixed LAN bandwidths, WAN 2 MB/s + 50 ms, cloud 10x type B.
Scenario standard_scenario();
/// `fogs` type-B nodes sharing one bandwidth.
Scenario homogeneous_scenario(std::uint32_t fogs);
/// Seeded variation of the standard mix: capabilities and bandwidths jittered.
Scenario random_heterogeneous_scenario(std::uint64_t seed);

enum class Strategy { cloud, single_fog, multifog_baseline, fograph };
std::string to_string(Strategy s);
Strategy parse_strategy(const std::string& name);
inline constexpr std::array<Strategy, 4> kAllStrategies{Strategy::cloud, Strategy::single_fog,
                                                        Strategy::multifog_baseline, Strategy::fograph};

/// Per-fog upload completion: devices (one per vertex) start after the access
/// latency plus jitter and share b_j; a fog is done when its last device is.
/// Payload bytes are split evenly over a fog's devices.
std::vector<double> simulate_collection(const Placement& placement, const FogCluster& cluster,
                                        std::span<const std::uint64_t> fog_payload_bytes, double jitter_ms = 0.0,
                                        std::uint64_t seed = 0);

struct ExecutionTiming {
  std::vector<double> compute_ms;  ///< per fog, all layers
  std::vector<double> execution_ms;  ///< compute + K * delta
  std::vector<std::uint64_t> sync_bytes;  ///< per layer boundary, activations crossing fogs
};

/// Realized execution: load_j * cost_j(card_j) * factor_j, split evenly over K layers, plus K * delta.
ExecutionTiming simulate_execution(const Placement& placement, const Graph& g, const FogCluster& cluster,
                                   std::span<const LatencyModel> costs, std::span<const double> loads,
                                   std::span<const double> noise_factors = {}, std::uint32_t output_dim = 0);

/// K BSP supersteps: every fog evaluates its own vertices from local and halo
/// activations, then boundary activations are exchanged. Result is assembled
/// in vertex order.
ActivationSet distributed_inference(const GnnModel& model, const Graph& g, const Placement& placement);

struct ServingReport {
  Strategy strategy = Strategy::fograph;
  std::uint64_t seed = 0;
  std::vector<FogId> fogs;  ///< nodes that served, in id order (empty for cloud)
  std::vector<double> collection_ms;
  std::vector<double> execution_ms;
  std::vector<double> sync_ms_per_layer;
  double assembly_ms = 0.0;
  double e2e_ms = 0.0;
  double throughput_per_s = 0.0;  ///< 1000 / slowest pipeline stage
  double flip_rate = 0.0;         ///< NaN when embeddings were not computed
  std::uint64_t payload_bytes = 0;
  std::size_t events = 0;
  std::optional<ActivationSet> output;
};

struct ServeOptions {
  bool compute_embeddings = true;
  bool keep_output = false;
  std::optional<bool> codec;          ///< overrides the scenario flag
  std::optional<std::vector<double>> loads;  ///< overrides scenario loads
};

/// Fits one latency model per fog from noisy calibration runs against node.cost.
std::vector<LatencyModel> profile_cluster(const Graph& g, const FogCluster& cluster, double noise,
                                          std::uint32_t samples_per_axis, std::uint64_t seed);

/// A scenario bound to a graph with everything that is fixed across seeds
/// precomputed: model, profiles, partitions, the planned placement and packed streams.
class ServingSystem {
 public:
  ServingSystem(Graph g, Scenario scenario);

  const Graph& graph() const { return graph_; }
  const GnnModel& model() const { return model_; }
  const Scenario& scenario() const { return scenario_; }
  const std::vector<LatencyModel>& profiles() const { return profiles_; }
  const QuantPlan& quant_plan() const { return quant_plan_; }
  double phi_bytes() const { return static_cast<double>(graph_.feature_bytes()); }
  /// Average packed bytes per vertex over the whole graph.
  double packed_phi_bytes() const { return packed_phi_; }
  const std::vector<std::vector<VertexId>>& partitions() const { return partitions_; }
  const PlanResult& plan() const { return plan_; }

  ServingReport serve(Strategy strategy, std::uint64_t seed, const ServeOptions& options = {}) const;
  /// Serves with an explicit multi-fog placement.
  ServingReport serve_placement(const Placement& placement, bool codec, std::uint64_t seed,
                                const ServeOptions& options = {}, Strategy label = Strategy::fograph) const;

  std::vector<std::uint64_t> fog_payload_bytes(const Placement& placement, bool codec) const;
  /// Full-precision centralized predictions.
  const std::vector<std::int32_t>& reference_labels() const;
  /// Realized execution noise factors for a seed, one per fog plus one for the cloud.
  std::vector<double> noise_factors(std::uint64_t seed) const;
  std::vector<double> true_loads(const ServeOptions& options) const;

 private:
  Graph graph_;
  Scenario scenario_;
  GnnModel model_;
  std::vector<LatencyModel> profiles_;
  QuantPlan quant_plan_;
  std::unique_ptr<ByteCodec> codec_;
  Graph quantized_;
  double packed_phi_ = 0.0;
  std::vector<std::vector<VertexId>> partitions_;
  PlanResult plan_;
  std::vector<std::uint64_t> plan_packed_bytes_;
  mutable std::optional<std::vector<std::int32_t>> reference_labels_;
};

struct SweepPoint {
  std::uint32_t fogs = 0;
  double e2e_ms = 0.0;
};

/// Serves `strategy` on the first k nodes for every k in `fog_counts`.
std::vector<SweepPoint> sweep_fogs(const Graph& g, const Scenario& scenario, std::span<const std::uint32_t> fog_counts,
                                   Strategy strategy, std::uint64_t seed);

}  // namespace fogserve
