// fogserve command-line front end.
#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <vector>

#include "fogserve/codec.hpp"
#include "fogserve/graph.hpp"
#include "fogserve/planner.hpp"
#include "fogserve/profiler.hpp"
#include "fogserve/quant.hpp"
#include "fogserve/rmat.hpp"
#include "fogserve/scenario_io.hpp"
#include "fogserve/scheduler.hpp"
#include "fogserve/simulator.hpp"
#include "fogserve/verify/acceptance.hpp"
#include "svg.hpp"

namespace fs = std::filesystem;
using namespace fogserve;

namespace {

void setup_logging() {
  spdlog::set_pattern("[%l] %v");
  spdlog::set_level(spdlog::level::warn);
  if (const char* env = std::getenv("FOGSERVE_LOG")) {
    const auto level = spdlog::level::from_str(env);
    // from_str maps unknown names to off; only accept real names.
    if (level != spdlog::level::off || std::string(env) == "off") spdlog::set_level(level);
    else spdlog::warn("FOGSERVE_LOG={} not recognized, keeping warn", env);
  }
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(cur);
  return out;
}

std::uint64_t to_u64(const std::string& s) {
  std::size_t pos = 0;
  const auto v = std::stoull(s, &pos);
  if (pos != s.size()) throw ArgumentError("not an integer: " + s);
  return v;
}

// "1-10", "3", "1,4,9" or a mix such as "1-3,7".
std::vector<std::uint64_t> parse_seeds(const std::string& text) {
  std::vector<std::uint64_t> out;
  for (const auto& part : split(text, ',')) {
    const auto dash = part.find('-');
    if (dash == std::string::npos) {
      out.push_back(to_u64(part));
      continue;
    }
    const auto lo = to_u64(part.substr(0, dash)), hi = to_u64(part.substr(dash + 1));
    if (hi < lo) throw ArgumentError("empty seed range: " + part);
    for (auto s = lo; s <= hi; ++s) out.push_back(s);
  }
  if (out.empty()) throw ArgumentError("seed list is empty");
  return out;
}

std::array<std::uint8_t, 4> parse_bits(const std::string& text) {
  const auto parts = split(text, ',');
  if (parts.size() != 4) throw ArgumentError("--quant-bits needs four widths q0,q1,q2,q3");
  std::array<std::uint8_t, 4> bits{};
  for (int i = 0; i < 4; ++i) bits[i] = static_cast<std::uint8_t>(to_u64(parts[i]));
  QuantPlan{{0, 0, 0}, bits}.validate();
  return bits;
}

bool parse_switch(const std::string& v) {
  if (v == "on") return true;
  if (v == "off") return false;
  throw ArgumentError("expected on|off, got " + v);
}

Graph obtain_graph(const std::string& dir, const std::string& preset, std::uint64_t seed) {
  if (!dir.empty()) {
    spdlog::info("loading graph from {}", dir);
    return load_graph(dir);
  }
  if (preset.empty()) throw ArgumentError("either --graph or --preset is required");
  spdlog::info("generating {} with seed {}", preset, seed);
  return generate_rmat(rmat_preset(preset, seed));
}

Scenario obtain_scenario(const std::string& path) {
  if (path.empty() || path == "standard") return standard_scenario();
  return load_scenario(path);
}

std::vector<NodeProfile> to_records(const std::vector<LatencyModel>& models) {
  std::vector<NodeProfile> out;
  for (std::size_t j = 0; j < models.size(); ++j) out.push_back({static_cast<FogId>(j), models[j], {}});
  return out;
}

std::vector<LatencyModel> from_records(const std::vector<NodeProfile>& records, std::uint32_t fogs) {
  std::vector<LatencyModel> out(fogs);
  std::vector<bool> seen(fogs, false);
  for (const auto& r : records) {
    if (r.node >= fogs) throw ArgumentError("profile for unknown node " + std::to_string(r.node));
    out[r.node] = r.model.scaled(r.load.eta);
    seen[r.node] = true;
  }
  for (std::uint32_t j = 0; j < fogs; ++j)
    if (!seen[j]) throw ArgumentError("no profile for node " + std::to_string(j));
  return out;
}

void ensure_dir(const fs::path& dir) {
  if (!dir.empty()) fs::create_directories(dir);
}

// ---- gen-rmat --------------------------------------------------------------

struct GenArgs {
  std::uint32_t vertices = 0;
  double density = 0.0;
  std::uint32_t feature_dim = 32;
  std::uint32_t classes = 8;
  std::uint64_t seed = 1;
  double a = 0.57, b = 0.19, c = 0.19, d = 0.05;
  double zero_fraction = 0.0;
  std::string preset;
  std::string out;
};

int cmd_gen(const GenArgs& args) {
  RmatParams p;
  if (!args.preset.empty()) {
    p = rmat_preset(args.preset, args.seed);
  } else {
    if (args.vertices == 0 || args.density <= 0) throw ArgumentError("--vertices and --density are required");
    p.num_vertices = args.vertices;
    p.density = args.density;
    p.feature_dim = args.feature_dim;
    p.num_classes = args.classes;
    p.seed = args.seed;
    p.a = args.a;
    p.b = args.b;
    p.c = args.c;
    p.d = args.d;
    p.zero_fraction = args.zero_fraction;
  }
  const auto g = generate_rmat(p);
  save_graph(g, args.out);
  std::printf("wrote %s: %u vertices, %llu edges, max degree %u\n", args.out.c_str(), g.vertex_count(),
              static_cast<unsigned long long>(g.edge_count()), g.max_degree());
  return 0;
}

// ---- profile ---------------------------------------------------------------

struct ProfileArgs {
  std::string graph, preset, scenario, out;
  std::uint64_t seed = 1;
  std::optional<double> noise;
  std::optional<std::uint32_t> samples;
};

int cmd_profile(const ProfileArgs& args) {
  const auto g = obtain_graph(args.graph, args.preset, args.seed);
  const auto s = obtain_scenario(args.scenario);
  const auto models = profile_cluster(g, s.cluster, args.noise.value_or(s.profile_noise),
                                      args.samples.value_or(s.profile_samples), args.seed);
  const auto records = to_records(models);
  if (args.out.empty()) std::fputs(format_profiles(records).c_str(), stdout);
  else save_profiles(records, args.out);
  for (std::size_t j = 0; j < models.size(); ++j)
    spdlog::info("node {}: {:.5f} ms/vertex, {:.5f} ms/neighbor, {:.3f} ms, residual {:.3f}", j, models[j].per_vertex,
                 models[j].per_neighbor, models[j].intercept, models[j].residual_std_error);
  return 0;
}

// ---- plan ------------------------------------------------------------------

struct PlanArgs {
  std::string graph, preset, cluster, profiles, out, placement;
  std::string strategy = "lbap";
  std::string codec = "off";
  std::string quant_bits;
  std::uint64_t seed = 1;
};

int cmd_plan(const PlanArgs& args) {
  const auto g = obtain_graph(args.graph, args.preset, args.seed);
  auto s = obtain_scenario(args.cluster);
  if (!args.quant_bits.empty()) s.quant_bits = parse_bits(args.quant_bits);
  std::vector<LatencyModel> models;
  if (!args.profiles.empty()) models = from_records(load_profiles(args.profiles), s.cluster.size());
  else models = profile_cluster(g, s.cluster, s.profile_noise, s.profile_samples, args.seed);

  double phi = static_cast<double>(g.feature_bytes());
  if (parse_switch(args.codec)) {
    const auto codec = make_codec(s.codec_name);
    const auto packed = pack_graph(g, make_quant_plan(degree_cdf(g), s.quant_bits), *codec);
    phi = static_cast<double>(packed.serialized_bytes) / std::max<std::uint32_t>(1, g.vertex_count());
  }
  const auto strategy = parse_assign_strategy(args.strategy);
  auto result = plan(g, s.cluster, models, phi, {s.imbalance, args.seed});
  if (strategy != AssignStrategy::lbap)
    result = place_partitions(g, result.partitions, s.cluster, models, phi, strategy, args.seed);

  const auto report = plan_report_json(result, s.cluster);
  if (args.out.empty()) std::fputs(report.c_str(), stdout);
  else write_text_file(args.out, report);
  if (!args.placement.empty()) save_placement(result.placement, args.placement);
  spdlog::info("predicted makespan {:.3f} ms after {} feasibility tests", result.predicted_makespan_ms,
               result.feasibility_tests);
  return 0;
}

// ---- pack ------------------------------------------------------------------

struct PackArgs {
  std::string graph, preset, out;
  std::string quant_bits = "64,32,16,8";
  std::string codec = "deflate";
  std::uint64_t seed = 1;
};

int cmd_pack(const PackArgs& args) {
  const auto g = obtain_graph(args.graph, args.preset, args.seed);
  const auto cdf = degree_cdf(g);
  const auto plan = make_quant_plan(cdf, parse_bits(args.quant_bits));
  const auto codec = make_codec(args.codec);
  const auto packed = pack_graph(g, plan, *codec);
  if (!args.out.empty()) {
    ensure_dir(fs::path(args.out).parent_path());
    std::FILE* f = std::fopen(args.out.c_str(), "wb");
    if (!f) throw ParseError("cannot write " + args.out);
    std::fwrite(packed.stream.data(), 1, packed.stream.size(), f);
    std::fclose(f);
  }
  const auto report = compression_report(plan, cdf);
  const double raw = static_cast<double>(g.feature_bytes()) * g.vertex_count();
  std::printf("thresholds %u %u %u, widths %u %u %u %u\n", plan.thresholds[0], plan.thresholds[1], plan.thresholds[2],
              plan.bits[0], plan.bits[1], plan.bits[2], plan.bits[3]);
  std::printf("bit ratio %.6f (counted %.6f)\n", report.closed_form, report.counted);
  std::printf("raw %.0f bytes, stream %zu bytes (%.4f of raw)\n", raw, packed.serialized_bytes,
              raw > 0 ? static_cast<double>(packed.serialized_bytes) / raw : 0.0);
  return 0;
}

// ---- run -------------------------------------------------------------------

struct RunArgs {
  std::string graph, preset, scenario, out = "results";
  std::string strategies = "cloud,single_fog,multifog_baseline,fograph";
  std::string seeds = "1";
  std::string codec, quant_bits, fog_counts;
  std::uint64_t seed = 1;
  bool plot = false;
  bool skip_accuracy = false;
  bool save_model = false;
};

int cmd_run(const RunArgs& args) {
  auto s = obtain_scenario(args.scenario);
  if (!args.codec.empty()) s.codec = parse_switch(args.codec);
  if (!args.quant_bits.empty()) s.quant_bits = parse_bits(args.quant_bits);
  std::vector<Strategy> strategies;
  for (const auto& name : split(args.strategies, ',')) strategies.push_back(parse_strategy(name));
  const auto seeds = parse_seeds(args.seeds);
  const auto g = obtain_graph(args.graph, args.preset, args.seed);
  ensure_dir(args.out);
  const fs::path out(args.out);

  spdlog::info("preparing {} on {} vertices", s.name, g.vertex_count());
  const ServingSystem system(g, s);
  if (args.save_model) fogserve::save_model(system.model(), out / "model.fgwt");
  ServeOptions options;
  options.compute_embeddings = !args.skip_accuracy;

  std::vector<ServingReport> reports;
  int status = 0;
  try {
    for (auto strategy : strategies)
      for (auto seed : seeds) {
        reports.push_back(system.serve(strategy, seed, options));
        spdlog::info("{} seed {}: {:.3f} ms", to_string(strategy), seed, reports.back().e2e_ms);
      }
  } catch (const std::exception& e) {
    spdlog::error("run aborted: {}", e.what());
    status = 1;
  }
  write_text_file(out / "results.csv", results_csv(reports));

  if (args.plot && !reports.empty()) {
    std::vector<std::string> names;
    std::vector<double> means;
    for (auto strategy : strategies) {
      double sum = 0;
      std::size_t n = 0;
      for (const auto& r : reports)
        if (r.strategy == strategy) sum += r.e2e_ms, ++n;
      if (n == 0) continue;
      names.push_back(to_string(strategy));
      means.push_back(sum / n);
    }
    write_text_file(out / "latency.svg", tools::bar_chart("Mean end-to-end latency", "ms", names, means));
  }

  if (!args.fog_counts.empty() && status == 0) {
    std::vector<std::uint32_t> counts;
    for (const auto& c : split(args.fog_counts, ',')) counts.push_back(static_cast<std::uint32_t>(to_u64(c)));
    std::string csv = "fogs,e2e_ms\n";
    tools::Series series{"fograph", {}, {}};
    for (const auto& p : sweep_fogs(g, s, counts, Strategy::fograph, seeds.front())) {
      char line[64];
      std::snprintf(line, sizeof line, "%u,%.6f\n", p.fogs, p.e2e_ms);
      csv += line;
      series.x.push_back(p.fogs);
      series.y.push_back(p.e2e_ms);
    }
    write_text_file(out / "scalability.csv", csv);
    if (args.plot)
      write_text_file(out / "scalability.svg",
                      tools::line_chart("Latency vs fog count", "fog nodes", "ms", {series}));
  }
  std::printf("wrote %zu rows to %s\n", reports.size(), (out / "results.csv").c_str());
  return status;
}

// ---- trace -----------------------------------------------------------------

struct TraceArgs {
  std::string graph, preset, scenario, trace, out = "trace";
  std::string codec;
  double lambda = 1.25, theta = 0.5;
  std::uint32_t spike_fog = 1;
  double spike_peak = 2.0;
  std::uint32_t rounds = 270;
  std::uint64_t seed = 1;
  bool plot = false;
};

int cmd_trace(const TraceArgs& args) {
  auto s = obtain_scenario(args.scenario);
  if (!args.codec.empty()) s.codec = parse_switch(args.codec);
  const auto g = obtain_graph(args.graph, args.preset, args.seed);
  const auto fogs = s.cluster.size();
  LoadTrace trace = args.trace.empty() ? [&] {
    // lead 10, ramp 20, hold, ramp 20, tail 20
    const std::uint32_t hold = args.rounds > 70 ? args.rounds - 70 : 1;
    return spike_trace(fogs, args.spike_fog, args.spike_peak, 10, 20, hold, 20);
  }()
                                       : load_load_trace(args.trace, fogs);
  const ServingSystem system(g, s);
  const auto result = replay_trace(system, trace, args.lambda, args.theta, args.seed);
  ensure_dir(args.out);
  const fs::path out(args.out);
  write_text_file(out / "scheduler_log.csv", scheduler_log_csv(result));
  write_text_file(out / "trajectory.csv", trajectory_csv(result));
  if (args.plot) {
    tools::Series sched{"scheduled", {}, {}}, fixed{"unscheduled", {}, {}};
    for (const auto& r : result.rounds) {
      sched.x.push_back(r.round);
      sched.y.push_back(r.scheduled_ms);
      fixed.x.push_back(r.round);
      fixed.y.push_back(r.unscheduled_ms);
    }
    write_text_file(out / "trajectory.svg",
                    tools::line_chart("Latency under a load trace", "round", "ms", {sched, fixed}));
  }
  std::size_t diffuse = 0, replan = 0;
  for (const auto& r : result.rounds) {
    diffuse += r.mode == ScheduleMode::diffuse;
    replan += r.mode == ScheduleMode::replan;
  }
  std::printf("%zu rounds, peak %.3f ms scheduled vs %.3f ms unscheduled, %zu diffuse, %zu replan\n",
              result.rounds.size(), result.scheduled_peak_ms(), result.unscheduled_peak_ms(), diffuse, replan);
  return 0;
}

// ---- verify ----------------------------------------------------------------

struct VerifyArgs {
  bool quick = false;
  bool acceptance = false;
  std::string weights;
  std::uint64_t seed = 1;
};

int cmd_verify(const VerifyArgs& args) {
  verify::SuiteOptions options;
  options.quick = args.quick;
  options.seed = args.seed;
  std::optional<fs::path> weights;
  if (!args.weights.empty()) weights = args.weights;
  auto results = args.acceptance ? verify::run_acceptance(options) : verify::run_oracle_suite(options, weights);
  if (args.acceptance && weights) {
    auto extra = verify::run_oracle_suite(options, weights);
    results.insert(results.begin(), extra.front());
  }
  std::size_t failed = 0;
  for (const auto& r : results) {
    std::printf("%s\n", verify::format_result(r).c_str());
    failed += !r.passed;
  }
  std::printf("%zu/%zu checks passed\n", results.size() - failed, results.size());
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  setup_logging();
  CLI::App app{"Heterogeneity-aware GNN serving across simulated fog nodes"};
  app.require_subcommand(1);

  GenArgs gen;
  auto* g = app.add_subcommand("gen-rmat", "Generate a synthetic RMAT graph directory");
  g->add_option("--vertices", gen.vertices, "Vertex count");
  g->add_option("--density", gen.density, "Edge density over n(n-1)/2");
  g->add_option("--feature-dim", gen.feature_dim, "Feature dimension");
  g->add_option("--classes", gen.classes, "Label classes");
  g->add_option("--seed", gen.seed, "Random seed");
  g->add_option("--a", gen.a, "RMAT quadrant probability a");
  g->add_option("--b", gen.b, "RMAT quadrant probability b");
  g->add_option("--c", gen.c, "RMAT quadrant probability c");
  g->add_option("--d", gen.d, "RMAT quadrant probability d");
  g->add_option("--zero-fraction", gen.zero_fraction, "Probability that a feature element is zero");
  g->add_option("--preset", gen.preset, "Named preset such as RMAT-20K (overrides size flags)");
  g->add_option("--out", gen.out, "Output directory")->required();

  ProfileArgs prof;
  auto* p = app.add_subcommand("profile", "Fit per-node latency models from calibration runs");
  p->add_option("--graph", prof.graph, "Graph directory");
  p->add_option("--preset", prof.preset, "Generate a preset graph instead of loading one");
  p->add_option("--scenario", prof.scenario, "Scenario file (default: built-in standard cluster)");
  p->add_option("--seed", prof.seed, "Random seed");
  p->add_option("--noise", prof.noise, "Relative measurement noise");
  p->add_option("--samples", prof.samples, "Samples per calibration axis");
  p->add_option("--out", prof.out, "Profile document path (stdout if omitted)");

  PlanArgs plan_args;
  auto* pl = app.add_subcommand("plan", "Partition the graph and map partitions to fog nodes");
  pl->add_option("--graph", plan_args.graph, "Graph directory");
  pl->add_option("--preset", plan_args.preset, "Generate a preset graph instead of loading one");
  pl->add_option("--cluster,--scenario", plan_args.cluster, "Scenario file describing the cluster");
  pl->add_option("--profiles", plan_args.profiles, "Profile document (profiled on the fly if omitted)");
  pl->add_option("--strategy", plan_args.strategy, "lbap | greedy | random");
  pl->add_option("--codec", plan_args.codec, "Cost uploads at packed size: on | off");
  pl->add_option("--quant-bits", plan_args.quant_bits, "Bit widths q0,q1,q2,q3");
  pl->add_option("--seed", plan_args.seed, "Random seed");
  pl->add_option("--out", plan_args.out, "Plan report path (stdout if omitted)");
  pl->add_option("--placement", plan_args.placement, "Also write 'vertex fog' records here");

  PackArgs pack;
  auto* pk = app.add_subcommand("pack", "Quantize and compress the feature matrix");
  pk->add_option("--graph", pack.graph, "Graph directory");
  pk->add_option("--preset", pack.preset, "Generate a preset graph instead of loading one");
  pk->add_option("--quant-bits", pack.quant_bits, "Bit widths q0,q1,q2,q3");
  pk->add_option("--codec", pack.codec, "deflate | identity");
  pk->add_option("--seed", pack.seed, "Random seed");
  pk->add_option("--out", pack.out, "Stream output path");

  RunArgs run;
  auto* r = app.add_subcommand("run", "Serve with each strategy and seed, write results.csv");
  r->add_option("--graph", run.graph, "Graph directory");
  r->add_option("--preset", run.preset, "Generate a preset graph instead of loading one");
  r->add_option("--scenario", run.scenario, "Scenario file (default: built-in standard cluster)");
  r->add_option("--strategies", run.strategies, "Comma-separated strategies");
  r->add_option("--seeds", run.seeds, "Seeds, e.g. 1-10 or 1,2,5");
  r->add_option("--seed", run.seed, "Graph generation seed for --preset");
  r->add_option("--out", run.out, "Output directory");
  r->add_option("--codec", run.codec, "Override the scenario codec flag: on | off");
  r->add_option("--quant-bits", run.quant_bits, "Bit widths q0,q1,q2,q3");
  r->add_option("--fog-counts", run.fog_counts, "Also sweep these fog counts, e.g. 1,2,3,4,5,6");
  r->add_flag("--plot", run.plot, "Write SVG plots next to the CSV files");
  r->add_flag("--skip-accuracy", run.skip_accuracy, "Do not compute embeddings (flip_rate becomes nan)");
  r->add_flag("--save-model", run.save_model, "Write the served model to model.fgwt");

  TraceArgs tr;
  auto* t = app.add_subcommand("trace", "Replay a load trace with and without the scheduler");
  t->add_option("--graph", tr.graph, "Graph directory");
  t->add_option("--preset", tr.preset, "Generate a preset graph instead of loading one");
  t->add_option("--scenario", tr.scenario, "Scenario file (default: built-in standard cluster)");
  t->add_option("--trace", tr.trace, "CSV round,fog_id,load_multiplier (default: a spike on one fog)");
  t->add_option("--spike-fog", tr.spike_fog, "Fog that spikes in the default trace");
  t->add_option("--spike-peak", tr.spike_peak, "Peak load multiplier of the default trace");
  t->add_option("--rounds", tr.rounds, "Length of the default trace");
  t->add_option("--lambda", tr.lambda, "Overload threshold on mu");
  t->add_option("--theta", tr.theta, "Share of overloaded fogs up to which diffusion is used");
  t->add_option("--codec", tr.codec, "Override the scenario codec flag: on | off");
  t->add_option("--seed", tr.seed, "Random seed");
  t->add_option("--out", tr.out, "Output directory");
  t->add_flag("--plot", tr.plot, "Write trajectory.svg");

  VerifyArgs ver;
  auto* v = app.add_subcommand("verify", "Run the embedded oracle checks");
  v->add_flag("--quick", ver.quick, "Smaller instances");
  v->add_flag("--acceptance", ver.acceptance, "Run the acceptance criteria instead of the oracle table");
  v->add_option("--weights", ver.weights, "Also verify a saved model file");
  v->add_option("--seed", ver.seed, "Random seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (g->parsed()) return cmd_gen(gen);
    if (p->parsed()) return cmd_profile(prof);
    if (pl->parsed()) return cmd_plan(plan_args);
    if (pk->parsed()) return cmd_pack(pack);
    if (r->parsed()) return cmd_run(run);
    if (t->parsed()) return cmd_trace(tr);
    if (v->parsed()) return cmd_verify(ver);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
