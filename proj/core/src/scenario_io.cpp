#include "fogserve/scenario_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace fogserve {

using nlohmann::json;

namespace {

std::string num(double x) {
  if (std::isnan(x)) return "nan";
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  return buf;
}

json cost_to_json(const LatencyModel& m) {
  return {{"beta_vertices", m.per_vertex}, {"beta_neighbors", m.per_neighbor}, {"epsilon", m.intercept}};
}

LatencyModel cost_from_json(const json& j) {
  LatencyModel m;
  m.per_vertex = j.value("beta_vertices", 0.0);
  m.per_neighbor = j.value("beta_neighbors", 0.0);
  m.intercept = j.value("epsilon", 0.0);
  m.residual_std_error = j.value("residual_std_error", 0.0);
  return m;
}

template <typename T>
void read(const json& j, const char* key, T& into) {
  if (j.contains(key)) into = j.at(key).get<T>();
}

}  // namespace

Scenario parse_scenario(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }
  try {
    Scenario s;
    read(j, "name", s.name);
    read(j, "sync_cost_ms", s.cluster.sync_cost_ms);
    read(j, "layers", s.cluster.layers);
    if (j.contains("nodes")) {
      FogId next = 0;
      for (const auto& jn : j.at("nodes")) {
        FogNode node;
        node.id = jn.value("id", next);
        if (node.id != next) throw ParseError("scenario: node ids must be 0, 1, 2, ... in order");
        ++next;
        node.type = jn.value("type", std::string{});
        node.bandwidth_bytes_per_s = jn.value("bandwidth_bytes_per_s", 0.0);
        node.access_latency_ms = jn.value("access_latency_ms", 0.0);
        if (jn.contains("cost")) node.cost = cost_from_json(jn.at("cost"));
        else if (!node.type.empty()) node.cost = fog_type_cost(node.type);
        s.cluster.nodes.push_back(node);
      }
    }
    if (j.contains("wan")) {
      read(j.at("wan"), "bandwidth_bytes_per_s", s.wan.bandwidth_bytes_per_s);
      read(j.at("wan"), "latency_ms", s.wan.latency_ms);
    }
    if (j.contains("cloud_cost")) s.cloud_cost = cost_from_json(j.at("cloud_cost"));
    if (j.contains("model")) {
      const auto& m = j.at("model");
      if (m.contains("kind")) s.model.kind = parse_model_kind(m.at("kind").get<std::string>());
      read(m, "hidden", s.model.hidden);
      read(m, "classes", s.model.classes);
      read(m, "seed", s.model.seed);
    }
    read(j, "codec", s.codec);
    read(j, "codec_name", s.codec_name);
    if (j.contains("quant_bits")) {
      const auto bits = j.at("quant_bits").get<std::vector<int>>();
      if (bits.size() != 4) throw ParseError("scenario: quant_bits needs four widths");
      for (int i = 0; i < 4; ++i) s.quant_bits[i] = static_cast<std::uint8_t>(bits[i]);
    }
    read(j, "exec_noise", s.exec_noise);
    read(j, "access_jitter_ms", s.access_jitter_ms);
    read(j, "profile_noise", s.profile_noise);
    read(j, "profile_samples", s.profile_samples);
    read(j, "loads", s.loads);
    if (j.contains("profiles")) {
      std::vector<LatencyModel> p;
      for (const auto& jp : j.at("profiles")) p.push_back(cost_from_json(jp));
      s.profiles = std::move(p);
    }
    read(j, "imbalance", s.imbalance);
    read(j, "seed", s.seed);
    s.validate();
    return s;
  } catch (const json::exception& e) {
    throw ParseError(std::string("scenario: ") + e.what());
  }
}

std::string format_scenario(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["sync_cost_ms"] = s.cluster.sync_cost_ms;
  j["layers"] = s.cluster.layers;
  j["nodes"] = json::array();
  for (const auto& n : s.cluster.nodes)
    j["nodes"].push_back({{"id", n.id},
                          {"type", n.type},
                          {"bandwidth_bytes_per_s", n.bandwidth_bytes_per_s},
                          {"access_latency_ms", n.access_latency_ms},
                          {"cost", cost_to_json(n.cost)}});
  j["wan"] = {{"bandwidth_bytes_per_s", s.wan.bandwidth_bytes_per_s}, {"latency_ms", s.wan.latency_ms}};
  j["cloud_cost"] = cost_to_json(s.cloud_cost);
  j["model"] = {{"kind", to_string(s.model.kind)}, {"hidden", s.model.hidden}, {"classes", s.model.classes},
                {"seed", s.model.seed}};
  j["codec"] = s.codec;
  j["codec_name"] = s.codec_name;
  j["quant_bits"] = std::vector<int>(s.quant_bits.begin(), s.quant_bits.end());
  j["exec_noise"] = s.exec_noise;
  j["access_jitter_ms"] = s.access_jitter_ms;
  j["profile_noise"] = s.profile_noise;
  j["profile_samples"] = s.profile_samples;
  if (!s.loads.empty()) j["loads"] = s.loads;
  if (s.profiles) {
    j["profiles"] = json::array();
    for (const auto& p : *s.profiles) j["profiles"].push_back(cost_to_json(p));
  }
  j["imbalance"] = s.imbalance;
  j["seed"] = s.seed;
  return j.dump(2) + "\n";
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot write " + path.string());
  out << text;
  if (!out) throw ParseError("write failed: " + path.string());
}

Scenario load_scenario(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) throw ParseError("scenario not found: " + path.string());
  return parse_scenario(read_text_file(path));
}

void save_scenario(const Scenario& scenario, const std::filesystem::path& path) {
  write_text_file(path, format_scenario(scenario));
}

std::string plan_report_json(const PlanResult& plan, const FogCluster& cluster) {
  json j;
  j["strategy"] = to_string(plan.strategy);
  j["predicted_makespan_ms"] = plan.predicted_makespan_ms;
  j["feasibility_tests"] = plan.feasibility_tests;
  j["sync_cost_ms"] = cluster.sync_cost_ms;
  j["layers"] = cluster.layers;
  j["fogs"] = json::array();
  for (const auto& p : plan.per_fog)
    j["fogs"].push_back({{"fog", p.fog},
                         {"partition", p.partition},
                         {"vertices", p.cardinality.num_vertices},
                         {"neighbors", p.cardinality.num_neighbors},
                         {"t_colle_ms", p.collection_ms},
                         {"t_exec_ms", p.execution_ms},
                         {"total_ms", p.total_ms()}});
  return j.dump(2) + "\n";
}

std::string results_csv(std::vector<ServingReport> reports) {
  std::stable_sort(reports.begin(), reports.end(), [](const ServingReport& a, const ServingReport& b) {
    const auto sa = to_string(a.strategy), sb = to_string(b.strategy);
    return sa != sb ? sa < sb : a.seed < b.seed;
  });
  auto join = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ";" : "") + num(v[i]);
    return s;
  };
  std::string out = "strategy,seed,t_colle_ms,t_exec_ms,e2e_ms,throughput_per_s,flip_rate\n";
  for (const auto& r : reports)
    out += to_string(r.strategy) + "," + std::to_string(r.seed) + "," + join(r.collection_ms) + "," +
           join(r.execution_ms) + "," + num(r.e2e_ms) + "," + num(r.throughput_per_s) + "," + num(r.flip_rate) + "\n";
  return out;
}

LoadTrace parse_load_trace(std::string_view csv, std::uint32_t fogs) {
  struct Entry {
    std::uint32_t round;
    FogId fog;
    double value;
  };
  std::vector<Entry> entries;
  std::uint32_t rounds = 0;
  std::istringstream in{std::string(csv)};
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    if (line.rfind("round", 0) == 0) continue;  // header
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream fields(line);
    long long r = -1, f = -1;
    double m = 0.0;
    if (!(fields >> r >> f >> m) || r < 0 || f < 0)
      throw ParseError("load trace line " + std::to_string(line_no) + ": expected \"round, fog_id, load_multiplier\"");
    if (static_cast<std::uint64_t>(f) >= fogs)
      throw ParseError("load trace line " + std::to_string(line_no) + ": fog id out of range");
    entries.push_back({static_cast<std::uint32_t>(r), static_cast<FogId>(f), m});
    rounds = std::max(rounds, static_cast<std::uint32_t>(r) + 1);
  }
  LoadTrace trace(rounds, fogs);
  for (const auto& e : entries) {
    if (!(e.value > 0.0)) throw ParseError("load trace: multipliers must be positive");
    trace.set(e.round, e.fog, e.value);
  }
  return trace;
}

LoadTrace load_load_trace(const std::filesystem::path& path, std::uint32_t fogs) {
  return parse_load_trace(read_text_file(path), fogs);
}

std::string format_load_trace(const LoadTrace& trace) {
  std::string out = "round,fog_id,load_multiplier\n";
  for (std::uint32_t r = 0; r < trace.rounds(); ++r)
    for (FogId j = 0; j < trace.fogs(); ++j)
      out += std::to_string(r) + "," + std::to_string(j) + "," + num(trace.at(r, j)) + "\n";
  return out;
}

std::string scheduler_log_csv(const TraceResult& result) {
  std::string out = "round,mode,migrations,predicted_max_mu\n";
  for (const auto& r : result.rounds)
    out += std::to_string(r.round) + "," + to_string(r.mode) + "," + std::to_string(r.migrations) + "," +
           num(r.predicted_max_mu) + "\n";
  return out;
}

std::string trajectory_csv(const TraceResult& result) {
  std::string out = "round,scheduled_ms,unscheduled_ms\n";
  for (const auto& r : result.rounds)
    out += std::to_string(r.round) + "," + num(r.scheduled_ms) + "," + num(r.unscheduled_ms) + "\n";
  return out;
}

}  // namespace fogserve
