#include "fogserve/graph.hpp"

#include <algorithm>
#include <charconv>
#include <deque>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>
#include <string>

#include "binary_io.hpp"

namespace fogserve {

namespace detail {

std::vector<std::uint8_t> read_file_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open " + path);
  in.seekg(0, std::ios::end);
  const auto size = static_cast<std::size_t>(in.tellg());
  in.seekg(0);
  std::vector<std::uint8_t> bytes(size);
  in.read(reinterpret_cast<char*>(bytes.data()), static_cast<std::streamsize>(size));
  if (!in) throw ParseError("short read from " + path);
  return bytes;
}

void write_file_bytes(const std::string& path, const std::vector<std::uint8_t>& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw std::runtime_error("short write to " + path);
}

}  // namespace detail

Graph::Graph(std::uint32_t vertex_count, std::vector<Edge> edges, std::uint32_t feature_dim,
             std::vector<double> features, std::optional<std::vector<std::int32_t>> labels)
    : vertex_count_(vertex_count),
      feature_dim_(feature_dim),
      edges_(std::move(edges)),
      features_(std::move(features)),
      labels_(std::move(labels)) {
  if (features_.size() != std::size_t{vertex_count_} * feature_dim_)
    throw InvariantError("feature matrix has " + std::to_string(features_.size()) + " elements, expected " +
                         std::to_string(std::size_t{vertex_count_} * feature_dim_));
  if (labels_ && labels_->size() != vertex_count_)
    throw InvariantError("label count " + std::to_string(labels_->size()) + " != vertex count " +
                         std::to_string(vertex_count_));

  for (auto& [u, v] : edges_) {
    if (u >= vertex_count_ || v >= vertex_count_)
      throw InvariantError("edge (" + std::to_string(u) + ", " + std::to_string(v) + ") has endpoint outside [0, " +
                           std::to_string(vertex_count_) + ")");
    if (u == v) throw InvariantError("self-loop on vertex " + std::to_string(u));
    if (u > v) std::swap(u, v);
  }
  std::sort(edges_.begin(), edges_.end());
  if (auto dup = std::adjacent_find(edges_.begin(), edges_.end()); dup != edges_.end())
    throw InvariantError("duplicate edge (" + std::to_string(dup->first) + ", " + std::to_string(dup->second) + ")");

  std::vector<std::uint64_t> deg(vertex_count_ + 1, 0);
  for (const auto& [u, v] : edges_) {
    ++deg[u];
    ++deg[v];
  }
  offsets_.assign(vertex_count_ + 1, 0);
  for (std::uint32_t v = 0; v < vertex_count_; ++v) offsets_[v + 1] = offsets_[v] + deg[v];
  adjacency_.resize(offsets_.back());
  std::vector<std::uint64_t> cursor(offsets_.begin(), offsets_.end() - 1);
  // Lexicographic edge order fills every list in ascending order: all (u, x) with
  // u < x precede all (x, v).
  for (const auto& [u, v] : edges_) {
    adjacency_[cursor[u]++] = v;
    adjacency_[cursor[v]++] = u;
  }
}

std::uint32_t Graph::max_degree() const {
  std::uint32_t best = 0;
  for (std::uint32_t v = 0; v < vertex_count_; ++v) best = std::max(best, degree(v));
  return best;
}

Graph Graph::with_features(std::vector<double> features) const {
  if (features.size() != features_.size()) throw DimensionError("replacement feature matrix has the wrong size");
  Graph copy = *this;
  copy.features_ = std::move(features);
  return copy;
}

Graph Graph::with_labels(std::vector<std::int32_t> labels) && {
  if (labels.size() != vertex_count_) throw InvariantError("label count != vertex count");
  labels_ = std::move(labels);
  return std::move(*this);
}

bool operator==(const Graph& a, const Graph& b) {
  return a.vertex_count_ == b.vertex_count_ && a.feature_dim_ == b.feature_dim_ && a.edges_ == b.edges_ &&
         a.labels_ == b.labels_ &&
         std::equal(a.features_.begin(), a.features_.end(), b.features_.begin(), b.features_.end(),
                    [](double x, double y) { return std::bit_cast<std::uint64_t>(x) == std::bit_cast<std::uint64_t>(y); });
}

// --- degree statistics -----------------------------------------------------

DegreeCdf::DegreeCdf(std::span<const std::uint32_t> degrees) : vertex_count_(degrees.size()) {
  std::vector<std::uint32_t> sorted(degrees.begin(), degrees.end());
  std::sort(sorted.begin(), sorted.end());
  std::uint64_t running = 0;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    while (j < sorted.size() && sorted[j] == sorted[i]) ++j;
    running += j - i;
    support_.push_back(sorted[i]);
    cumulative_counts_.push_back(running);
    i = j;
  }
  max_degree_ = support_.empty() ? 0 : support_.back();
  cumulative_.reserve(support_.size());
  for (auto c : cumulative_counts_)
    cumulative_.push_back(c == vertex_count_ ? 1.0 : static_cast<double>(c) / static_cast<double>(vertex_count_));
}

std::uint64_t DegreeCdf::count_at_most(std::int64_t d) const {
  if (d < 0 || support_.empty()) return 0;
  auto it = std::upper_bound(support_.begin(), support_.end(), static_cast<std::uint64_t>(d),
                             [](std::uint64_t x, std::uint32_t s) { return x < s; });
  if (it == support_.begin()) return 0;
  return cumulative_counts_[static_cast<std::size_t>(it - support_.begin()) - 1];
}

double DegreeCdf::at(std::int64_t d) const {
  if (vertex_count_ == 0) return 0.0;
  const auto c = count_at_most(d);
  return c == vertex_count_ ? 1.0 : static_cast<double>(c) / static_cast<double>(vertex_count_);
}

double DegreeCdf::below(std::int64_t d) const { return at(d - 1); }

DegreeCdf degree_cdf(const Graph& g) {
  std::vector<std::uint32_t> degrees(g.vertex_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) degrees[v] = g.degree(v);
  return DegreeCdf(degrees);
}

// --- cardinality and sampling ----------------------------------------------

Cardinality measure_cardinality(const Graph& g, std::span<const VertexId> vertices) {
  // 0 = untouched, 1 = member, 2 = counted neighbor
  std::vector<std::uint8_t> mark(g.vertex_count(), 0);
  for (VertexId v : vertices) {
    if (v >= g.vertex_count()) throw ArgumentError("vertex " + std::to_string(v) + " out of range");
    if (mark[v]) throw ArgumentError("duplicate vertex " + std::to_string(v) + " in vertex set");
    mark[v] = 1;
  }
  std::uint64_t neighbors = 0;
  for (VertexId v : vertices)
    for (VertexId u : g.neighbors(v))
      if (mark[u] == 0) {
        mark[u] = 2;
        ++neighbors;
      }
  return {vertices.size(), neighbors};
}

SubgraphSample sample_subgraph(const Graph& g, const Cardinality& target, std::uint64_t seed, SampleMode mode) {
  const auto n = g.vertex_count();
  if (target.num_vertices > n)
    throw ArgumentError("sample target of " + std::to_string(target.num_vertices) + " vertices exceeds graph of " +
                        std::to_string(n));
  std::mt19937_64 rng(seed);
  SubgraphSample out;
  const auto want = static_cast<std::size_t>(target.num_vertices);

  if (mode == SampleMode::uniform || want == n) {
    std::vector<VertexId> all(n);
    std::iota(all.begin(), all.end(), VertexId{0});
    out.vertices.reserve(want);
    std::sample(all.begin(), all.end(), std::back_inserter(out.vertices), want, rng);
  } else {
    std::vector<std::uint8_t> taken(n, 0);
    std::uniform_int_distribution<VertexId> pick(0, n - 1);
    while (out.vertices.size() < want) {
      VertexId root = pick(rng);
      while (taken[root]) root = (root + 1) % n;
      std::deque<VertexId> frontier{root};
      taken[root] = 1;
      while (!frontier.empty() && out.vertices.size() < want) {
        const VertexId v = frontier.front();
        frontier.pop_front();
        out.vertices.push_back(v);
        for (VertexId u : g.neighbors(v))
          if (!taken[u]) {
            taken[u] = 1;
            frontier.push_back(u);
          }
      }
      // Vertices queued but not consumed are released for later balls.
      for (VertexId v : frontier) taken[v] = 0;
    }
  }
  std::sort(out.vertices.begin(), out.vertices.end());
  out.cardinality = measure_cardinality(g, out.vertices);
  return out;
}

std::uint64_t edge_cut(const Graph& g, std::span<const std::uint32_t> part_of) {
  if (part_of.size() != g.vertex_count()) throw DimensionError("partition vector size != vertex count");
  std::uint64_t cut = 0;
  for (const auto& [u, v] : g.edges())
    if (part_of[u] != part_of[v]) ++cut;
  return cut;
}

// --- file I/O --------------------------------------------------------------

namespace {

constexpr std::string_view kFeatureMagic = "FGRF";

template <typename T>
T parse_number(std::string_view token, const std::string& where) {
  T value{};
  auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
  if (ec != std::errc{} || ptr != token.data() + token.size())
    throw ParseError(where + ": invalid number \"" + std::string(token) + "\"");
  return value;
}

std::vector<std::string_view> split_ws(std::string_view line) {
  std::vector<std::string_view> tokens;
  std::size_t i = 0;
  while (i < line.size()) {
    while (i < line.size() && (line[i] == ' ' || line[i] == '\t' || line[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < line.size() && line[j] != ' ' && line[j] != '\t' && line[j] != '\r') ++j;
    if (j > i) tokens.push_back(line.substr(i, j - i));
    i = j;
  }
  return tokens;
}

}  // namespace

Graph load_graph(const std::filesystem::path& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw ParseError("graph directory not found: " + dir.string());

  const auto bytes = detail::read_file_bytes((dir / "features.bin").string());
  detail::ByteReader reader(bytes.data(), bytes.size(), "features.bin");
  reader.expect_magic(kFeatureMagic);
  const std::uint32_t n = reader.u32();
  const std::uint32_t dim = reader.u32();
  const std::size_t count = std::size_t{n} * dim;
  if (reader.remaining() != count * 8)
    throw ParseError("features.bin: payload holds " + std::to_string(reader.remaining()) + " bytes, expected " +
                     std::to_string(count * 8));
  std::vector<double> features(count);
  for (auto& x : features) x = reader.f64();

  std::ifstream edge_in(dir / "edges.txt");
  if (!edge_in) throw ParseError("missing edges.txt in " + dir.string());
  std::vector<Graph::Edge> edges;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(edge_in, line)) {
    ++line_no;
    const auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    const std::string where = "edges.txt:" + std::to_string(line_no);
    if (tokens.size() != 2) throw ParseError(where + ": expected \"u v\"");
    const auto u = parse_number<std::uint64_t>(tokens[0], where);
    const auto v = parse_number<std::uint64_t>(tokens[1], where);
    if (u >= n || v >= n)
      throw InvariantError(where + ": endpoint out of range for " + std::to_string(n) + " vertices");
    edges.emplace_back(static_cast<VertexId>(u), static_cast<VertexId>(v));
  }

  std::optional<std::vector<std::int32_t>> labels;
  if (fs::exists(dir / "labels.txt")) {
    std::ifstream label_in(dir / "labels.txt");
    labels.emplace();
    line_no = 0;
    while (std::getline(label_in, line)) {
      ++line_no;
      const auto tokens = split_ws(line);
      if (tokens.empty()) continue;
      const std::string where = "labels.txt:" + std::to_string(line_no);
      if (tokens.size() != 1) throw ParseError(where + ": expected one integer");
      labels->push_back(parse_number<std::int32_t>(tokens[0], where));
    }
  }
  return Graph(n, std::move(edges), dim, std::move(features), std::move(labels));
}

void save_graph(const Graph& g, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  {
    std::ofstream out(dir / "edges.txt", std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write edges.txt in " + dir.string());
    std::string buffer;
    buffer.reserve(g.edge_count() * 14);
    char tmp[32];
    for (const auto& [u, v] : g.edges()) {
      buffer.append(tmp, std::to_chars(tmp, tmp + sizeof tmp, u).ptr);
      buffer += ' ';
      buffer.append(tmp, std::to_chars(tmp, tmp + sizeof tmp, v).ptr);
      buffer += '\n';
    }
    out << buffer;
  }
  std::vector<std::uint8_t> bytes;
  bytes.reserve(12 + g.features().size() * 8);
  detail::put_magic(bytes, kFeatureMagic);
  detail::put_u32(bytes, g.vertex_count());
  detail::put_u32(bytes, g.feature_dim());
  for (double x : g.features()) detail::put_f64(bytes, x);
  detail::write_file_bytes((dir / "features.bin").string(), bytes);

  const auto label_path = dir / "labels.txt";
  if (g.labels()) {
    std::ofstream out(label_path, std::ios::trunc);
    for (auto l : *g.labels()) out << l << '\n';
  } else if (std::filesystem::exists(label_path)) {
    std::filesystem::remove(label_path);
  }
}

}  // namespace fogserve
