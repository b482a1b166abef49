#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "fogserve/graph.hpp"

namespace fogserve {

enum class ModelKind : std::uint8_t { gcn = 0, gat = 1, sage = 2 };
enum class Activation : std::uint8_t { relu = 0, identity = 1 };

const char* to_string(ModelKind kind);
ModelKind parse_model_kind(std::string_view name);

/// Row-major dense matrix.
struct DenseMatrix {
  std::uint32_t rows = 0;
  std::uint32_t cols = 0;
  std::vector<double> values;

  DenseMatrix() = default;
  DenseMatrix(std::uint32_t r, std::uint32_t c) : rows(r), cols(c), values(std::size_t{r} * c, 0.0) {}
  static DenseMatrix identity(std::uint32_t n);

  double& operator()(std::uint32_t r, std::uint32_t c) { return values[std::size_t{r} * cols + c]; }
  double operator()(std::uint32_t r, std::uint32_t c) const { return values[std::size_t{r} * cols + c]; }
  std::span<const double> row(std::uint32_t r) const { return {values.data() + std::size_t{r} * cols, cols}; }
};

/// Attention vectors for GAT scores
/// e_vu = LeakyReLU(target . W h_v + source . W h_u), normalized by softmax
/// over N_v plus v itself.
struct AttentionParams {
  std::vector<double> source;
  std::vector<double> target;
  double negative_slope = 0.2;
};

/// Precomputed attention coefficients keyed by (v << 32 | u).
using EdgeCoefficients = std::unordered_map<std::uint64_t, double>;
inline std::uint64_t coefficient_key(VertexId v, VertexId u) { return (std::uint64_t{v} << 32) | u; }

struct GnnLayer {
  DenseMatrix weight;  ///< out x in (GCN, GAT) or out x 2*in (GraphSAGE)
  Activation activation = Activation::relu;
  AttentionParams attention;                      ///< GAT only
  std::optional<EdgeCoefficients> fixed_attention;  ///< GAT only; overrides `attention`
};

class GnnModel {
 public:
  GnnModel() = default;
  /// Throws DimensionError if consecutive layer shapes do not chain.
  GnnModel(ModelKind kind, std::vector<GnnLayer> layers);

  /// Glorot-uniform weights and attention vectors from a seeded generator.
  /// `dims` = {input, hidden..., output}; every layer uses ReLU except the last,
  /// which uses `output_activation`.
  static GnnModel random(ModelKind kind, std::span<const std::uint32_t> dims, std::uint64_t seed,
                         Activation output_activation = Activation::relu);

  ModelKind kind() const { return kind_; }
  std::uint32_t num_layers() const { return static_cast<std::uint32_t>(layers_.size()); }
  /// Layers are numbered 1..K.
  const GnnLayer& layer(std::uint32_t k) const { return layers_.at(k - 1); }
  GnnLayer& mutable_layer(std::uint32_t k) { return layers_.at(k - 1); }
  std::uint32_t input_dim(std::uint32_t k) const;
  std::uint32_t output_dim(std::uint32_t k) const { return layer(k).weight.rows; }
  std::uint32_t input_dim() const { return input_dim(1); }
  std::uint32_t output_dim() const { return output_dim(num_layers()); }

  friend bool operator==(const GnnModel&, const GnnModel&);

 private:
  ModelKind kind_ = ModelKind::gcn;
  std::vector<GnnLayer> layers_;
};

/// Activations h^(k) for a subset of the vertices of a graph with `universe` vertices.
class ActivationSet {
 public:
  ActivationSet() = default;
  ActivationSet(std::uint32_t layer, std::uint32_t dim, std::uint32_t universe);
  /// Layer-0 activations: the raw feature rows of every vertex.
  static ActivationSet from_features(const Graph& g);

  std::uint32_t layer() const { return layer_; }
  std::uint32_t dim() const { return dim_; }
  std::uint32_t universe() const { return static_cast<std::uint32_t>(slot_.size()); }
  std::size_t size() const { return vertices_.size(); }
  /// Vertices in insertion order.
  std::span<const VertexId> vertices() const { return vertices_; }

  bool contains(VertexId v) const { return v < slot_.size() && slot_[v] >= 0; }
  std::span<const double> row(VertexId v) const;
  /// Inserts or overwrites the row for v.
  void set(VertexId v, std::span<const double> values);

 private:
  std::uint32_t layer_ = 0;
  std::uint32_t dim_ = 0;
  std::vector<std::int32_t> slot_;
  std::vector<VertexId> vertices_;
  std::vector<double> values_;
};

/// Raised when a layer is evaluated without the one-hop activation closure.
class ClosureError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Computes layer k (1-based) for `local_vertices`. `previous` must hold layer k-1
/// activations for every local vertex and each of its neighbors in `adjacency`.
/// Neighbors are aggregated in ascending id order.
ActivationSet layer_forward(const GnnModel& model, std::uint32_t k, std::span<const VertexId> local_vertices,
                            const ActivationSet& previous, const Graph& adjacency);

/// K sequential layers over the whole vertex set.
ActivationSet full_inference(const GnnModel& model, const Graph& g);

/// Argmax per vertex (ties toward the lowest index), indexed by vertex id.
/// Vertices absent from the set get -1.
std::vector<std::int32_t> predict_labels(const ActivationSet& activations);
std::int32_t argmax(std::span<const double> values);

/// Weights file: "FGWT", kind, layer shapes, little-endian f64 payload, CRC-32 trailer.
void save_model(const GnnModel& model, const std::filesystem::path& path);
GnnModel load_model(const std::filesystem::path& path);
std::vector<std::uint8_t> encode_model(const GnnModel& model);
GnnModel decode_model(std::span<const std::uint8_t> bytes);

}  // namespace fogserve
