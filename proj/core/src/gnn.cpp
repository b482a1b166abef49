#include "fogserve/gnn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

namespace fogserve {

const char* to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::gcn:
      return "gcn";
    case ModelKind::gat:
      return "gat";
    case ModelKind::sage:
      return "sage";
  }
  return "?";
}

ModelKind parse_model_kind(std::string_view name) {
  if (name == "gcn" || name == "GCN") return ModelKind::gcn;
  if (name == "gat" || name == "GAT") return ModelKind::gat;
  if (name == "sage" || name == "graphsage" || name == "GraphSAGE") return ModelKind::sage;
  throw ArgumentError("unknown model kind \"" + std::string(name) + "\"");
}

DenseMatrix DenseMatrix::identity(std::uint32_t n) {
  DenseMatrix m(n, n);
  for (std::uint32_t i = 0; i < n; ++i) m(i, i) = 1.0;
  return m;
}

GnnModel::GnnModel(ModelKind kind, std::vector<GnnLayer> layers) : kind_(kind), layers_(std::move(layers)) {
  if (layers_.empty()) throw ArgumentError("a GNN model needs at least one layer");
  const std::uint32_t widen = kind_ == ModelKind::sage ? 2 : 1;
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    const auto& w = layers_[i].weight;
    if (w.values.size() != std::size_t{w.rows} * w.cols)
      throw DimensionError("layer " + std::to_string(i + 1) + ": weight storage does not match its shape");
    if (w.rows == 0 || w.cols == 0 || w.cols % widen != 0)
      throw DimensionError("layer " + std::to_string(i + 1) + ": invalid weight shape");
    if (i > 0 && w.cols != widen * layers_[i - 1].weight.rows)
      throw DimensionError("layer " + std::to_string(i + 1) + " expects input dim " + std::to_string(w.cols / widen) +
                           " but layer " + std::to_string(i) + " outputs " + std::to_string(layers_[i - 1].weight.rows));
    if (kind_ == ModelKind::gat && !layers_[i].fixed_attention) {
      const auto& a = layers_[i].attention;
      if (a.source.size() != w.rows || a.target.size() != w.rows)
        throw DimensionError("layer " + std::to_string(i + 1) + ": attention vectors must match output dim");
    }
  }
}

std::uint32_t GnnModel::input_dim(std::uint32_t k) const {
  const auto cols = layer(k).weight.cols;
  return kind_ == ModelKind::sage ? cols / 2 : cols;
}

GnnModel GnnModel::random(ModelKind kind, std::span<const std::uint32_t> dims, std::uint64_t seed,
                          Activation output_activation) {
  if (dims.size() < 2) throw ArgumentError("model dims need at least input and output");
  std::mt19937_64 rng(seed);
  std::vector<GnnLayer> layers;
  const std::uint32_t widen = kind == ModelKind::sage ? 2 : 1;
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    GnnLayer layer;
    layer.weight = DenseMatrix(dims[i + 1], widen * dims[i]);
    const double limit = std::sqrt(6.0 / (layer.weight.rows + layer.weight.cols));
    std::uniform_real_distribution<double> dist(-limit, limit);
    for (auto& x : layer.weight.values) x = dist(rng);
    layer.activation = i + 2 == dims.size() ? output_activation : Activation::relu;
    if (kind == ModelKind::gat) {
      const double a_limit = std::sqrt(6.0 / (dims[i + 1] + 1.0));
      std::uniform_real_distribution<double> adist(-a_limit, a_limit);
      layer.attention.source.resize(dims[i + 1]);
      layer.attention.target.resize(dims[i + 1]);
      for (auto& x : layer.attention.source) x = adist(rng);
      for (auto& x : layer.attention.target) x = adist(rng);
    }
    layers.push_back(std::move(layer));
  }
  return GnnModel(kind, std::move(layers));
}

bool operator==(const GnnModel& a, const GnnModel& b) {
  if (a.kind_ != b.kind_ || a.layers_.size() != b.layers_.size()) return false;
  for (std::size_t i = 0; i < a.layers_.size(); ++i) {
    const auto& x = a.layers_[i];
    const auto& y = b.layers_[i];
    if (x.weight.rows != y.weight.rows || x.weight.cols != y.weight.cols || x.weight.values != y.weight.values ||
        x.activation != y.activation || x.attention.source != y.attention.source ||
        x.attention.target != y.attention.target || x.attention.negative_slope != y.attention.negative_slope ||
        x.fixed_attention != y.fixed_attention)
      return false;
  }
  return true;
}

// --- activations -----------------------------------------------------------

ActivationSet::ActivationSet(std::uint32_t layer, std::uint32_t dim, std::uint32_t universe)
    : layer_(layer), dim_(dim), slot_(universe, -1) {}

ActivationSet ActivationSet::from_features(const Graph& g) {
  ActivationSet set(0, g.feature_dim(), g.vertex_count());
  set.vertices_.resize(g.vertex_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    set.vertices_[v] = v;
    set.slot_[v] = static_cast<std::int32_t>(v);
  }
  set.values_.assign(g.features().begin(), g.features().end());
  return set;
}

std::span<const double> ActivationSet::row(VertexId v) const {
  if (!contains(v)) throw ClosureError("no layer-" + std::to_string(layer_) + " activation for vertex " + std::to_string(v));
  return {values_.data() + static_cast<std::size_t>(slot_[v]) * dim_, dim_};
}

void ActivationSet::set(VertexId v, std::span<const double> values) {
  if (values.size() != dim_) throw DimensionError("activation row has " + std::to_string(values.size()) +
                                                  " elements, expected " + std::to_string(dim_));
  if (v >= slot_.size()) throw ArgumentError("vertex " + std::to_string(v) + " outside activation universe");
  if (slot_[v] < 0) {
    slot_[v] = static_cast<std::int32_t>(vertices_.size());
    vertices_.push_back(v);
    values_.insert(values_.end(), values.begin(), values.end());
  } else {
    std::copy(values.begin(), values.end(), values_.begin() + static_cast<std::ptrdiff_t>(slot_[v]) * dim_);
  }
}

// --- layer evaluation ------------------------------------------------------

namespace {

void matvec(const DenseMatrix& w, std::span<const double> x, std::span<double> out) {
  for (std::uint32_t r = 0; r < w.rows; ++r) {
    const double* row = w.values.data() + std::size_t{r} * w.cols;
    double acc = 0.0;
    for (std::uint32_t c = 0; c < w.cols; ++c) acc += row[c] * x[c];
    out[r] = acc;
  }
}

void apply_activation(Activation act, std::span<double> values) {
  if (act == Activation::relu)
    for (auto& x : values) x = x > 0.0 ? x : 0.0;
}

double dot(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
  return acc;
}

}  // namespace

ActivationSet layer_forward(const GnnModel& model, std::uint32_t k, std::span<const VertexId> local_vertices,
                            const ActivationSet& previous, const Graph& adjacency) {
  if (k < 1 || k > model.num_layers()) throw ArgumentError("layer index " + std::to_string(k) + " out of range");
  const GnnLayer& layer = model.layer(k);
  const std::uint32_t in_dim = model.input_dim(k);
  const std::uint32_t out_dim = model.output_dim(k);
  if (previous.dim() != in_dim)
    throw DimensionError("layer " + std::to_string(k) + " expects input dim " + std::to_string(in_dim) + ", got " +
                         std::to_string(previous.dim()));
  if (previous.universe() != adjacency.vertex_count())
    throw DimensionError("activation universe does not match adjacency vertex count");

  for (VertexId v : local_vertices) {
    if (v >= adjacency.vertex_count()) throw ArgumentError("vertex " + std::to_string(v) + " out of range");
    if (!previous.contains(v))
      throw ClosureError("layer " + std::to_string(k) + ": missing activation for local vertex " + std::to_string(v));
    for (VertexId u : adjacency.neighbors(v))
      if (!previous.contains(u))
        throw ClosureError("layer " + std::to_string(k) + ": missing activation for neighbor " + std::to_string(u) +
                           " of vertex " + std::to_string(v));
  }

  ActivationSet out(k, out_dim, previous.universe());
  std::vector<double> agg(in_dim), concat(2 * std::size_t{in_dim}), result(out_dim);

  switch (model.kind()) {
    case ModelKind::gcn:
      for (VertexId v : local_vertices) {
        std::fill(agg.begin(), agg.end(), 0.0);
        const auto nbrs = adjacency.neighbors(v);
        for (VertexId u : nbrs) {
          const auto h = previous.row(u);
          for (std::uint32_t i = 0; i < in_dim; ++i) agg[i] += h[i];
        }
        const auto self = previous.row(v);
        const double norm = static_cast<double>(nbrs.size()) + 1.0;
        for (std::uint32_t i = 0; i < in_dim; ++i) agg[i] = (agg[i] + self[i]) / norm;
        matvec(layer.weight, agg, result);
        apply_activation(layer.activation, result);
        out.set(v, result);
      }
      break;

    case ModelKind::sage:
      for (VertexId v : local_vertices) {
        std::fill(concat.begin(), concat.end(), 0.0);
        const auto nbrs = adjacency.neighbors(v);
        for (VertexId u : nbrs) {
          const auto h = previous.row(u);
          for (std::uint32_t i = 0; i < in_dim; ++i) concat[i] += h[i];
        }
        if (!nbrs.empty())
          for (std::uint32_t i = 0; i < in_dim; ++i) concat[i] /= static_cast<double>(nbrs.size());
        const auto self = previous.row(v);
        std::copy(self.begin(), self.end(), concat.begin() + in_dim);
        matvec(layer.weight, concat, result);
        apply_activation(layer.activation, result);
        out.set(v, result);
      }
      break;

    case ModelKind::gat: {
      // W h_u is computed once per vertex in the closure.
      ActivationSet transformed(k, out_dim, previous.universe());
      auto transform = [&](VertexId u) {
        if (transformed.contains(u)) return;
        matvec(layer.weight, previous.row(u), result);
        transformed.set(u, result);
      };
      for (VertexId v : local_vertices) {
        transform(v);
        for (VertexId u : adjacency.neighbors(v)) transform(u);
      }

      std::vector<VertexId> members;
      std::vector<double> alpha;
      for (VertexId v : local_vertices) {
        members.clear();
        const auto nbrs = adjacency.neighbors(v);
        auto insert_at = std::lower_bound(nbrs.begin(), nbrs.end(), v);
        members.insert(members.end(), nbrs.begin(), insert_at);
        members.push_back(v);
        members.insert(members.end(), insert_at, nbrs.end());

        alpha.assign(members.size(), 0.0);
        if (layer.fixed_attention) {
          for (std::size_t i = 0; i < members.size(); ++i) {
            auto it = layer.fixed_attention->find(coefficient_key(v, members[i]));
            if (it == layer.fixed_attention->end())
              throw ArgumentError("no precomputed attention coefficient for (" + std::to_string(v) + ", " +
                                  std::to_string(members[i]) + ")");
            alpha[i] = it->second;
          }
        } else {
          const double self_score = dot(layer.attention.target, transformed.row(v));
          double best = -std::numeric_limits<double>::infinity();
          for (std::size_t i = 0; i < members.size(); ++i) {
            double e = self_score + dot(layer.attention.source, transformed.row(members[i]));
            if (e < 0.0) e *= layer.attention.negative_slope;
            alpha[i] = e;
            best = std::max(best, e);
          }
          double total = 0.0;
          for (auto& a : alpha) {
            a = std::exp(a - best);
            total += a;
          }
          for (auto& a : alpha) a /= total;
        }

        std::fill(result.begin(), result.end(), 0.0);
        for (std::size_t i = 0; i < members.size(); ++i) {
          const auto z = transformed.row(members[i]);
          for (std::uint32_t j = 0; j < out_dim; ++j) result[j] += alpha[i] * z[j];
        }
        apply_activation(layer.activation, result);
        out.set(v, result);
      }
      break;
    }
  }
  return out;
}

ActivationSet full_inference(const GnnModel& model, const Graph& g) {
  if (model.input_dim() != g.feature_dim())
    throw DimensionError("model input dim " + std::to_string(model.input_dim()) + " != feature dim " +
                         std::to_string(g.feature_dim()));
  std::vector<VertexId> all(g.vertex_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) all[v] = v;
  ActivationSet current = ActivationSet::from_features(g);
  for (std::uint32_t k = 1; k <= model.num_layers(); ++k) current = layer_forward(model, k, all, current, g);
  return current;
}

std::int32_t argmax(std::span<const double> values) {
  if (values.empty()) throw ArgumentError("argmax of an empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return static_cast<std::int32_t>(best);
}

std::vector<std::int32_t> predict_labels(const ActivationSet& activations) {
  std::vector<std::int32_t> labels(activations.universe(), -1);
  for (VertexId v : activations.vertices()) labels[v] = argmax(activations.row(v));
  return labels;
}

}  // namespace fogserve
