#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numeric>

#include "fogserve/gnn.hpp"
#include "fogserve/types.hpp"
#include "fogserve/verify/oracles.hpp"
#include "helpers.hpp"

using namespace fogserve;
using namespace fogserve::testing;

namespace {

GnnModel single_layer(ModelKind kind, DenseMatrix w, Activation act = Activation::relu) {
  GnnLayer layer;
  layer.weight = std::move(w);
  layer.activation = act;
  if (kind == ModelKind::gat) {
    layer.attention.source.assign(layer.weight.rows, 0.0);
    layer.attention.target.assign(layer.weight.rows, 0.0);
  }
  return GnnModel(kind, {layer});
}

double max_error(const ActivationSet& out, const std::vector<std::vector<double>>& ref) {
  double err = 0.0;
  for (VertexId v = 0; v < ref.size(); ++v) err = std::max(err, verify::max_relative_error(out.row(v), ref[v]));
  return err;
}

}  // namespace

TEST_CASE("gcn averages over the neighborhood including self") {
  const Graph g(2, {{0, 1}}, 1, {2.0, 4.0});
  const auto model = single_layer(ModelKind::gcn, DenseMatrix::identity(1));
  const auto out = full_inference(model, g);
  CHECK(out.row(0)[0] == doctest::Approx(3.0));
}

TEST_CASE("gat on an isolated vertex is its own transform") {
  const Graph g(1, {}, 2, {-1.0, 2.0});
  const auto model = single_layer(ModelKind::gat, DenseMatrix::identity(2));
  const auto out = full_inference(model, g);
  CHECK(out.row(0)[0] == 0.0);
  CHECK(out.row(0)[1] == doctest::Approx(2.0));
}

TEST_CASE("every model kind matches the dense reference") {
  for (auto kind : {ModelKind::gcn, ModelKind::gat, ModelKind::sage}) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
      const auto g = random_graph(5 + seed * 7, 3.0, 4, seed);
      const std::vector<std::uint32_t> dims{4, 6, 3};
      const auto model = GnnModel::random(kind, dims, seed);
      CHECK(max_error(full_inference(model, g), verify::reference_inference(model, g)) <= 1e-12);
    }
  }
}

TEST_CASE("one layer equals layer_forward over all vertices") {
  const auto g = random_graph(30, 4.0, 3, 4);
  const std::vector<std::uint32_t> dims{3, 2};
  const auto model = GnnModel::random(ModelKind::sage, dims, 2);
  std::vector<VertexId> all(g.vertex_count());
  std::iota(all.begin(), all.end(), 0u);
  const auto a = layer_forward(model, 1, all, ActivationSet::from_features(g), g);
  const auto b = full_inference(model, g);
  for (auto v : all) CHECK(verify::max_relative_error(a.row(v), b.row(v)) == 0.0);
}

TEST_CASE("two gcn layers on a path, by hand") {
  // Path 0-1-2 with W = [1], identity activations: each layer averages
  // over the closed neighborhood.
  const Graph g(3, {{0, 1}, {1, 2}}, 1, {3.0, 0.0, 6.0});
  GnnLayer l;
  l.weight = DenseMatrix::identity(1);
  l.activation = Activation::identity;
  const GnnModel model(ModelKind::gcn, {l, l});
  const auto out = full_inference(model, g);
  // first layer: [1.5, 3, 3]; second: [2.25, 2.5, 3]
  CHECK(out.row(0)[0] == doctest::Approx(2.25));
  CHECK(out.row(1)[0] == doctest::Approx(2.5));
  CHECK(out.row(2)[0] == doctest::Approx(3.0));
}

TEST_CASE("edgeless gcn applies the transform per vertex") {
  const auto g = make_graph(4, {}, 2);
  DenseMatrix w(2, 2);
  w(0, 0) = 2.0;
  w(1, 0) = -1.0;
  w(1, 1) = 0.5;
  GnnLayer l;
  l.weight = w;
  const GnnModel model(ModelKind::gcn, {l, l});
  const auto out = full_inference(model, g);
  for (VertexId v = 0; v < 4; ++v) {
    auto h = std::vector<double>(g.feature(v).begin(), g.feature(v).end());
    for (int k = 0; k < 2; ++k) {
      const std::vector<double> next{std::max(0.0, 2.0 * h[0]), std::max(0.0, -h[0] + 0.5 * h[1])};
      h = next;
    }
    CHECK(out.row(v)[0] == doctest::Approx(h[0]));
    CHECK(out.row(v)[1] == doctest::Approx(h[1]));
  }
}

TEST_CASE("missing neighbor activations raise a closure error") {
  const auto g = path_graph(3, 1);
  const std::vector<std::uint32_t> dims{1, 1};
  const auto model = GnnModel::random(ModelKind::gcn, dims, 1);
  ActivationSet partial(0, 1, 3);
  const double x = 1.0;
  partial.set(0, {&x, 1});
  const std::vector<VertexId> local{0};
  CHECK_THROWS_AS(layer_forward(model, 1, local, partial, g), ClosureError);
}

TEST_CASE("argmax breaks ties toward the lower index") {
  const std::vector<double> a{0.1, 0.9}, b{0.5, 0.5};
  CHECK(argmax(a) == 1);
  CHECK(argmax(b) == 0);
}

TEST_CASE("layer shapes must chain") {
  GnnLayer a, b;
  a.weight = DenseMatrix(3, 2);
  b.weight = DenseMatrix(2, 4);
  CHECK_THROWS_AS(GnnModel(ModelKind::gcn, {a, b}), DimensionError);
}

TEST_CASE("weights round trip and corruption is detected") {
  TempDir dir("weights");
  const std::vector<std::uint32_t> dims{8, 16, 4};
  for (auto kind : {ModelKind::gcn, ModelKind::gat, ModelKind::sage}) {
    const auto model = GnnModel::random(kind, dims, 42);
    const auto path = dir.path() / (std::string(to_string(kind)) + ".fgwt");
    save_model(model, path);
    CHECK(load_model(path) == model);

    auto bytes = encode_model(model);
    bytes[bytes.size() / 2] ^= 0x10;
    CHECK_THROWS_AS(decode_model(bytes), ParseError);
  }
  CHECK_THROWS_AS(load_model(dir.path() / "missing.fgwt"), ParseError);
}
