#include <doctest.h>

#include <random>

#include "fogserve/codec.hpp"
#include "fogserve/quant.hpp"
#include "fogserve/rmat.hpp"
#include "fogserve/types.hpp"
#include "fogserve/verify/oracles.hpp"
#include "helpers.hpp"

using namespace fogserve;
using namespace fogserve::testing;

TEST_CASE("equal-length degree thresholds") {
  CHECK(make_quant_plan(100).thresholds == std::array<std::uint32_t, 3>{25, 50, 75});
  CHECK(make_quant_plan(4).thresholds == std::array<std::uint32_t, 3>{1, 2, 3});
  CHECK(make_quant_plan(5).thresholds == std::array<std::uint32_t, 3>{2, 3, 4});
  const auto flat = make_quant_plan(100, {64, 64, 64, 64});
  CHECK_NOTHROW(flat.validate());
}

TEST_CASE("invalid plans") {
  CHECK_THROWS_AS((QuantPlan{{3, 2, 4}, {64, 32, 16, 8}}.validate()), ArgumentError);
  CHECK_THROWS_AS((QuantPlan{{1, 2, 3}, {64, 32, 12, 8}}.validate()), ArgumentError);
  CHECK_THROWS_AS((QuantPlan{{1, 2, 3}, {8, 16, 32, 64}}.validate()), ArgumentError);
}

TEST_CASE("bit widths follow half-open intervals") {
  const QuantPlan plan{{25, 50, 75}, {64, 32, 16, 8}};
  CHECK(assign_bitwidth(plan, 0) == 64);
  CHECK(assign_bitwidth(plan, 24) == 64);
  CHECK(assign_bitwidth(plan, 25) == 32);
  CHECK(assign_bitwidth(plan, 50) == 16);
  CHECK(assign_bitwidth(plan, 75) == 8);
  CHECK(assign_bitwidth(plan, 1000) == 8);
}

TEST_CASE("affine quantization round trips") {
  SUBCASE("constant vector") {
    const std::vector<double> x(5, 3.25);
    for (std::uint8_t bits : {8, 16, 32, 64}) CHECK(dequantize(quantize_vector(x, bits)) == x);
  }
  SUBCASE("endpoints") {
    const std::vector<double> x{0.0, 1.0};
    const auto q = quantize_vector(x, 8);
    CHECK(q.codes == std::vector<std::uint64_t>{0, 255});
    CHECK(dequantize(q) == x);
  }
  SUBCASE("element error bound") {
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> val(-10.0, 10.0);
    for (int trial = 0; trial < 1000; ++trial) {
      std::vector<double> x(52);
      for (auto& v : x) v = val(rng);
      const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
      const auto back = dequantize(quantize_vector(x, 8));
      for (std::size_t i = 0; i < x.size(); ++i) CHECK(std::abs(back[i] - x[i]) <= (*hi - *lo) / 510 + 1e-12);
    }
  }
  SUBCASE("64 bits keeps the bit pattern") {
    const std::vector<double> x{-0.0, 1e-310, 3.141592653589793, -2.5e300};
    const auto back = dequantize(quantize_vector(x, 64));
    for (std::size_t i = 0; i < x.size(); ++i)
      CHECK(std::bit_cast<std::uint64_t>(back[i]) == std::bit_cast<std::uint64_t>(x[i]));
  }
  SUBCASE("bad input") {
    const std::vector<double> x{1.0, std::nan("")};
    CHECK_THROWS_AS(quantize_vector(x, 8), ArgumentError);
    const std::vector<double> y{1.0};
    CHECK_THROWS_AS(quantize_vector(y, 12), ArgumentError);
  }
}

TEST_CASE("bit ratio closed form") {
  SUBCASE("uniform widths give one") {
    const std::vector<std::uint32_t> degrees{0, 3, 7, 7, 9};
    const DegreeCdf cdf(degrees);
    CHECK(compression_ratio(QuantPlan{{2, 4, 8}, {32, 32, 32, 32}}, cdf) == doctest::Approx(0.5));
    CHECK(compression_ratio(QuantPlan{{2, 4, 8}, {64, 64, 64, 64}}, cdf) == 1.0);
  }
  SUBCASE("quartiles") {
    const std::vector<std::uint32_t> degrees{0, 1, 2, 3};
    const DegreeCdf cdf(degrees);
    const QuantPlan plan{{1, 2, 3}, {64, 32, 16, 8}};
    CHECK(compression_ratio(plan, cdf) == doctest::Approx(0.46875).epsilon(1e-15));
    CHECK(verify::reference_bit_ratio(degrees, plan.thresholds, plan.bits) == 0.46875);
    const auto report = compression_report(plan, cdf);
    CHECK(report.discrepancy);
    CHECK(report.closed_form_at_most != doctest::Approx(0.46875));
  }
  SUBCASE("matches counting on generated graphs") {
    std::mt19937_64 rng(2);
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
      RmatParams p;
      p.num_vertices = 300 + 50 * seed;
      p.density = 0.01;
      p.seed = seed;
      const auto g = generate_rmat(p);
      std::vector<std::uint32_t> degrees(g.vertex_count());
      for (VertexId v = 0; v < g.vertex_count(); ++v) degrees[v] = g.degree(v);
      const DegreeCdf cdf(degrees);
      const auto plan = make_quant_plan(cdf);
      CHECK(std::abs(compression_ratio(plan, cdf) - counted_compression_ratio(plan, degrees)) <= 1e-12);
      CHECK(counted_compression_ratio(plan, degrees) == verify::reference_bit_ratio(degrees, plan.thresholds, plan.bits));
    }
  }
}

TEST_CASE("graph quantization touches only features") {
  RmatParams p;
  p.num_vertices = 400;
  p.density = 0.02;
  p.seed = 5;
  const auto g = generate_rmat(p);
  const auto plan = make_quant_plan(degree_cdf(g));
  const auto q = quantize_graph(g, plan);
  CHECK(q.edge_count() == g.edge_count());
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    const auto expected = dequantize(quantize_vector(g.feature(v), assign_bitwidth(plan, g.degree(v))));
    CHECK(std::equal(expected.begin(), expected.end(), q.feature(v).begin()));
  }
}
