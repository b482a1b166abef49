#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "fogserve/graph.hpp"

namespace fogserve {

/// Source width of every feature element.
inline constexpr std::uint32_t kSourceBits = 64;

/// Degree intervals [0,D1), [D1,D2), [D2,D3), [D3,inf) quantized with bits[0..3].
struct QuantPlan {
  std::array<std::uint32_t, 3> thresholds{};
  std::array<std::uint8_t, 4> bits{64, 32, 16, 8};

  /// Throws ArgumentError on non-ascending thresholds, widths outside
  /// {8,16,32,64} or widths that grow with degree.
  void validate() const;
  friend bool operator==(const QuantPlan&, const QuantPlan&) = default;
};

/// Equal-length degree intervals: D_i = ceil(i * max_degree / 4).
QuantPlan make_quant_plan(const DegreeCdf& cdf, std::array<std::uint8_t, 4> bits = {64, 32, 16, 8});
QuantPlan make_quant_plan(std::uint32_t max_degree, std::array<std::uint8_t, 4> bits = {64, 32, 16, 8});

std::uint8_t assign_bitwidth(const QuantPlan& plan, std::uint32_t degree);

/// One vertex's feature vector after affine quantization. 64-bit entries carry
/// the raw IEEE-754 bit patterns with scale 1 and offset 0.
struct QuantizedVector {
  VertexId id = 0;
  std::uint8_t bits = 64;
  double offset = 0.0;
  double scale = 1.0;
  std::vector<std::uint64_t> codes;

  friend bool operator==(const QuantizedVector&, const QuantizedVector&) = default;
};

/// Throws ArgumentError on non-finite input or unsupported width.
QuantizedVector quantize_vector(std::span<const double> x, std::uint8_t bits);
std::vector<double> dequantize(const QuantizedVector& q);

/// Features of every vertex replaced by quantize-then-dequantize under `plan`.
Graph quantize_graph(const Graph& g, const QuantPlan& plan);

/// Payload-bit ratios of a plan against Q = 64-bit features.
struct CompressionReport {
  double closed_form = 0.0;  ///< (1/Q)[q3 - sum F(D_i)(q_i - q_{i-1})], F(d) = P(D < d)
  double counted = 0.0;      ///< sum_v bits(deg v) / (|V| Q)
  double closed_form_at_most = 0.0;  ///< same formula with F(d) = P(D <= d)
  /// True when the P(D <= d) form differs from the count, i.e. some vertex
  /// degree sits exactly on a threshold whose neighboring widths differ.
  bool discrepancy = false;
};

/// Closed form with F(d) = P(D < d), which matches the half-open intervals exactly.
double compression_ratio(const QuantPlan& plan, const DegreeCdf& cdf);
CompressionReport compression_report(const QuantPlan& plan, const DegreeCdf& cdf);
/// Direct per-vertex count.
double counted_compression_ratio(const QuantPlan& plan, std::span<const std::uint32_t> degrees);

}  // namespace fogserve
