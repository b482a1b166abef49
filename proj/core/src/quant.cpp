#include "fogserve/quant.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <string>

namespace fogserve {

namespace {

bool supported_width(std::uint32_t b) { return b == 8 || b == 16 || b == 32 || b == 64; }

double closed_form(const QuantPlan& plan, const std::array<double, 3>& f) {
  double acc = plan.bits[3];
  for (int i = 0; i < 3; ++i) acc -= f[i] * (static_cast<double>(plan.bits[i + 1]) - plan.bits[i]);
  return acc / kSourceBits;
}

}  // namespace

void QuantPlan::validate() const {
  if (!(thresholds[0] <= thresholds[1] && thresholds[1] <= thresholds[2]))
    throw ArgumentError("degree thresholds must be ascending");
  for (int i = 0; i < 4; ++i) {
    if (!supported_width(bits[i])) throw ArgumentError("bit width " + std::to_string(bits[i]) + " not in {8,16,32,64}");
    if (i > 0 && bits[i] > bits[i - 1]) throw ArgumentError("bit widths must not grow with degree");
  }
}

QuantPlan make_quant_plan(std::uint32_t max_degree, std::array<std::uint8_t, 4> bits) {
  if (max_degree == 0) throw ArgumentError("quantization plan needs max degree >= 1");
  QuantPlan plan;
  for (std::uint32_t i = 1; i <= 3; ++i)
    plan.thresholds[i - 1] = static_cast<std::uint32_t>((std::uint64_t{i} * max_degree + 3) / 4);
  plan.bits = bits;
  plan.validate();
  return plan;
}

QuantPlan make_quant_plan(const DegreeCdf& cdf, std::array<std::uint8_t, 4> bits) {
  return make_quant_plan(cdf.max_degree(), bits);
}

std::uint8_t assign_bitwidth(const QuantPlan& plan, std::uint32_t degree) {
  int interval = 0;
  while (interval < 3 && degree >= plan.thresholds[interval]) ++interval;
  return plan.bits[interval];
}

QuantizedVector quantize_vector(std::span<const double> x, std::uint8_t bits) {
  if (!supported_width(bits)) throw ArgumentError("bit width " + std::to_string(bits) + " not in {8,16,32,64}");
  for (double v : x)
    if (!std::isfinite(v)) throw ArgumentError("cannot quantize a non-finite value");
  QuantizedVector q;
  q.bits = bits;
  q.codes.resize(x.size());
  if (bits == 64) {
    std::transform(x.begin(), x.end(), q.codes.begin(), [](double v) { return std::bit_cast<std::uint64_t>(v); });
    return q;
  }
  if (x.empty()) return q;
  const auto [lo, hi] = std::minmax_element(x.begin(), x.end());
  const double max_code = std::ldexp(1.0, bits) - 1.0;
  q.offset = *lo;
  q.scale = (*hi - *lo) / max_code;
  if (q.scale == 0.0) {
    std::fill(q.codes.begin(), q.codes.end(), 0);
    return q;
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double c = std::clamp(std::round((x[i] - q.offset) / q.scale), 0.0, max_code);
    q.codes[i] = static_cast<std::uint64_t>(c);
  }
  return q;
}

std::vector<double> dequantize(const QuantizedVector& q) {
  std::vector<double> out(q.codes.size());
  if (q.bits == 64) {
    std::transform(q.codes.begin(), q.codes.end(), out.begin(), [](std::uint64_t c) { return std::bit_cast<double>(c); });
  } else {
    std::transform(q.codes.begin(), q.codes.end(), out.begin(),
                   [&](std::uint64_t c) { return q.offset + q.scale * static_cast<double>(c); });
  }
  return out;
}

Graph quantize_graph(const Graph& g, const QuantPlan& plan) {
  plan.validate();
  std::vector<double> features;
  features.reserve(g.features().size());
  for (VertexId v = 0; v < g.vertex_count(); ++v) {
    const auto dq = dequantize(quantize_vector(g.feature(v), assign_bitwidth(plan, g.degree(v))));
    features.insert(features.end(), dq.begin(), dq.end());
  }
  return g.with_features(std::move(features));
}

double compression_ratio(const QuantPlan& plan, const DegreeCdf& cdf) {
  plan.validate();
  std::array<double, 3> f{};
  for (int i = 0; i < 3; ++i) f[i] = cdf.below(plan.thresholds[i]);
  return closed_form(plan, f);
}

double counted_compression_ratio(const QuantPlan& plan, std::span<const std::uint32_t> degrees) {
  if (degrees.empty()) throw ArgumentError("no vertices to count");
  std::uint64_t total = 0;
  for (auto d : degrees) total += assign_bitwidth(plan, d);
  return static_cast<double>(total) / (static_cast<double>(degrees.size()) * kSourceBits);
}

CompressionReport compression_report(const QuantPlan& plan, const DegreeCdf& cdf) {
  plan.validate();
  CompressionReport r;
  r.closed_form = compression_ratio(plan, cdf);
  std::array<double, 3> f{};
  for (int i = 0; i < 3; ++i) f[i] = cdf.at(plan.thresholds[i]);
  r.closed_form_at_most = closed_form(plan, f);
  // Counting via integer histogram: vertices per interval.
  std::array<std::uint64_t, 4> per_interval{};
  std::uint64_t prev = 0;
  for (int i = 0; i < 3; ++i) {
    const auto below = cdf.count_below(plan.thresholds[i]);
    per_interval[i] = below - prev;
    prev = below;
  }
  per_interval[3] = cdf.vertex_count() - prev;
  std::uint64_t bits = 0;
  for (int i = 0; i < 4; ++i) bits += per_interval[i] * plan.bits[i];
  r.counted = static_cast<double>(bits) / (static_cast<double>(cdf.vertex_count()) * kSourceBits);
  r.discrepancy = std::abs(r.closed_form_at_most - r.counted) > 1e-12;
  return r;
}

}  // namespace fogserve
