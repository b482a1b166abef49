#include <zlib.h>

#include "binary_io.hpp"
#include "fogserve/gnn.hpp"

namespace fogserve {

namespace {

constexpr std::string_view kWeightsMagic = "FGWT";
constexpr std::uint32_t kWeightsVersion = 1;

std::uint32_t crc_of(const std::uint8_t* data, std::size_t size) {
  uLong crc = crc32(0L, Z_NULL, 0);
  // zlib takes uInt lengths; feed in chunks for very large models.
  while (size > 0) {
    const auto chunk = static_cast<uInt>(std::min<std::size_t>(size, 1u << 30));
    crc = crc32(crc, data, chunk);
    data += chunk;
    size -= chunk;
  }
  return static_cast<std::uint32_t>(crc);
}

}  // namespace

std::vector<std::uint8_t> encode_model(const GnnModel& model) {
  std::vector<std::uint8_t> out;
  detail::put_magic(out, kWeightsMagic);
  detail::put_u32(out, kWeightsVersion);
  detail::put_u8(out, static_cast<std::uint8_t>(model.kind()));
  detail::put_u32(out, model.num_layers());
  for (std::uint32_t k = 1; k <= model.num_layers(); ++k) {
    const auto& layer = model.layer(k);
    detail::put_u32(out, layer.weight.rows);
    detail::put_u32(out, layer.weight.cols);
    detail::put_u8(out, static_cast<std::uint8_t>(layer.activation));
    for (double w : layer.weight.values) detail::put_f64(out, w);
    if (model.kind() == ModelKind::gat) {
      detail::put_f64(out, layer.attention.negative_slope);
      detail::put_u32(out, static_cast<std::uint32_t>(layer.attention.source.size()));
      for (double a : layer.attention.source) detail::put_f64(out, a);
      for (double a : layer.attention.target) detail::put_f64(out, a);
      detail::put_u8(out, layer.fixed_attention ? 1 : 0);
      if (layer.fixed_attention) {
        std::vector<std::pair<std::uint64_t, double>> sorted(layer.fixed_attention->begin(),
                                                             layer.fixed_attention->end());
        std::sort(sorted.begin(), sorted.end());
        detail::put_u64(out, sorted.size());
        for (const auto& [key, alpha] : sorted) {
          detail::put_u64(out, key);
          detail::put_f64(out, alpha);
        }
      }
    }
  }
  detail::put_u32(out, crc_of(out.data(), out.size()));
  return out;
}

GnnModel decode_model(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 4) throw ParseError("weights: truncated input");
  const std::size_t body = bytes.size() - 4;
  detail::ByteReader trailer(bytes.data() + body, 4, "weights");
  if (trailer.u32() != crc_of(bytes.data(), body)) throw ParseError("weights: checksum mismatch (file corrupted)");

  detail::ByteReader in(bytes.data(), body, "weights");
  in.expect_magic(kWeightsMagic);
  if (const auto version = in.u32(); version != kWeightsVersion)
    throw ParseError("weights: unsupported version " + std::to_string(version));
  const auto kind_byte = in.u8();
  if (kind_byte > static_cast<std::uint8_t>(ModelKind::sage)) throw ParseError("weights: unknown model kind");
  const auto kind = static_cast<ModelKind>(kind_byte);
  const auto num_layers = in.u32();
  std::vector<GnnLayer> layers;
  for (std::uint32_t k = 0; k < num_layers; ++k) {
    GnnLayer layer;
    const auto rows = in.u32();
    const auto cols = in.u32();
    const auto act = in.u8();
    if (act > static_cast<std::uint8_t>(Activation::identity)) throw ParseError("weights: unknown activation");
    layer.activation = static_cast<Activation>(act);
    in.need(std::size_t{rows} * cols * 8);
    layer.weight = DenseMatrix(rows, cols);
    for (auto& w : layer.weight.values) w = in.f64();
    if (kind == ModelKind::gat) {
      layer.attention.negative_slope = in.f64();
      const auto len = in.u32();
      in.need(std::size_t{len} * 16);
      layer.attention.source.resize(len);
      layer.attention.target.resize(len);
      for (auto& a : layer.attention.source) a = in.f64();
      for (auto& a : layer.attention.target) a = in.f64();
      if (in.u8() != 0) {
        const auto count = in.u64();
        in.need(count * 16);
        EdgeCoefficients coeffs;
        for (std::uint64_t i = 0; i < count; ++i) {
          const auto key = in.u64();
          coeffs[key] = in.f64();
        }
        layer.fixed_attention = std::move(coeffs);
      }
    }
    layers.push_back(std::move(layer));
  }
  if (in.remaining() != 0) throw ParseError("weights: trailing bytes after last layer");
  return GnnModel(kind, std::move(layers));
}

void save_model(const GnnModel& model, const std::filesystem::path& path) {
  detail::write_file_bytes(path.string(), encode_model(model));
}

GnnModel load_model(const std::filesystem::path& path) {
  const auto bytes = detail::read_file_bytes(path.string());
  return decode_model(bytes);
}

}  // namespace fogserve
