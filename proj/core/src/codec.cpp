#include "fogserve/codec.hpp"

#include <zlib.h>

#include <algorithm>

#include "binary_io.hpp"

namespace fogserve {

DeflateCodec::DeflateCodec(int level) : level_(level) {
  if (level < 0 || level > 9) throw ArgumentError("deflate level must be in [0, 9]");
}

std::vector<std::uint8_t> DeflateCodec::encode(std::span<const std::uint8_t> raw) const {
  uLongf bound = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> out;
  detail::put_u64(out, raw.size());
  const auto header = out.size();
  out.resize(header + bound);
  if (compress2(out.data() + header, &bound, raw.data(), static_cast<uLong>(raw.size()), level_) != Z_OK)
    throw CodecError("deflate failed");
  out.resize(header + bound);
  return out;
}

std::vector<std::uint8_t> DeflateCodec::decode(std::span<const std::uint8_t> encoded) const {
  if (encoded.size() < 8) throw CodecError("deflate stream truncated");
  detail::ByteReader r(encoded.data(), encoded.size(), "deflate stream");
  const auto size = r.u64();
  if (size > (std::uint64_t{1} << 40)) throw CodecError("deflate stream declares an implausible size");
  std::vector<std::uint8_t> out(static_cast<std::size_t>(size));
  uLongf got = static_cast<uLongf>(size);
  const int rc = uncompress(out.data(), &got, encoded.data() + 8, static_cast<uLong>(encoded.size() - 8));
  if (rc != Z_OK || got != size) throw CodecError("deflate stream corrupted");
  return out;
}

std::unique_ptr<ByteCodec> make_codec(const std::string& name) {
  if (name == "deflate") return std::make_unique<DeflateCodec>();
  if (name == "identity") return std::make_unique<IdentityCodec>();
  throw ArgumentError("unknown codec: " + name);
}

void bitshuffle(std::span<const std::uint64_t> codes, std::uint8_t bits, std::vector<std::uint8_t>& out) {
  const std::size_t total = codes.size() * bits;
  const auto base = out.size();
  out.resize(base + (total + 7) / 8, 0);
  std::size_t pos = 0;
  for (std::uint8_t p = 0; p < bits; ++p)
    for (auto c : codes) {
      if ((c >> p) & 1u) out[base + pos / 8] |= static_cast<std::uint8_t>(1u << (pos % 8));
      ++pos;
    }
}

std::vector<std::uint64_t> bitunshuffle(std::span<const std::uint8_t> in, std::size_t count, std::uint8_t bits) {
  if (in.size() < (count * bits + 7) / 8) throw ParseError("bit-plane block truncated");
  std::vector<std::uint64_t> codes(count, 0);
  std::size_t pos = 0;
  for (std::uint8_t p = 0; p < bits; ++p)
    for (std::size_t i = 0; i < count; ++i, ++pos)
      if ((in[pos / 8] >> (pos % 8)) & 1u) codes[i] |= std::uint64_t{1} << p;
  return codes;
}

std::uint64_t PackedFeatures::payload_bits() const {
  std::uint64_t bits = 0;
  for (const auto& v : vectors) bits += std::uint64_t{feature_dim} * v.bits;
  return bits;
}

std::uint64_t PackedFeatures::header_bits() const { return 8 * (12 + vectors.size() * (4 + 1 + 8 + 8)); }

PackedFeatures quantize_features(const Graph& g, const QuantPlan& plan, std::span<const VertexId> vertices) {
  plan.validate();
  PackedFeatures packed;
  packed.feature_dim = g.feature_dim();
  auto add = [&](VertexId v) {
    auto q = quantize_vector(g.feature(v), assign_bitwidth(plan, g.degree(v)));
    q.id = v;
    packed.vectors.push_back(std::move(q));
  };
  if (vertices.empty()) {
    packed.vectors.reserve(g.vertex_count());
    for (VertexId v = 0; v < g.vertex_count(); ++v) add(v);
  } else {
    std::vector<VertexId> sorted(vertices.begin(), vertices.end());
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
      throw ArgumentError("duplicate vertex in pack request");
    for (auto v : sorted) {
      if (v >= g.vertex_count()) throw ArgumentError("vertex " + std::to_string(v) + " out of range");
      add(v);
    }
  }
  return packed;
}

std::vector<std::uint8_t> serialize_packed(const PackedFeatures& packed) {
  std::vector<std::uint8_t> out;
  out.reserve(12 + packed.vectors.size() * 21 + packed.payload_bits() / 8);
  detail::put_magic(out, "FGPK");
  detail::put_u32(out, static_cast<std::uint32_t>(packed.vectors.size()));
  detail::put_u32(out, packed.feature_dim);
  for (const auto& v : packed.vectors) {
    if (v.codes.size() != packed.feature_dim) throw DimensionError("packed vector has wrong length");
    detail::put_u32(out, v.id);
    detail::put_u8(out, v.bits);
    detail::put_f64(out, v.offset);
    detail::put_f64(out, v.scale);
    bitshuffle(v.codes, v.bits, out);
  }
  return out;
}

PackedFeatures deserialize_packed(std::span<const std::uint8_t> bytes) {
  detail::ByteReader r(bytes.data(), bytes.size(), "packed stream");
  r.expect_magic("FGPK");
  const auto count = r.u32();
  PackedFeatures packed;
  packed.feature_dim = r.u32();
  packed.vectors.reserve(std::min<std::size_t>(count, r.remaining() / 21 + 1));
  for (std::uint32_t i = 0; i < count; ++i) {
    QuantizedVector q;
    q.id = r.u32();
    q.bits = r.u8();
    if (q.bits != 8 && q.bits != 16 && q.bits != 32 && q.bits != 64)
      throw ParseError("packed stream: unsupported width " + std::to_string(q.bits));
    q.offset = r.f64();
    q.scale = r.f64();
    const std::size_t block = (std::size_t{packed.feature_dim} * q.bits + 7) / 8;
    q.codes = bitunshuffle({r.take(block), block}, packed.feature_dim, q.bits);
    packed.vectors.push_back(std::move(q));
  }
  if (r.remaining() != 0) throw ParseError("packed stream: trailing bytes");
  return packed;
}

PackResult pack_graph(const Graph& g, const QuantPlan& plan, const ByteCodec& codec, std::span<const VertexId> vertices) {
  PackResult r;
  r.packed = quantize_features(g, plan, vertices);
  const auto raw = serialize_packed(r.packed);
  r.serialized_bytes = raw.size();
  r.stream = codec.encode(raw);
  return r;
}

PackedFeatures unpack_graph(std::span<const std::uint8_t> stream, const ByteCodec& codec) {
  const auto raw = codec.decode(stream);
  return deserialize_packed(raw);
}

std::vector<double> dequantize_all(const PackedFeatures& packed, std::uint32_t vertex_count) {
  if (packed.vectors.size() != vertex_count) throw DimensionError("packed set does not cover every vertex");
  std::vector<double> out(std::size_t{vertex_count} * packed.feature_dim);
  std::vector<char> seen(vertex_count, 0);
  for (const auto& q : packed.vectors) {
    if (q.id >= vertex_count || seen[q.id]) throw InvariantError("packed set has a bad or repeated vertex id");
    seen[q.id] = 1;
    const auto values = dequantize(q);
    std::copy(values.begin(), values.end(), out.begin() + std::size_t{q.id} * packed.feature_dim);
  }
  return out;
}

}  // namespace fogserve
