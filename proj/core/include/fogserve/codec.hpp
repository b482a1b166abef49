#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "fogserve/graph.hpp"
#include "fogserve/quant.hpp"

namespace fogserve {

class CodecError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lossless byte-stream transform applied after bit packing.
class ByteCodec {
 public:
  virtual ~ByteCodec() = default;
  virtual std::string name() const = 0;
  virtual std::vector<std::uint8_t> encode(std::span<const std::uint8_t> raw) const = 0;
  /// Throws CodecError on malformed input.
  virtual std::vector<std::uint8_t> decode(std::span<const std::uint8_t> encoded) const = 0;
};

/// zlib deflate with a small length prefix.
class DeflateCodec final : public ByteCodec {
 public:
  explicit DeflateCodec(int level = 1);
  std::string name() const override { return "deflate"; }
  std::vector<std::uint8_t> encode(std::span<const std::uint8_t> raw) const override;
  std::vector<std::uint8_t> decode(std::span<const std::uint8_t> encoded) const override;

 private:
  int level_;
};

class IdentityCodec final : public ByteCodec {
 public:
  std::string name() const override { return "identity"; }
  std::vector<std::uint8_t> encode(std::span<const std::uint8_t> raw) const override {
    return {raw.begin(), raw.end()};
  }
  std::vector<std::uint8_t> decode(std::span<const std::uint8_t> encoded) const override {
    return {encoded.begin(), encoded.end()};
  }
};

/// "deflate" or "identity".
std::unique_ptr<ByteCodec> make_codec(const std::string& name);

/// Writes bit plane p of every code consecutively (plane 0 = least significant),
/// `bits` planes in total, padded with zero bits to a byte boundary.
void bitshuffle(std::span<const std::uint64_t> codes, std::uint8_t bits, std::vector<std::uint8_t>& out);
/// Inverse of bitshuffle; reads ceil(count * bits / 8) bytes.
std::vector<std::uint64_t> bitunshuffle(std::span<const std::uint8_t> in, std::size_t count, std::uint8_t bits);

struct PackedFeatures {
  std::uint32_t feature_dim = 0;
  std::vector<QuantizedVector> vectors;  ///< ascending id

  /// Sum over vectors of feature_dim * bits.
  std::uint64_t payload_bits() const;
  /// Per-record id, width, offset and scale bits plus the stream header.
  std::uint64_t header_bits() const;
  friend bool operator==(const PackedFeatures&, const PackedFeatures&) = default;
};

/// Quantizes the listed vertices (all of them when `vertices` is empty) by degree.
PackedFeatures quantize_features(const Graph& g, const QuantPlan& plan, std::span<const VertexId> vertices = {});

/// "FGPK", u32 count, u32 feature_dim, then per record u32 id, u8 bits,
/// f64 offset, f64 scale and the bit-shuffled codes.
std::vector<std::uint8_t> serialize_packed(const PackedFeatures& packed);
PackedFeatures deserialize_packed(std::span<const std::uint8_t> bytes);

struct PackResult {
  PackedFeatures packed;
  std::size_t serialized_bytes = 0;  ///< before the byte codec
  std::vector<std::uint8_t> stream;  ///< after the byte codec
};

PackResult pack_graph(const Graph& g, const QuantPlan& plan, const ByteCodec& codec,
                      std::span<const VertexId> vertices = {});
PackedFeatures unpack_graph(std::span<const std::uint8_t> stream, const ByteCodec& codec);

/// Dense |V| x dim matrix from a full packed set, in vertex order.
std::vector<double> dequantize_all(const PackedFeatures& packed, std::uint32_t vertex_count);

}  // namespace fogserve
