#include <doctest.h>

#include <random>

#include "fogserve/codec.hpp"
#include "fogserve/quant.hpp"
#include "fogserve/rmat.hpp"
#include "fogserve/types.hpp"
#include "helpers.hpp"

using namespace fogserve;
using namespace fogserve::testing;

namespace {

Graph sample_graph(std::uint64_t seed, double zero_fraction = 0.0) {
  RmatParams p;
  p.num_vertices = 600;
  p.density = 0.01;
  p.feature_dim = 12;
  p.seed = seed;
  p.zero_fraction = zero_fraction;
  return generate_rmat(p);
}

}  // namespace

TEST_CASE("byte codecs are lossless") {
  std::mt19937_64 rng(1);
  std::uniform_int_distribution<int> byte(0, 255);
  const DeflateCodec deflate;
  const IdentityCodec identity;
  for (std::size_t len : {0, 1, 7, 1000, 65536}) {
    std::vector<std::uint8_t> data(len);
    for (auto& b : data) b = static_cast<std::uint8_t>(byte(rng));
    CHECK(deflate.decode(deflate.encode(data)) == data);
    CHECK(identity.decode(identity.encode(data)) == data);
  }
}

TEST_CASE("malformed deflate input is reported") {
  const DeflateCodec deflate;
  const std::vector<std::uint8_t> junk{1, 2, 3};
  CHECK_THROWS_AS(deflate.decode(junk), CodecError);
  auto good = deflate.encode(std::vector<std::uint8_t>(100, 7));
  good.back() ^= 0xff;
  CHECK_THROWS_AS(deflate.decode(good), CodecError);
}

TEST_CASE("codec factory") {
  CHECK(make_codec("deflate")->name() == "deflate");
  CHECK(make_codec("identity")->name() == "identity");
  CHECK_THROWS_AS(make_codec("lz77"), ArgumentError);
}

TEST_CASE("bitshuffle inverts") {
  std::mt19937_64 rng(3);
  for (std::uint8_t bits : {8, 16, 32, 64}) {
    for (std::size_t count : {0, 1, 5, 33}) {
      std::vector<std::uint64_t> codes(count);
      const std::uint64_t mask = bits == 64 ? ~0ULL : ((1ULL << bits) - 1);
      for (auto& c : codes) c = rng() & mask;
      std::vector<std::uint8_t> out;
      bitshuffle(codes, bits, out);
      CHECK(out.size() == (count * bits + 7) / 8);
      CHECK(bitunshuffle(out, count, bits) == codes);
    }
  }
}

TEST_CASE("bitshuffle groups bit planes") {
  // Codes 1,0,1,0,... put all low bits first.
  const std::vector<std::uint64_t> codes{1, 0, 1, 0, 1, 0, 1, 0};
  std::vector<std::uint8_t> out;
  bitshuffle(codes, 8, out);
  REQUIRE(out.size() == 8);
  CHECK(out[0] != 0);
  for (std::size_t i = 1; i < 8; ++i) CHECK(out[i] == 0);
}

TEST_CASE("packed stream round trip") {
  const auto g = sample_graph(2, 0.3);
  const auto plan = make_quant_plan(degree_cdf(g));
  for (const char* name : {"deflate", "identity"}) {
    const auto codec = make_codec(name);
    const auto packed = pack_graph(g, plan, *codec);
    const auto back = unpack_graph(packed.stream, *codec);
    CHECK(back == packed.packed);
    const auto dense = dequantize_all(back, g.vertex_count());
    const auto direct = quantize_graph(g, plan);
    CHECK(std::equal(dense.begin(), dense.end(), direct.features().begin()));
    CHECK(packed.stream == pack_graph(g, plan, *codec).stream);
  }
}

TEST_CASE("subset packing keeps the listed vertices") {
  const auto g = sample_graph(4);
  const std::vector<VertexId> subset{3, 10, 599};
  const auto packed = pack_graph(g, make_quant_plan(g.max_degree()), IdentityCodec{}, subset);
  REQUIRE(packed.packed.vectors.size() == 3);
  CHECK(packed.packed.vectors[2].id == 599);
  CHECK(packed.packed.feature_dim == 12);
}

TEST_CASE("all-zero features compress far below the payload") {
  const auto base = sample_graph(5);
  const auto g = base.with_features(std::vector<double>(base.features().size(), 0.0));
  const auto plan = make_quant_plan(degree_cdf(g));
  const auto packed = pack_graph(g, plan, DeflateCodec{});
  const double payload_bytes = static_cast<double>(packed.packed.payload_bits()) / 8.0;
  CHECK(static_cast<double>(packed.stream.size()) < 0.05 * payload_bytes);
}

TEST_CASE("truncated streams are rejected") {
  const auto g = sample_graph(6);
  const auto bytes = serialize_packed(quantize_features(g, make_quant_plan(g.max_degree())));
  CHECK_THROWS(deserialize_packed(std::span(bytes).first(bytes.size() - 3)));
  auto bad = bytes;
  bad[0] = 'X';
  CHECK_THROWS(deserialize_packed(bad));
}
