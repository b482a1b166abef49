#include <doctest.h>

#include <random>
#include <set>

#include "fogserve/matching.hpp"
#include "fogserve/types.hpp"
#include "fogserve/verify/oracles.hpp"

using namespace fogserve;

namespace {

CostMatrix random_matrix(std::uint32_t n, std::mt19937_64& rng, bool integers) {
  CostMatrix m(n);
  std::uniform_real_distribution<double> real(0.0, 50.0);
  std::uniform_int_distribution<int> small(0, 5);
  for (std::uint32_t k = 0; k < n; ++k)
    for (std::uint32_t j = 0; j < n; ++j) m(k, j) = integers ? small(rng) : real(rng);
  return m;
}

bool is_bijection(const std::vector<FogId>& a) {
  std::set<FogId> s(a.begin(), a.end());
  return s.size() == a.size() && (a.empty() || *s.rbegin() < a.size());
}

}  // namespace

TEST_CASE("single entry") {
  const auto a = lbap_assign(CostMatrix::from_rows({{7}}));
  CHECK(a.bottleneck == 7);
  CHECK(a.fog_of_partition == std::vector<FogId>{0});
}

TEST_CASE("two by two by hand") {
  const auto m = CostMatrix::from_rows({{1, 4}, {2, 3}});
  const auto a = lbap_assign(m);
  CHECK(a.fog_of_partition == std::vector<FogId>{0, 1});
  CHECK(a.bottleneck == 3);
  CHECK(greedy_assign(m).fog_of_partition == std::vector<FogId>{0, 1});
}

TEST_CASE("bottleneck equals permutation brute force") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = random_matrix(6, rng, trial % 2 == 0);
    const auto a = lbap_assign(m);
    REQUIRE(is_bijection(a.fog_of_partition));
    CHECK(a.bottleneck == verify::brute_force_bottleneck(m));
    CHECK(bottleneck_of(m, a.fog_of_partition) == a.bottleneck);
  }
}

TEST_CASE("threshold search stays logarithmic") {
  std::mt19937_64 rng(6);
  for (std::uint32_t n = 2; n <= 12; ++n) {
    const auto m = random_matrix(n, rng, false);
    const auto limit = static_cast<std::uint32_t>(std::ceil(std::log2(double(n) * n))) + 1;
    CHECK(lbap_assign(m).feasibility_tests <= limit);
  }
}

TEST_CASE("ties at the bottleneck favor cheaper remaining pairs") {
  // Both bijections share bottleneck 10; the second keeps the other entry lower.
  const auto m = CostMatrix::from_rows({{10, 10}, {9, 1}});
  const auto a = lbap_assign(m);
  CHECK(a.bottleneck == 10);
  CHECK(a.fog_of_partition == std::vector<FogId>{0, 1});
}

TEST_CASE("non-finite costs are rejected") {
  auto m = CostMatrix::from_rows({{1, 2}, {3, 4}});
  m(1, 1) = std::nan("");
  CHECK_THROWS_AS(lbap_assign(m), ArgumentError);
  CHECK_THROWS_AS(CostMatrix::from_rows({{1, 2}, {3}}), DimensionError);
}

TEST_CASE("perfect and maximum matchings") {
  BipartiteMask identity(4);
  for (std::uint32_t i = 0; i < 4; ++i) identity.set(i, i);
  CHECK(maximum_matching(identity).perfect());
  CHECK(maximum_matching(identity).size == 4);

  BipartiteMask one_fog(3);
  for (std::uint32_t k = 0; k < 3; ++k) one_fog.set(k, 0);
  CHECK(maximum_matching(one_fog).size == 1);
  CHECK_FALSE(perfect_matching(one_fog).has_value());

  std::mt19937_64 rng(9);
  std::bernoulli_distribution coin(0.25);
  for (int trial = 0; trial < 200; ++trial) {
    BipartiteMask mask(8);
    for (std::uint32_t k = 0; k < 8; ++k)
      for (std::uint32_t j = 0; j < 8; ++j)
        if (coin(rng)) mask.set(k, j);
    CHECK(maximum_matching(mask).size == verify::max_flow_matching_size(mask));
  }
}

TEST_CASE("random assignment is a seeded bijection") {
  std::mt19937_64 rng(3);
  const auto m = random_matrix(7, rng, false);
  const auto a = random_assign(m, 11);
  CHECK(is_bijection(a.fog_of_partition));
  CHECK(a.fog_of_partition == random_assign(m, 11).fog_of_partition);
  CHECK(a.bottleneck == bottleneck_of(m, a.fog_of_partition));
}

TEST_CASE("greedy never beats the optimum") {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = random_matrix(5, rng, trial % 3 == 0);
    const auto g = greedy_assign(m);
    CHECK(is_bijection(g.fog_of_partition));
    CHECK(g.bottleneck >= lbap_assign(m).bottleneck);
  }
}
