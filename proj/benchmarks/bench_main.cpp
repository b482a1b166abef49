#include <benchmark/benchmark.h>

#include <array>
#include <random>
#include <vector>

#include "fogserve/codec.hpp"
#include "fogserve/gnn.hpp"
#include "fogserve/graph.hpp"
#include "fogserve/matching.hpp"
#include "fogserve/partition.hpp"
#include "fogserve/quant.hpp"
#include "fogserve/rmat.hpp"

using namespace fogserve;

namespace {

const Graph& rmat_graph() {
  static const Graph g = generate_rmat(rmat_preset("RMAT-20K", 1));
  return g;
}

CostMatrix random_costs(std::uint32_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(1.0, 500.0);
  CostMatrix c(n);
  for (std::uint32_t k = 0; k < n; ++k)
    for (std::uint32_t j = 0; j < n; ++j) c(k, j) = dist(rng);
  return c;
}

void BM_LbapAssign(benchmark::State& state) {
  const auto costs = random_costs(static_cast<std::uint32_t>(state.range(0)), 7);
  for (auto _ : state) benchmark::DoNotOptimize(lbap_assign(costs));
}
BENCHMARK(BM_LbapAssign)->Arg(4)->Arg(8)->Arg(16)->Arg(32);

void BM_BalancedPartition(benchmark::State& state) {
  const auto& g = rmat_graph();
  for (auto _ : state) benchmark::DoNotOptimize(balanced_partition(g, static_cast<std::uint32_t>(state.range(0))));
}
BENCHMARK(BM_BalancedPartition)->Arg(2)->Arg(4)->Arg(6)->Unit(benchmark::kMillisecond);

void BM_PackGraph(benchmark::State& state) {
  const auto& g = rmat_graph();
  const auto plan = make_quant_plan(degree_cdf(g));
  const auto codec = make_codec("deflate");
  for (auto _ : state) benchmark::DoNotOptimize(pack_graph(g, plan, *codec));
}
BENCHMARK(BM_PackGraph)->Unit(benchmark::kMillisecond);

void BM_FullInference(benchmark::State& state) {
  const auto& g = rmat_graph();
  const std::array<std::uint32_t, 3> dims{g.feature_dim(), 32, 8};
  const auto model = GnnModel::random(ModelKind::gcn, dims, 3);
  for (auto _ : state) benchmark::DoNotOptimize(full_inference(model, g));
}
BENCHMARK(BM_FullInference)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
