#include <random>

#include <benchmark/benchmark.h>

#include "holonet/coarse.hpp"
#include "holonet/experiments.hpp"
#include "holonet/holocalc.hpp"
#include "holonet/network.hpp"

namespace {

using namespace holonet;

DiGraph random_graph(Eigen::Index n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::bernoulli_distribution edge(0.1);
  std::uniform_real_distribution<double> w(0.1, 2.0);
  Mat a = Mat::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      if (i != j && edge(rng)) a(i, j) = w(rng);
    }
  }
  return DiGraph(a, Vec::Ones(n));
}

void BM_ContourApply(benchmark::State& state) {
  const DiGraph g = random_graph(state.range(0), 1);
  const CMat t = characteristic_operator(g, OperatorKind::InDegreeLaplacian).matrix.cast<cplx>();
  const Contour c = default_contour(t, static_cast<int>(state.range(1)));
  const HoloFunction f = HoloFunction::exponential();
  for (auto _ : state) benchmark::DoNotOptimize(contour_apply(f, t, c));
}
BENCHMARK(BM_ContourApply)->Args({16, 64})->Args({64, 64})->Args({64, 256})->Args({128, 64})
    ->Unit(benchmark::kMillisecond);

void BM_PrepareBanks(benchmark::State& state) {
  const DiGraph g = random_graph(state.range(0), 2);
  const ModelSpec spec = state.range(1) ? dir_resolvnet_spec({4, 16}, 1, 3) : fabernet_spec({4, 16}, 1, 3);
  for (auto _ : state) benchmark::DoNotOptimize(prepare_banks(g, spec));
}
BENCHMARK(BM_PrepareBanks)->ArgsProduct({{32, 128, 256}, {0, 1}})->Unit(benchmark::kMicrosecond);

void BM_LayerForward(benchmark::State& state) {
  const Eigen::Index n = state.range(0);
  const Eigen::Index width = state.range(1);
  const DiGraph g = random_graph(n, 3);
  const ModelSpec spec = fabernet_spec({width, width}, 1, 2);
  std::mt19937_64 rng(3);
  const HoloNetModel m = init_model(spec, rng);
  const GraphBanks banks = prepare_banks(g, spec);
  const CMat x = CMat::Random(n, width);
  for (auto _ : state) {
    benchmark::DoNotOptimize(layer_forward(x, m.layers.front(), banks, spec.alpha, spec.rho));
  }
}
BENCHMARK(BM_LayerForward)->ArgsProduct({{64, 256}, {8, 32}})->Unit(benchmark::kMicrosecond);

void BM_ResolventConvergenceGap(benchmark::State& state) {
  std::mt19937_64 rng(4);
  const TwoScaleGraph g = random_two_scale_graph(static_cast<std::size_t>(state.range(0)), rng);
  const std::vector<double> grid = default_scale_grid();
  for (auto _ : state) benchmark::DoNotOptimize(resolvent_convergence_gap(g, {-1.0, 0.0}, grid));
}
BENCHMARK(BM_ResolventConvergenceGap)->Arg(20)->Arg(80)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
