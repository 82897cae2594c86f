// Serial reference against the OpenMP kernels.
#include <benchmark/benchmark.h>

#include <numeric>
#include <vector>

#include "vecsim/kernels.hpp"
#include "vecsim/scheduler.hpp"

using namespace vecsim;

namespace {

std::vector<double> filled(std::size_t n, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> v(n);
  for (double& x : v) x = uniform01(rng) - 0.5;
  return v;
}

template <void (*Gemm)(const double*, const double*, double*, int, int, int)>
void gemm(benchmark::State& state) {
  // Batch of 512 states through a 330 -> 256 layer.
  const int m = 512, k = 330, n = static_cast<int>(state.range(0));
  const auto a = filled(static_cast<std::size_t>(m) * k, 1);
  const auto b = filled(static_cast<std::size_t>(k) * n, 2);
  std::vector<double> c(static_cast<std::size_t>(m) * n);
  for (auto _ : state) {
    std::fill(c.begin(), c.end(), 0.0);
    Gemm(a.data(), b.data(), c.data(), m, k, n);
    benchmark::DoNotOptimize(c.data());
  }
  state.SetItemsProcessed(state.iterations() * 2L * m * k * n);
}

ChannelTable table(int aps, int cvs, int prbs) {
  ChannelTable t(aps, cvs, prbs);
  Rng rng(3);
  for (int b = 0; b < aps; ++b)
    for (int u = 0; u < cvs; ++u)
      for (int z = 0; z < prbs; ++z) t.gain(b, u, z) = 1e-9 * uniform01(rng);
  return t;
}

template <bool Parallel>
void vc_search(benchmark::State& state) {
  const int W = static_cast<int>(state.range(0));
  const auto channels = table(6, 10, 6);
  std::vector<int> cvs(W);
  std::iota(cvs.begin(), cvs.end(), 0);
  std::vector<int> deadlines(W);
  std::iota(deadlines.begin(), deadlines.end(), 1);
  const auto phi = priorities(deadlines);
  const LinkBudget budget;
  PartitionCache partitions;
  partitions.get(6, W);
  for (auto _ : state) {
    const auto d = Parallel ? optimal_vc_and_prb(W, cvs, phi, channels, budget, partitions)
                            : optimal_vc_and_prb_serial(W, cvs, phi, channels, budget, partitions);
    benchmark::DoNotOptimize(d.wsr);
  }
}

} // namespace

BENCHMARK(gemm<kernels::gemm_nn_ref>)->Name("gemm_nn/serial_ref")->Arg(256)->Arg(10);
BENCHMARK(gemm<kernels::gemm_nn>)->Name("gemm_nn/tiled_omp")->Arg(256)->Arg(10);
BENCHMARK(vc_search<false>)->Name("vc_search/serial")->DenseRange(2, 5);
BENCHMARK(vc_search<true>)->Name("vc_search/omp")->DenseRange(2, 5);

BENCHMARK_MAIN();
