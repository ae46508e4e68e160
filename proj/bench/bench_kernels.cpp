// Serial reference kernels against their OpenMP counterparts. Set
// FLOCKLAB_THREADS or OMP_NUM_THREADS to vary the thread count.

#include "flocklab/kernels.hpp"
#include "flocklab/stability.hpp"

#include <benchmark/benchmark.h>

using namespace flocklab;

namespace {

LinearFlockModel standard(int N)
{
  StandardExampleParams p;
  p.followers = N;
  p.rho = p.r = 0.45;
  return build_standard_example(p);
}

template <bool Parallel>
void BM_GainSweep(benchmark::State& state)
{
  const ResponseSolver solver(standard(static_cast<int>(state.range(0))));
  const auto grid = log_grid(1e-4, 1e2, 256);
  for (auto _ : state) {
    auto g = Parallel ? kernels::parallel::gain_sweep(solver, grid)
                      : kernels::serial::gain_sweep(solver, grid);
    benchmark::DoNotOptimize(g.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.size()));
}

template <bool Parallel>
void BM_ResponseSweep(benchmark::State& state)
{
  const ResponseSolver solver(standard(static_cast<int>(state.range(0))));
  const auto grid = log_grid(1e-4, 1e2, 128);
  for (auto _ : state) {
    auto rows = Parallel ? kernels::parallel::response_sweep(solver, grid)
                         : kernels::serial::response_sweep(solver, grid);
    benchmark::DoNotOptimize(rows.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<long>(grid.size()));
}

template <bool Parallel>
void BM_FamilyPeaks(benchmark::State& state)
{
  const std::vector<int> N_list{10, 20, 30, 40};
  auto peak = [](int N) {
    const auto m = standard(N);
    return peak_gain(m, log_grid(1e-3, 1e1, 200), 20, Execution::Serial).gain;
  };
  for (auto _ : state) {
    auto v = Parallel ? kernels::parallel::map(N_list, peak) : kernels::serial::map(N_list, peak);
    benchmark::DoNotOptimize(v.data());
  }
}

} // namespace

BENCHMARK(BM_GainSweep<false>)->Name("gain_sweep/serial")->Arg(25)->Arg(100);
BENCHMARK(BM_GainSweep<true>)->Name("gain_sweep/parallel")->Arg(25)->Arg(100);
BENCHMARK(BM_ResponseSweep<false>)->Name("response_sweep/serial")->Arg(50);
BENCHMARK(BM_ResponseSweep<true>)->Name("response_sweep/parallel")->Arg(50);
BENCHMARK(BM_FamilyPeaks<false>)->Name("family_peaks/serial");
BENCHMARK(BM_FamilyPeaks<true>)->Name("family_peaks/parallel");

int main(int argc, char** argv)
{
  kernels::configure_threads();
  benchmark::Initialize(&argc, argv);
  if (benchmark::ReportUnrecognizedArguments(argc, argv))
    return 1;
  benchmark::RunSpecifiedBenchmarks();
  benchmark::Shutdown();
  return 0;
}
