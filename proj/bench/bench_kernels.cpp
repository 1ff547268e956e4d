// Serial reference against the OpenMP variant for each kernel. Thread count
// follows OMP_NUM_THREADS.

#include <analoglab/kernels.hpp>

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

using namespace analoglab;
using namespace analoglab::kernels;

namespace {

double smooth(double x) { return std::sin(3.0 * x) * std::exp(-x); }

template <bool Parallel>
void BM_SampleSum(benchmark::State& state) {
  const auto count = static_cast<Natural>(state.range(0));
  for (auto _ : state) {
    const double s = Parallel ? sample_sum_parallel(smooth, 0.0, 1e-4, count)
                              : sample_sum_serial(smooth, 0.0, 1e-4, count);
    benchmark::DoNotOptimize(s);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(count));
}

std::vector<DifferentiatorCell> sweep_cells(int octaves) {
  std::vector<DifferentiatorCell> cells;
  for (Natural j = 0; j < 8; ++j)
    for (int p = 9; p < 9 + octaves; ++p) cells.push_back({j, std::ldexp(1.0, -p), 1.0});
  return cells;
}

template <bool Parallel>
void BM_DifferentiatorSweep(benchmark::State& state) {
  const blip::SignalF f({Natural{12}, Natural{8}, std::nullopt, Natural{6}, Natural{10},
                         std::nullopt, Natural{4}, Natural{9}});
  const precision::Cvq amp(1.0, 1e-12);
  const auto cells = sweep_cells(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto r = Parallel ? differentiator_sweep_parallel(f, amp, cells)
                      : differentiator_sweep_serial(f, amp, cells);
    benchmark::DoNotOptimize(r.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(cells.size()));
}

template <bool Parallel>
void BM_FGridScan(benchmark::State& state) {
  const auto v = resets::SyntheticVerifier::from_schedule(
      resets::Schedule({{0, 3}, {2, 1}, {4, 7}}), 2);
  const richardson::FDevice dev(v);
  const double step = 1.0 / static_cast<double>(state.range(0));
  Natural points = 0;
  for (auto _ : state) {
    const auto s = Parallel ? f_grid_scan_parallel(dev, 2, step, 3.5)
                            : f_grid_scan_serial(dev, 2, step, 3.5);
    points = s.points;
    benchmark::DoNotOptimize(s.min_F);
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(points));
}

}  // namespace

BENCHMARK(BM_SampleSum<false>)->Name("sample_sum/serial")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_SampleSum<true>)->Name("sample_sum/parallel")->Arg(1 << 16)->Arg(1 << 20);
BENCHMARK(BM_DifferentiatorSweep<false>)->Name("differentiator_sweep/serial")->Arg(10);
BENCHMARK(BM_DifferentiatorSweep<true>)->Name("differentiator_sweep/parallel")->Arg(10);
BENCHMARK(BM_FGridScan<false>)->Name("f_grid_scan/serial")->Arg(20)->Arg(100);
BENCHMARK(BM_FGridScan<true>)->Name("f_grid_scan/parallel")->Arg(20)->Arg(100);

BENCHMARK_MAIN();
