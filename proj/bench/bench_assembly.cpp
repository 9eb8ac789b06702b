#include <benchmark/benchmark.h>

#include <numbers>

#include "bosegas/correlators.hpp"
#include "bosegas/fredholm.hpp"
#include "bosegas/kernels.hpp"

using namespace bosegas;

namespace {

const GeometryParams kGeom{0.4, 1.1, 0.6};

cplx kernel(double l, double m) { return kernel_V(l, m, BoundaryKind::Neumann, kGeom); }

void BM_assemble_serial(benchmark::State& state) {
  auto q = build_grid(0.0, std::numbers::pi, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_serial(q, kernel, 2 / std::numbers::pi).matrix.data());
  state.SetComplexityN(state.range(0));
}

void BM_assemble_parallel(benchmark::State& state) {
  auto q = build_grid(0.0, std::numbers::pi, static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(assemble_parallel(q, kernel, 2 / std::numbers::pi).matrix.data());
  state.SetComplexityN(state.range(0));
}

void BM_fredholm_det(benchmark::State& state) {
  auto op = assemble(build_grid(0.0, std::numbers::pi, static_cast<int>(state.range(0))), kernel, 2 / std::numbers::pi);
  for (auto _ : state) benchmark::DoNotOptimize(fredholm_det(op));
}

void BM_correlation(benchmark::State& state) {
  PhysicalPoint pt{0.4, 1.1, 0.6, BoundaryKind::Neumann, ThermalParams{1.0, state.range(1) ? 0.5 : 0.0}, 1.0};
  NumericsPolicy num;
  num.n = static_cast<int>(state.range(0));
  num.node_doubling = false;
  for (auto _ : state) benchmark::DoNotOptimize(correlation(pt, num).value);
}

}  // namespace

BENCHMARK(BM_assemble_serial)->RangeMultiplier(2)->Range(32, 256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_assemble_parallel)->RangeMultiplier(2)->Range(32, 256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_fredholm_det)->RangeMultiplier(2)->Range(32, 256)->Unit(benchmark::kMicrosecond);
BENCHMARK(BM_correlation)->ArgsProduct({{32, 64, 128}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
