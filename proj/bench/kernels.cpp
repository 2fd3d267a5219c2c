#include <benchmark/benchmark.h>

#include "spin7/diagonal.hpp"
#include "spin7/pde_grid.hpp"
#include "spin7/potential.hpp"
#include "spin7/riemann.hpp"

using namespace spin7;

namespace {

// Arg 0 is the grid size, arg 1 selects the OpenMP path.
void BM_SolveR31(benchmark::State& state) {
  GridSpec s;
  s.dim = 3;
  s.lo = {1, 1, 0.25, 0};
  s.hi = {2, 2, 0.75, 0};
  const int n = static_cast<int>(state.range(0));
  s.n = {n, n, n, 1};
  auto g = poly_on_axes(nu(1).pow(4) - Poly(6L) * nu(1) * nu(2) * nu(3).pow(2), {1, 2, 3});
  SolverOptions opts;
  opts.parallel = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(solve_r31(s, g, opts));
}
BENCHMARK(BM_SolveR31)->ArgsProduct({{17, 33}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_Potential(benchmark::State& state) {
  const auto v = SampledSymField::sample(example_family("linear-cycle").matrix(),
                                         GridSpec::cube(4, 1, 2, static_cast<int>(state.range(0))));
  PotentialOptions opts;
  opts.parallel = state.range(1) != 0;
  for (auto _ : state) benchmark::DoNotOptimize(potential_construct(v, opts));
}
BENCHMARK(BM_Potential)->ArgsProduct({{13, 21}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_GridResidual(benchmark::State& state) {
  const auto v = SampledSymField::sample(example_family("cubic").matrix(),
                                         GridSpec::cube(4, 1, 1.5, static_cast<int>(state.range(0))));
  for (auto _ : state) benchmark::DoNotOptimize(grid_residual(v, state.range(1) != 0));
}
BENCHMARK(BM_GridResidual)->ArgsProduct({{9}, {0, 1}})->Unit(benchmark::kMillisecond);

void BM_CurvatureSamples(benchmark::State& state) {
  const auto chart = MetricChart::from_field(example_family("linear-cycle").matrix());
  std::vector<std::array<double, 4>> pts;
  for (int i = 0; i < state.range(0); ++i) pts.push_back({1.0 + 0.05 * i, 1.5, 1.2 + 0.03 * i, 0.8});
  for (auto _ : state) benchmark::DoNotOptimize(curvature_samples(chart, pts, {}, state.range(1) != 0));
}
BENCHMARK(BM_CurvatureSamples)->ArgsProduct({{32}, {0, 1}})->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
