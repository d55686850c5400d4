#include <benchmark/benchmark.h>

#include <cmath>

#include "pathheat/cylindrical.hpp"
#include "pathheat/flow.hpp"
#include "pathheat/reg_calculus.hpp"
#include "pathheat/smooth.hpp"

using namespace pathheat;

namespace {

void BM_SampleBrownian(benchmark::State& state) {
  FlowParams fp;
  fp.N = static_cast<std::size_t>(state.range(0));
  fp.seed = 1;
  std::uint64_t p = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_brownian(fp, p++));
  }
}
BENCHMARK(BM_SampleBrownian)->Arg(256)->Arg(1024);

void BM_FlowBrownian(benchmark::State& state) {
  FlowParams fp;
  fp.N = static_cast<std::size_t>(state.range(0));
  fp.seed = 2;
  const auto w = sample_brownian(fp, 0);
  const auto eta = SampledPath::from_function(
      1.0, fp.N, [](double x) { return std::sin(3.0 * x); });
  for (auto _ : state) {
    benchmark::DoNotOptimize(flow_brownian(0.25, 1.0, eta, 1.0, w));
  }
}
BENCHMARK(BM_FlowBrownian)->Arg(256)->Arg(1024);

void BM_ForwardIntegralClosed(benchmark::State& state) {
  PathMeasure mu;
  mu.horizon = 1.0;
  mu.density_fn = [](double x) { return 1.0 + x * x; };
  mu.density_deriv_fn = [](double x) { return 2.0 * x; };
  const auto f = BVFunction::from_function(
      -1.0, 0.0, 512, [](double x) { return std::sin(2.0 * x); },
      [](double x) { return 2.0 * std::cos(2.0 * x); });
  const IntervalSpec iv{-1.0, 0.0, IntervalMode::kOpen};
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward_integral(mu, f, iv).value);
  }
}
BENCHMARK(BM_ForwardIntegralClosed);

void BM_ForwardIntegralEpsLimit(benchmark::State& state) {
  PathMeasure mu;
  mu.horizon = 1.0;
  mu.atoms.emplace_back(-0.5, 2.0);
  mu.density = SampledPath::from_function(1.0, 256,
                                          [](double x) { return 1.0 + x; });
  BVFunction f;
  f.lo = -1.0;
  f.hi = 0.0;
  f.samples.resize(257);
  for (std::size_t k = 0; k <= 256; ++k) {
    f.samples[k] = std::sin(2.0 * (-1.0 + k / 256.0));
  }
  const IntervalSpec iv{-1.0, 0.0, IntervalMode::kOpen};
  for (auto _ : state) {
    benchmark::DoNotOptimize(forward_integral(mu, f, iv).value);
  }
}
BENCHMARK(BM_ForwardIntegralEpsLimit);

void BM_CylSolverU(benchmark::State& state) {
  CylindricalSpec spec;
  spec.phi = {phi_const(), phi_monomial(1)};
  spec.f = outer_sum2();
  const CylSolver solver(spec);
  const auto eta = SampledPath::from_function(
      1.0, spec.quad_grid, [](double x) { return 0.3 + std::cos(2.0 * x); });
  for (auto _ : state) {
    benchmark::DoNotOptimize(solver.u(0.5, eta));
  }
}
BENCHMARK(BM_CylSolverU);

void BM_CylSolverResidual(benchmark::State& state) {
  CylindricalSpec spec;
  spec.phi = {phi_const()};
  spec.f = outer_call();
  spec.f_kinks = {0.0};
  const CylSolver solver(spec);
  const auto eta = SampledPath::from_function(
      1.0, spec.quad_grid, [](double x) { return 0.3 + std::cos(2.0 * x); });
  for (auto _ : state) {
    benchmark::DoNotOptimize(solver.residual(0.5, eta));
  }
}
BENCHMARK(BM_CylSolverResidual);

void BM_SmoothSolverU(benchmark::State& state) {
  SmoothParams sp;
  sp.N = 128;
  const auto w = Weight::from_functions(
      1.0, sp.N, [](double) { return 1.0; }, [](double) { return 0.0; });
  const SmoothSolver solver(make_quadratic(w), sp);
  const auto eta = SampledPath::constant(1.0, sp.N, 0.0);
  for (auto _ : state) {
    benchmark::DoNotOptimize(
        solver.u(0.5, eta, static_cast<std::size_t>(state.range(0)), 7));
  }
}
BENCHMARK(BM_SmoothSolverU)->Arg(1000)->Arg(10000);

}  // namespace

BENCHMARK_MAIN();
