#include <benchmark/benchmark.h>

#include <memory>

#include "pcond/geometry.hpp"
#include "pcond/wolff.hpp"

using namespace pcond;

namespace {

/// Period detection + resampling for one exponent (argument is 10 p).
void integrate_wolff_bench(benchmark::State& state) {
  double p = state.range(0) / 10.0;
  for (auto _ : state) {
    WolffSolution solution = integrate_wolff(p);
    benchmark::DoNotOptimize(solution.lambda_p);
  }
}

/// Periodic interpolation of the profile, the inner loop of trace sampling.
void profile_interpolation_bench(benchmark::State& state) {
  WolffSolution solution = integrate_wolff(3.0);
  double s = 0.0;
  for (auto _ : state) {
    s += 0.1234;
    benchmark::DoNotOptimize(solution.value(s));
    benchmark::DoNotOptimize(solution.derivative(s));
  }
}

/// Trace assembly on a mesh boundary across a frequency sweep.
void boundary_trace_bench(benchmark::State& state) {
  int resolution = static_cast<int>(state.range(0));
  TriMesh mesh = build_mesh(DomainSpec::unit_square(), resolution);
  auto wolff = std::make_shared<const WolffSolution>(integrate_wolff(2.0));
  double tau = 4.0;
  for (auto _ : state) {
    tau = tau >= 24.0 ? 4.0 : tau + 1.0;
    WolffField field = make_wolff_field(wolff, normalized({1.0, 2.0}), tau, 0.5);
    benchmark::DoNotOptimize(boundary_trace(field, mesh).values.data());
  }
}

}  // namespace

BENCHMARK(integrate_wolff_bench)->Arg(15)->Arg(20)->Arg(30)->Arg(40)->Unit(benchmark::kMillisecond);
BENCHMARK(profile_interpolation_bench);
BENCHMARK(boundary_trace_bench)->Arg(64)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
