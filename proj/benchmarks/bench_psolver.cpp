#include <benchmark/benchmark.h>

#include <memory>

#include "pcond/dnmap.hpp"
#include "pcond/geometry.hpp"
#include "pcond/psolver.hpp"
#include "pcond/trace.hpp"
#include "pcond/wolff.hpp"

using namespace pcond;

namespace {

std::shared_ptr<const TriMesh> square_mesh(int n) {
  return std::make_shared<TriMesh>(build_mesh(DomainSpec::unit_square(), n));
}

ConductivityScene disk_scene(const std::shared_ptr<const TriMesh>& mesh, double p) {
  return paint_scene(mesh, {{DiskShape{{0.5, 0.5}, 0.2}, 2.0}}, p);
}

BoundaryTrace affine_trace(const TriMesh& mesh) {
  return trace_from_function(mesh, [](const Vec2& x) { return x.x + 0.5 * x.y; });
}

BoundaryTrace oscillatory_trace(const TriMesh& mesh,
                                const std::shared_ptr<const WolffSolution>& wolff) {
  return boundary_trace(make_wolff_field(wolff, normalized({1.0, 1.0}), 12.0, 0.6), mesh);
}

/// Dirichlet solve, resolution x p sweep. p = 2 is one linear solve; the
/// nonlinear exponents exercise the damped Newton path from the p = 2 guess.
void solve_dirichlet_bench(benchmark::State& state) {
  int resolution = static_cast<int>(state.range(0));
  double p = state.range(1) / 10.0;
  auto mesh = square_mesh(resolution);
  ConductivityScene scene = disk_scene(mesh, p);
  SolverConfig config;
  config.p = p;
  PSolver solver(mesh, scene.sigma, config);
  BoundaryTrace f = affine_trace(*mesh);
  for (auto _ : state) {
    DiscreteSolution solution = solver.solve(f);
    benchmark::DoNotOptimize(solution.energy);
  }
}

/// High-frequency probe solve: the trace downstream reconstructions hammer.
void solve_oscillatory_bench(benchmark::State& state) {
  int resolution = static_cast<int>(state.range(0));
  double p = state.range(1) / 10.0;
  auto mesh = square_mesh(resolution);
  ConductivityScene scene = disk_scene(mesh, p);
  SolverConfig config;
  config.p = p;
  PSolver solver(mesh, scene.sigma, config);
  auto wolff = std::make_shared<const WolffSolution>(integrate_wolff(p));
  BoundaryTrace f = oscillatory_trace(*mesh, wolff);
  for (auto _ : state) {
    DiscreteSolution solution = solver.solve(f);
    benchmark::DoNotOptimize(solution.energy);
  }
}

/// Full pairing through the caching oracle, cold cache each iteration.
void oracle_pair_cold(benchmark::State& state) {
  int resolution = static_cast<int>(state.range(0));
  auto mesh = square_mesh(resolution);
  ConductivityScene scene = disk_scene(mesh, 2.0);
  auto wolff = std::make_shared<const WolffSolution>(integrate_wolff(2.0));
  BoundaryTrace f = oscillatory_trace(*mesh, wolff);
  for (auto _ : state) {
    state.PauseTiming();
    DnOracle oracle(scene);
    oracle.set_cache_enabled(false);
    state.ResumeTiming();
    benchmark::DoNotOptimize(oracle.pair(f));
  }
}

void pairing_quadrature_bench(benchmark::State& state) {
  int resolution = static_cast<int>(state.range(0));
  auto mesh = square_mesh(resolution);
  ConductivityScene scene = disk_scene(mesh, 3.0);
  SolverConfig config;
  config.p = 3.0;
  PSolver solver(mesh, scene.sigma, config);
  BoundaryTrace f = affine_trace(*mesh);
  DiscreteSolution u = solver.solve(f);
  for (auto _ : state)
    benchmark::DoNotOptimize(
        pairing_quadrature(*mesh, scene.sigma, u.values, u.values, 3.0));
}

}  // namespace

BENCHMARK(solve_dirichlet_bench)
    ->ArgsProduct({{16, 32, 64}, {20, 30}})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(solve_oscillatory_bench)
    ->ArgsProduct({{32, 64}, {20, 30}})
    ->Unit(benchmark::kMillisecond);
BENCHMARK(oracle_pair_cold)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK(pairing_quadrature_bench)->Arg(64)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
