// Microbenchmarks for the solver hot paths: radial shooting, the radial
// eigenvalue, the planar Newton solve and level extraction.
#include <benchmark/benchmark.h>

#include <memory>

#include "gelfand/levelgeom.hpp"
#include "gelfand/planar.hpp"
#include "gelfand/radial.hpp"

using namespace gelfand;

static void BM_shooting(benchmark::State& state) {
    auto g = Nonlinearity::exponential();
    ShootingControl ctrl;
    ctrl.uniform_nodes = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto out = solve_shooting(2, g, 1.0, ctrl);
        benchmark::DoNotOptimize(out.first);
    }
}
BENCHMARK(BM_shooting)->Arg(1024)->Arg(4096);

static void BM_eigen_radial(benchmark::State& state) {
    auto g = Nonlinearity::exponential();
    ShootingControl ctrl;
    ctrl.uniform_nodes = 4096;
    auto [lam, sol] = solve_shooting(2, g, 1.0, ctrl);
    for (auto _ : state) {
        double l1 = linearized_eigenvalue(sol, g);
        benchmark::DoNotOptimize(l1);
    }
}
BENCHMARK(BM_eigen_radial);

static void BM_newton_2d(benchmark::State& state) {
    double h = 1.0 / static_cast<double>(state.range(0));
    auto mask = std::make_shared<const DomainMask>(DomainMask::disk(h));
    auto g = Nonlinearity::exponential();
    for (auto _ : state) {
        auto u = solve_newton(mask, g, 1.0, ScalarField2D::zero(mask));
        benchmark::DoNotOptimize(u.max_value());
    }
}
BENCHMARK(BM_newton_2d)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);

static void BM_extract_level(benchmark::State& state) {
    auto mask = std::make_shared<const DomainMask>(DomainMask::disk(1.0 / 128));
    auto u = ScalarField2D::from_function(
        mask, [](double x, double y) { return 1 - x * x - y * y; });
    for (auto _ : state) {
        auto curve = extract_level(u, 0.5);
        benchmark::DoNotOptimize(curve.components.size());
    }
}
BENCHMARK(BM_extract_level);

static void BM_profile_family(benchmark::State& state) {
    auto mask = std::make_shared<const DomainMask>(DomainMask::disk(1.0 / 64));
    auto g = Nonlinearity::exponential();
    auto u = solve_newton(mask, g, 1.0, ScalarField2D::zero(mask));
    for (auto _ : state) {
        auto fam = profile_family(u, 64, 1);
        benchmark::DoNotOptimize(fam.size());
    }
}
BENCHMARK(BM_profile_family)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
