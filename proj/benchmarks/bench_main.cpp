#include <benchmark/benchmark.h>

#include <cmath>
#include <numbers>

#include "resodyn/distributions.hpp"
#include "resodyn/ensemble.hpp"
#include "resodyn/perturbation.hpp"
#include "resodyn/spectral.hpp"
#include "resodyn/two_level.hpp"

using namespace resodyn;

namespace {

two_level::Params reference_params() {
    two_level::Params p;
    p.delta = 1.0;
    p.gamma1 = 0.5;
    p.gamma2 = 0.5;
    p.theta = std::numbers::pi / 10.0;
    p.d = 1.0;
    p.v = 0.75;
    return p;
}

EffectiveHamiltonian open_system(std::size_t n) {
    Philox4x32 rng(3, 0);
    return EffectiveHamiltonian::build(sample_goe(n, rng), sample_couplings(n, 2, 0.05, rng));
}

void BM_Diagonalize(benchmark::State& state) {
    const auto h = open_system(static_cast<std::size_t>(state.range(0))).matrix();
    for (auto _ : state) benchmark::DoNotOptimize(diagonalize(h));
}
BENCHMARK(BM_Diagonalize)->Arg(2)->Arg(25)->Arg(250)->Unit(benchmark::kMicrosecond);

void BM_SpectrumSolver(benchmark::State& state) {
    const auto h = open_system(static_cast<std::size_t>(state.range(0))).matrix();
    SpectrumSolver solver;
    for (auto _ : state) benchmark::DoNotOptimize(solver.solve(h).data());
}
BENCHMARK(BM_SpectrumSolver)->Arg(2)->Arg(25)->Unit(benchmark::kMicrosecond);

void BM_TwoLevelSweep(benchmark::State& state) {
    const auto p = reference_params();
    const auto grid = two_level::linear_grid(-2.0, 2.0, 801);
    for (auto _ : state) benchmark::DoNotOptimize(two_level::sweep(p, grid));
}
BENCHMARK(BM_TwoLevelSweep)->Unit(benchmark::kMillisecond);

void BM_VelocityPdf(benchmark::State& state) {
    const auto kind = state.range(0) == 0 ? SpectrumKind::picket_fence : SpectrumKind::goe;
    const int m = static_cast<int>(state.range(1));
    double y = 0.1;
    for (auto _ : state) {
        benchmark::DoNotOptimize(velocity_pdf(y, m, kind));
        y = y < 5.0 ? y + 0.37 : 0.1;
    }
}
BENCHMARK(BM_VelocityPdf)->Args({0, 1})->Args({0, 10})->Args({1, 2});

void BM_EnsembleRealization(benchmark::State& state) {
    EnsembleConfig c;
    c.model.levels = 250;
    c.channels = 2;
    c.realizations = 1;
    c.central_window = 25;
    c.threads = 1;
    c.route = state.range(0) == 0 ? SamplingRoute::direct_matrix : SamplingRoute::representation;
    for (auto _ : state) {
        ++c.seed;
        benchmark::DoNotOptimize(sample_velocities(c));
    }
}
BENCHMARK(BM_EnsembleRealization)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
