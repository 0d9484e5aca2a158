#include <benchmark/benchmark.h>

#include "ddspde/experiments.hpp"

using namespace ddspde;

namespace {

ProblemSpec diffusion_only() {
    ProblemSpec prob = experiment1_spec();
    prob.b_tilde = [](double, double, double, double) { return 0.0; };
    prob.f_tilde = [](double, double, double, double) { return 0.0; };
    return prob;
}

void IncrementFieldSynthesis(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const int K = static_cast<int>(state.range(1));
    const Grid2D grid = build_grid(n);
    const KLSpectrum spectrum = build_spectrum(K, 0.001, grid);
    const TimeGrid tg = make_uniform_time_grid(1.0, 1);
    const NoisePath path = sample_path(spectrum, tg, 17);
    for (auto _ : state) {
        ScalarField field = path.increment_field(1, K);
        benchmark::DoNotOptimize(field.values().data());
    }
    state.SetItemsProcessed(state.iterations() * grid.size());
}
BENCHMARK(IncrementFieldSynthesis)
    ->Args({31, 16})
    ->Args({63, 64})
    ->Args({127, 128});

void ImplicitSolve(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const double h = 1.0 / state.range(1);
    const Grid2D grid = build_grid(n);
    const auto op = assemble_weighted_diffusion(grid, ScalarField(grid, 1.0), 0.2);
    const ScalarField rhs = sample_function(grid, [](double x1, double x2) {
        return x1 * (1.0 - x1) * x2 * (1.0 - x2);
    });
    for (auto _ : state) {
        ScalarField U = solve_spd(op, h, rhs);
        benchmark::DoNotOptimize(U.values().data());
    }
}
BENCHMARK(ImplicitSolve)->Args({63, 1024})->Args({63, 16})->Args({127, 1024});

void SubdomainSolve(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Grid2D grid = build_grid(n);
    const PartitionOfUnity part = build_strip_partition(grid, 4, 0.1);
    const auto op = assemble_weighted_diffusion(grid, part.chi(1), 0.2);
    const ScalarField rhs = sample_function(grid, [](double x1, double x2) {
        return x1 * (1.0 - x1) * x2 * (1.0 - x2);
    });
    for (auto _ : state) {
        ScalarField U = solve_spd(op, 1.0 / 64, rhs);
        benchmark::DoNotOptimize(U.values().data());
    }
}
BENCHMARK(SubdomainSolve)->Arg(63)->Arg(127);

void LieStepSplit4(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Grid2D grid = build_grid(n);
    const KLSpectrum spectrum = build_spectrum(64, 0.001, grid);
    const StepperConfig cfg(build_strip_partition(grid, 4, 0.1), {64, 64, 64, 64});
    const TimeGrid tg = make_uniform_time_grid(1.0, 16);
    const NoisePath path = sample_path(spectrum, tg, 23);
    const ProblemSpec prob = experiment1_spec();
    const ScalarField U0 = sample_function(grid, prob.u0);
    for (auto _ : state) {
        ScalarField U = lie_step(cfg, prob, U0, 0.0, tg.step_size(1), path, 1);
        benchmark::DoNotOptimize(U.values().data());
    }
}
BENCHMARK(LieStepSplit4)->Arg(63);

void DeterministicIntegrate(benchmark::State& state) {
    const Grid2D grid = build_grid(31);
    const KLSpectrum spectrum = build_spectrum(4, 0.5, grid);
    const StepperConfig cfg(build_strip_partition(grid, 4, 0.1), {4, 4, 4, 4});
    const TimeGrid tg = make_uniform_time_grid(1.0, 32);
    const NoisePath path = sample_path(spectrum, tg, 5);
    const ProblemSpec prob = diffusion_only();
    for (auto _ : state) {
        auto result = integrate(cfg, prob, tg, path);
        benchmark::DoNotOptimize(result.final_state.values().data());
    }
}
BENCHMARK(DeterministicIntegrate);

}  // namespace

BENCHMARK_MAIN();
