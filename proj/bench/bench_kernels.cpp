#include "sburgers/noise.hpp"
#include "sburgers/parallel.hpp"
#include "sburgers/philox.hpp"
#include "sburgers/solver.hpp"
#include "sburgers/spectral.hpp"

#include <benchmark/benchmark.h>

using namespace sburgers;

namespace {

SpectralField random_field(std::size_t n, std::uint64_t seed)
{
    SpectralField u(n);
    for (std::size_t k = 1; k <= n; ++k) u[k - 1] = philox_standard_normal(seed, 1, k) / double(k);
    return u;
}

void BM_NonlinearityDirect(benchmark::State& state)
{
    const auto u = random_field(std::size_t(state.range(0)), 3);
    for (auto _ : state) benchmark::DoNotOptimize(nonlinearity_direct(u));
}

void BM_NonlinearityPseudospectral(benchmark::State& state)
{
    const auto u = random_field(std::size_t(state.range(0)), 3);
    for (auto _ : state) benchmark::DoNotOptimize(nonlinearity(u, true));
}

void BM_EtdStep(benchmark::State& state)
{
    SolverConfig cfg;
    cfg.n_modes = std::size_t(state.range(0));
    const EtdStepper stepper(cfg);
    SpectralField v = random_field(cfg.n_modes, 5);
    const SpectralField w = random_field(cfg.n_modes, 6) * 0.01;
    for (auto _ : state) {
        stepper.step(v, w, w);
        benchmark::DoNotOptimize(v);
    }
}

// Ensemble of short solves: serial reference against the OpenMP map.
double member_energy(std::size_t i)
{
    SolverConfig cfg;
    cfg.n_modes = 32;
    cfg.record_every = 100;
    const NoisePath path(split_seed(42, i), cfg.h);
    const NoiseSpec spec = NoiseSpec::from_profile(NoiseProfile::power_decay(0.1, 1.0), cfg.n_modes);
    return solve_endpoint(SpectralField(cfg.n_modes), 0.0, 0.1, path, spec, cfg).l2_norm_squared();
}

void BM_EnsembleSerial(benchmark::State& state)
{
    for (auto _ : state) benchmark::DoNotOptimize(ensemble_map_serial(std::size_t(state.range(0)), member_energy));
}

void BM_EnsembleParallel(benchmark::State& state)
{
    for (auto _ : state) benchmark::DoNotOptimize(ensemble_map(std::size_t(state.range(0)), member_energy, 0));
}

} // namespace

BENCHMARK(BM_NonlinearityDirect)->Arg(16)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(BM_NonlinearityPseudospectral)->Arg(16)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(BM_EtdStep)->Arg(32)->Arg(64)->Arg(128);
BENCHMARK(BM_EnsembleSerial)->Arg(16)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EnsembleParallel)->Arg(16)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
