#include <benchmark/benchmark.h>

#include <random>

#include "minimod/propagator.hpp"

using namespace minimod;

namespace {

Field random_vp(const Grid3D& g, unsigned seed) {
    Field vp(g, "vp");
    std::mt19937 rng(seed);
    std::uniform_real_distribution<float> u(1500.0f, 4500.0f);
    for (auto& v : vp.data) v = u(rng);
    return vp;
}

void bench_acoustic_cd_step(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Grid3D g = make_grid({n, n, n}, {20, 20, 20});
    const Field vp = random_vp(g, 1);
    EngineOptions opts;
    opts.ndamping = {8, 8, 8};
    AcousticCdEngine<float> eng(g, {0, 0, 0}, g.n, vp, opts, 1e-3f, 4500.0);
    eng.step(1.0f, std::array<int, 3>{n / 2, n / 2, n / 2}); // light the wavefield
    for (auto _ : state) {
        eng.step(0.0f, std::nullopt);
        benchmark::DoNotOptimize(eng.pressure().data.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n) * n * n);
}

void bench_acoustic_vd_step(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Grid3D g = make_grid({n, n, n}, {20, 20, 20});
    const EarthModel m = constant_model(g, 1500.0f, std::nullopt, 1000.0f);
    EngineOptions opts;
    opts.ndamping = {8, 8, 8};
    AcousticVdEngine<float> eng(g, m, opts, 1e-3f);
    eng.step(1.0f, std::array<int, 3>{n / 2, n / 2, n / 2});
    for (auto _ : state) {
        eng.step(0.0f, std::nullopt);
        benchmark::DoNotOptimize(eng.pressure().data.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n) * n * n);
}

void bench_elastic_step(benchmark::State& state) {
    const int n = static_cast<int>(state.range(0));
    const Grid3D g = make_grid({n, n, n}, {20, 20, 20});
    const EarthModel m = constant_model(g, 1500.0f, 800.0f, 1000.0f);
    EngineOptions opts;
    opts.ndamping = {8, 8, 8};
    ElasticIsoEngine<float> eng(g, m, opts, 1e-3f);
    eng.step(1.0f, std::array<int, 3>{n / 2, n / 2, n / 2});
    for (auto _ : state) {
        eng.step(0.0f, std::nullopt);
        benchmark::DoNotOptimize(eng.velocity(0).data.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(n) * n * n);
}

} // namespace

BENCHMARK(bench_acoustic_cd_step)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(bench_acoustic_vd_step)->Arg(64)->Arg(128)->Unit(benchmark::kMillisecond);
BENCHMARK(bench_elastic_step)->Arg(64)->Arg(96)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
