// Serial reference vs OpenMP path for each parallel kernel. The second
// benchmark argument selects the path: 0 serial, 1 parallel.

#include <benchmark/benchmark.h>

#include <random>

#include "hamcenter/annulus.hpp"
#include "hamcenter/compactify.hpp"
#include "hamcenter/corpus.hpp"
#include "hamcenter/kernels.hpp"

using namespace hamcenter;

namespace {

Exec exec_of(const benchmark::State& st) { return st.range(1) ? Exec::parallel : Exec::serial; }

void BM_HamiltonianGrid(benchmark::State& st) {
    const PlanarMap m = builtin_map("example3");
    const int n = static_cast<int>(st.range(0));
    const GridSpec g{{-4, 4, -4, 4}, n, n};
    for (auto _ : st) benchmark::DoNotOptimize(hamiltonian_grid(m, g, exec_of(st)));
    st.SetItemsProcessed(st.iterations() * n * n);
}

void BM_MultistartNewton(benchmark::State& st) {
    const PlanarMap m = builtin_map("example3");
    const int n = static_cast<int>(st.range(0));
    const Box box{-20, 20, -8, 8};
    const GridSpec g{box, n, n};
    std::vector<Vec2> seeds;
    for (int k = 0; k < n; ++k)
        for (int i = 0; i < n; ++i) seeds.push_back(g.center(i, k));
    for (auto _ : st) benchmark::DoNotOptimize(multistart_newton(m, seeds, {0, 0}, box, 1e-10, 50, exec_of(st)));
    st.SetItemsProcessed(st.iterations() * n * n);
}

void BM_MapPoints(benchmark::State& st) {
    const PlanarMap m = builtin_map("example2");
    std::mt19937_64 rng(42);
    std::uniform_real_distribution<double> u(-5, 5);
    std::vector<Vec2> pts(static_cast<std::size_t>(st.range(0)));
    for (auto& p : pts) p = {u(rng), u(rng)};
    std::vector<char> ok;
    for (auto _ : st) benchmark::DoNotOptimize(map_points(m, pts, ok, exec_of(st)));
    st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_RegionSampler(benchmark::State& st) {
    const PlanarMap m = builtin_map("example1");
    const int n = static_cast<int>(st.range(0));
    for (auto _ : st) {
        RegionSampler s(m, {0, 0}, 0.4, GridSpec{{-3, 3, -3, 3}, n, n}, exec_of(st));
        benchmark::DoNotOptimize(s);
    }
}

// Whole bisection plus the post-pass over eight certificates.
void BM_EstimateEll(benchmark::State& st) {
    const PlanarMap m = builtin_map("example1");
    const CenterRecord c = classify_center(m, {0, 0}, false);
    AnnulusOptions opt;
    opt.exec = exec_of(st);
    for (auto _ : st) benchmark::DoNotOptimize(estimate_ell(m, c, opt));
}

void BM_SectorFan(benchmark::State& st) {
    const PlanarMap m = builtin_map("example2");
    const CompactifiedField cf = build_compactification(*effective_hamiltonian_poly(m));
    const InfinityScan scan = infinite_singularities(cf);
    SectorOptions opt;
    opt.fan_n = static_cast<int>(st.range(0));
    opt.exec = exec_of(st);
    for (auto _ : st) {
        for (auto p : scan.points) {
            classify_sectors(cf, p, opt);
            benchmark::DoNotOptimize(p);
        }
    }
}

}  // namespace

BENCHMARK(BM_HamiltonianGrid)->ArgsProduct({{256, 1024}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MultistartNewton)->ArgsProduct({{64, 256}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_MapPoints)->ArgsProduct({{1 << 16}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_RegionSampler)->ArgsProduct({{400}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_EstimateEll)->ArgsProduct({{0}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SectorFan)->ArgsProduct({{32, 128}, {0, 1}})->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
