#include <benchmark/benchmark.h>

#include "plrn/geometry.hpp"

static void BM_InnerParallel720(benchmark::State& state) {
    const auto disk = plrn::geo::regular_polygon(720, 1.0);
    for (auto _ : state) {
        auto ip = plrn::geo::inner_parallel(disk, 0.3);
        benchmark::DoNotOptimize(ip);
    }
}
BENCHMARK(BM_InnerParallel720);

static void BM_LevelSlice(benchmark::State& state) {
    const auto outer = plrn::geo::ConvexPolygon::make({{0, 0}, {2, 0}, {2, 2}, {0, 2}});
    plrn::geo::Polygon hole{{{0.75, 0.75}, {1.25, 0.75}, {1.25, 1.25}, {0.75, 1.25}}};
    const auto dom = plrn::geo::DomainWithHoles::make(outer, {hole});
    for (auto _ : state) {
        auto s = plrn::geo::level_slice(dom, 0.3);
        benchmark::DoNotOptimize(s);
    }
}
BENCHMARK(BM_LevelSlice);
