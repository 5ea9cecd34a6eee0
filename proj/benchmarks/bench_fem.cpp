#include <benchmark/benchmark.h>

#include "plrn/fem.hpp"

namespace {
plrn::fem::Mesh make_mesh(double h) {
    const auto outer = plrn::geo::regular_polygon(256, 2.0);
    plrn::geo::Polygon inner;
    inner.vertices = plrn::geo::regular_polygon(256, 1.0).vertices();
    const auto dom = plrn::geo::DomainWithHoles::make(outer, {inner});
    return plrn::fem::generate_mesh(dom, h);
}
} // namespace

static void BM_GenerateMesh(benchmark::State& state) {
    const double h = 1.0 / state.range(0);
    for (auto _ : state) {
        auto mesh = make_mesh(h);
        benchmark::DoNotOptimize(mesh);
    }
}
BENCHMARK(BM_GenerateMesh)->Arg(10)->Arg(20);

static void BM_EigenP2(benchmark::State& state) {
    const auto mesh = make_mesh(1.0 / state.range(0));
    const auto params = plrn::radial::ProblemParams::make(2.0, 2, 1.0);
    for (auto _ : state) {
        auto f = plrn::fem::eigen_fem(params, mesh);
        benchmark::DoNotOptimize(f);
    }
}
BENCHMARK(BM_EigenP2)->Arg(10)->Arg(20);
