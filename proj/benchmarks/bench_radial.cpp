#include <benchmark/benchmark.h>

#include "plrn/radial.hpp"

static void BM_FirstEigenvalueP2(benchmark::State& state) {
    const auto params = plrn::radial::ProblemParams::make(2.0, 2, 1.0);
    const auto ann = plrn::geo::AnnulusSpec::make(2, 1.0, 2.0);
    for (auto _ : state) {
        auto eig = plrn::radial::first_eigenvalue(params, ann, state.range(0));
        benchmark::DoNotOptimize(eig);
    }
}
BENCHMARK(BM_FirstEigenvalueP2)->Arg(512)->Arg(4096);

static void BM_FirstEigenvalueP3(benchmark::State& state) {
    const auto params = plrn::radial::ProblemParams::make(3.0, 2, 1.0);
    const auto ann = plrn::geo::AnnulusSpec::make(2, 1.0, 2.0);
    for (auto _ : state) {
        auto eig = plrn::radial::first_eigenvalue(params, ann, state.range(0));
        benchmark::DoNotOptimize(eig);
    }
}
BENCHMARK(BM_FirstEigenvalueP3)->Arg(512)->Arg(4096);

static void BM_TorsionRadial(benchmark::State& state) {
    const auto params = plrn::radial::ProblemParams::make(3.0, 2, 1.0);
    const auto ann = plrn::geo::AnnulusSpec::make(2, 1.0, 2.0);
    for (auto _ : state) {
        auto t = plrn::radial::torsion(params, ann, 2048);
        benchmark::DoNotOptimize(t);
    }
}
BENCHMARK(BM_TorsionRadial);
