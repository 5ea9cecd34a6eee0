#include <benchmark/benchmark.h>

#include "plrn/bessel.hpp"

static void BM_BesselSeries(benchmark::State& state) {
    double x = 0.5;
    for (auto _ : state) {
        auto e = plrn::p2::bessel(1.0, x);
        benchmark::DoNotOptimize(e);
        x = x < 11.0 ? x + 0.37 : 0.5;
    }
}
BENCHMARK(BM_BesselSeries);

static void BM_BesselAsymptotic(benchmark::State& state) {
    double x = 13.0;
    for (auto _ : state) {
        auto e = plrn::p2::bessel(1.0, x);
        benchmark::DoNotOptimize(e);
        x = x < 48.0 ? x + 0.37 : 13.0;
    }
}
BENCHMARK(BM_BesselAsymptotic);

BENCHMARK_MAIN();
