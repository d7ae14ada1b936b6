#include "garma/estimator.hpp"
#include "garma/experiments.hpp"
#include "garma/forecaster.hpp"
#include "garma/io.hpp"
#include "garma/model.hpp"
#include "garma/simulator.hpp"

#include <benchmark/benchmark.h>

using namespace garma;

namespace {

SeriesFrame polio_frame() {
    const auto t = io::read_series_csv(std::filesystem::path(GARMAPL_DATA_DIR) / "polio.csv");
    return t.frame_with(polio_schema().build(t.counts.size()));
}

}  // namespace

static void BM_Evaluate(benchmark::State& state) {
    const auto scn = model1_scenario(static_cast<std::size_t>(state.range(0)), 1);
    const SeriesFrame f = simulate(scn);
    for (auto _ : state) {
        benchmark::DoNotOptimize(evaluate(scn.spec, scn.params, f, Order::Information));
    }
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_Evaluate)->RangeMultiplier(2)->Range(64, 1024)->Complexity();

static void BM_FitPolio(benchmark::State& state) {
    const SeriesFrame f = polio_frame().head(158);
    const ModelSpec spec{0, 2, 5, 0.1};
    for (auto _ : state) benchmark::DoNotOptimize(fit(spec, f));
}
BENCHMARK(BM_FitPolio)->Unit(benchmark::kMillisecond);

static void BM_FitModel1(benchmark::State& state) {
    const auto scn = model1_scenario(static_cast<std::size_t>(state.range(0)), 3);
    const SeriesFrame f = simulate(scn);
    for (auto _ : state) benchmark::DoNotOptimize(fit(scn.spec, f));
}
BENCHMARK(BM_FitModel1)->Arg(50)->Arg(100)->Arg(240)->Unit(benchmark::kMillisecond);

static void BM_OneStepPolio(benchmark::State& state) {
    const SeriesFrame all = polio_frame();
    const SeriesFrame f = all.head(158);
    const Vector x = all.covariates.row(158).transpose();
    PlOptions pl;
    pl.warm_start = state.range(0) != 0;
    for (auto _ : state) benchmark::DoNotOptimize(one_step_pl(ModelSpec{0, 2, 5, 0.1}, f, x, {}, {}, pl));
}
BENCHMARK(BM_OneStepPolio)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

static void BM_TwoStepModel1(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(two_step_study(100, 11));
}
BENCHMARK(BM_TwoStepModel1)->Unit(benchmark::kMillisecond)->Iterations(1);

BENCHMARK_MAIN();
