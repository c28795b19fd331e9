#include <benchmark/benchmark.h>

#include "gridsched/rt.hpp"
#include "gridsched/uc.hpp"

using namespace gridsched;

namespace {

struct Day {
    GridCase grid;
    DayAheadForecast forecast;
};

Day day(const char* case_name) {
    Day d{load_case(std::string(GRIDSCHED_DATA_DIR) + "/cases/" + case_name), {}};
    const auto p = ProcessParams::defaults_for(d.grid);
    Rng rng = make_rng(5);
    d.forecast = sample_day_ahead(d.grid, 15, seasonal_mean(1, p), p, rng);
    return d;
}

}  // namespace

static void BM_SolveUcToy(benchmark::State& state) {
    const auto d = day("toy5.case");
    const auto top = Topology::all_in_service(d.grid);
    for (auto _ : state) benchmark::DoNotOptimize(solve_uc(d.grid, top, d.forecast, unconstrained_start(d.grid)).cost);
}
BENCHMARK(BM_SolveUcToy)->Unit(benchmark::kMillisecond);

static void BM_SolveRtToy(benchmark::State& state) {
    const auto d = day("toy5.case");
    const auto top = Topology::all_in_service(d.grid);
    const auto uc = solve_uc(d.grid, top, d.forecast, unconstrained_start(d.grid));
    auto st = HourlyRealization::start(d.grid);
    st.wind = d.forecast.wind.col(12) * 0.9;
    st.load = d.forecast.load.col(12) * 1.02;
    for (auto _ : state) benchmark::DoNotOptimize(solve_rt(d.grid, top, st, uc, 12, nullptr).total_cost);
}
BENCHMARK(BM_SolveRtToy)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
