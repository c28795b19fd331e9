#include <benchmark/benchmark.h>

#include "gridsched/proxy.hpp"

using namespace gridsched;

static void BM_NnLookupToy(benchmark::State& state) {
    const auto grid = load_case(std::string(GRIDSCHED_DATA_DIR) + "/cases/toy5.case");
    const auto ds = proxy::load_dataset(std::string(GRIDSCHED_DATA_DIR) + "/fixtures/toy5/proxy_dataset.json", grid);
    const auto process = ProcessParams::defaults_for(grid);
    Rng rng = make_rng(3);
    std::vector<proxy::UcQuery> queries;
    for (int i = 0; i < 64; ++i) queries.push_back(proxy::sample_query(grid, ds.outages, static_cast<proxy::TopologyKey>(i % 4), 3, process, rng));
    std::size_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(&proxy::nn_lookup(grid, ds, queries[i++ % queries.size()]));
}
BENCHMARK(BM_NnLookupToy)->Unit(benchmark::kMicrosecond);

BENCHMARK_MAIN();
