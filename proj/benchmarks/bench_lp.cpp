#include <benchmark/benchmark.h>

#include "gridsched/fixtures.hpp"
#include "gridsched/lp.hpp"

using namespace gridsched;

static void BM_SolveMilpRandom(benchmark::State& state) {
    Rng rng = make_rng(17);
    std::vector<lp::MixedIntegerProgram> mips;
    for (int i = 0; i < 16; ++i) mips.push_back(fixtures::random_milp(rng, static_cast<int>(state.range(0))));
    std::size_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(lp::solve_milp(mips[i++ % mips.size()]).objective);
}
BENCHMARK(BM_SolveMilpRandom)->Arg(6)->Arg(10)->Arg(14);

static void BM_BruteForceRandom(benchmark::State& state) {
    Rng rng = make_rng(17);
    std::vector<lp::MixedIntegerProgram> mips;
    for (int i = 0; i < 16; ++i) mips.push_back(fixtures::random_milp(rng, static_cast<int>(state.range(0))));
    std::size_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(lp::brute_force_milp(mips[i++ % mips.size()]).objective);
}
BENCHMARK(BM_BruteForceRandom)->Arg(6)->Arg(10);

BENCHMARK_MAIN();
