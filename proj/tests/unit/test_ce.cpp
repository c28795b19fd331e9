#include <cmath>
#include <map>

#include "gridsched/ce.hpp"
#include "gridsched/errors.hpp"
#include "test_util.hpp"

using namespace gridsched;
using namespace gridsched::ce;

namespace {

std::vector<OutageRequirement> reqs3() {
    return {{10, 1, {1, 2, 3, 4}}, {20, 2, {3, 4, 5, 6, 7}}, {30, 1, {12}}};
}

// Synthetic assessment: cost grows with the month distance from a target.
ScheduleMetrics synthetic(const OutageSchedule& s, const std::vector<int>& target) {
    ScheduleMetrics m;
    double cost = 0.0;
    for (std::size_t r = 0; r < s.rows.size(); ++r)
        for (int month = 1; month <= 12; ++month)
            if (s.out_in(r, month)) cost += 100.0 * std::abs(month - target[r]);
    m.expected_cost = cost;
    m.p_reliability_ok = 1.0;
    m.p_shed_ok = 1.0;
    m.per_scenario.resize(1);
    return m;
}

}  // namespace

TEST(Ce, MonthCombinations) {
    const auto c = month_combinations({3, 4, 5, 6, 7}, 2);
    EXPECT_EQ(c.size(), 10u);
    EXPECT_EQ(c.front(), (std::vector<int>{3, 4}));
    EXPECT_EQ(c.back(), (std::vector<int>{6, 7}));
    EXPECT_EQ(month_combinations({1, 2}, 2).size(), 1u);
    const auto three = month_combinations({1, 3, 5, 7, 9}, 3);
    EXPECT_EQ(three.size(), 10u);
    EXPECT_EQ(three[1], (std::vector<int>{1, 3, 7}));
    EXPECT_EQ(three.back(), (std::vector<int>{5, 7, 9}));
    EXPECT_TRUE(month_combinations({1, 2}, 3).empty());
}

TEST(Ce, ScheduleFeasibilityAndKey) {
    const auto r = reqs3();
    auto s = empty_schedule(r);
    EXPECT_FALSE(is_feasible(s, r));
    s.rows[0][1] = 1;
    s.rows[1][2] = s.rows[1][6] = 1;
    s.rows[2][11] = 1;
    EXPECT_TRUE(is_feasible(s, r));
    EXPECT_EQ(s.key(), "10:2;20:3,7;30:12");
    EXPECT_EQ(s.lines_out(3), (std::vector<int>{20}));
    s.rows[0][7] = 1;  // month 8 not allowed, count now 2
    EXPECT_FALSE(is_feasible(s, r));
}

TEST(Ce, InitialDistributionIsUniform) {
    const auto r = reqs3();
    const auto d = CeDistribution::initial(r);
    ASSERT_EQ(d.p.size(), 3u);
    for (const auto& row : d.p)
        for (double v : row) EXPECT_EQ(v, 0.5);
}

TEST(Ce, SamplesAreAlwaysFeasible) {
    const auto r = reqs3();
    Rng rng = make_rng(1);
    CeDistribution d = CeDistribution::initial(r);
    for (int i = 0; i < 2000; ++i) {
        for (auto& row : d.p)
            for (auto& v : row) v = uniform01(rng) < 0.3 ? 0.0 : uniform01(rng);
        std::vector<std::size_t> degen;
        const auto s = sample_schedule(d, r, rng, &degen);
        EXPECT_TRUE(is_feasible(s, r)) << s.key();
    }
}

TEST(Ce, SamplingFollowsWeights) {
    const std::vector<OutageRequirement> r{{1, 1, {1, 2, 3}}};
    CeDistribution d{{{0.6, 0.3, 0.1, 0, 0, 0, 0, 0, 0, 0, 0, 0}}};
    Rng rng = make_rng(2);
    std::map<std::string, int> hits;
    const int n = 20000;
    for (int i = 0; i < n; ++i) ++hits[sample_schedule(d, r, rng).key()];
    EXPECT_NEAR(hits["1:1"] / double(n), 0.6, 0.015);
    EXPECT_NEAR(hits["1:2"] / double(n), 0.3, 0.015);
    EXPECT_NEAR(hits["1:3"] / double(n), 0.1, 0.015);
}

TEST(Ce, DegenerateRowFallsBackToUniform) {
    const std::vector<OutageRequirement> r{{1, 1, {4, 5}}};
    CeDistribution d{{{}}};
    d.p[0].fill(0.0);
    Rng rng = make_rng(3);
    std::vector<std::size_t> degen;
    const auto s = sample_schedule(d, r, rng, &degen);
    EXPECT_TRUE(is_feasible(s, r));
    EXPECT_EQ(degen, (std::vector<std::size_t>{0}));
}

TEST(Ce, EliteUpdateIsEliteMean) {
    const std::vector<OutageRequirement> r{{1, 1, {1, 2, 3, 4}}};
    std::vector<OutageSchedule> samples;
    std::vector<double> costs{5, 1, 3, 2, 9, 1};
    const std::vector<int> month{1, 2, 2, 3, 4, 4};
    for (int m : month) {
        auto s = empty_schedule(r);
        s.rows[0][static_cast<std::size_t>(m - 1)] = 1;
        samples.push_back(s);
    }
    EXPECT_EQ(elite_size(6, 0.5), 3u);
    EXPECT_EQ(elite_size(75, 0.15), 12u);
    const auto d = CeDistribution::initial(r);
    // Elite: costs 1 (idx 1, month 2), 1 (idx 5, month 4), 2 (idx 3, month 3).
    const auto next = update_distribution(d, samples, costs, 0.5);
    EXPECT_NEAR(next.p[0][0], 0.0, 1e-15);
    EXPECT_NEAR(next.p[0][1], 1.0 / 3, 1e-15);
    EXPECT_NEAR(next.p[0][2], 1.0 / 3, 1e-15);
    EXPECT_NEAR(next.p[0][3], 1.0 / 3, 1e-15);
    const auto half = update_distribution(d, samples, costs, 0.5, 0.5);
    // Half of the raw elite mean plus half of the previous 0.5.
    EXPECT_NEAR(half.p[0][0], 0.25, 1e-15);
    EXPECT_NEAR(half.p[0][1], 0.5 * (1.0 / 3) + 0.25, 1e-15);
}

TEST(Ce, EntropyValues) {
    const std::vector<OutageRequirement> r{{1, 1, {1, 2}}};
    auto d = CeDistribution::initial(r);
    EXPECT_NEAR(entropy(d), 12.0 * std::log(2.0), 1e-12);
    d.p[0].fill(0.0);
    d.p[0][0] = 1.0;
    EXPECT_DOUBLE_EQ(entropy(d), 0.0);
    d.p[0][1] = 0.5;
    EXPECT_NEAR(entropy(d), std::log(2.0), 1e-15);
}

TEST(Ce, PenalizedCostBarrier) {
    const auto b = BarrierParams::from_scale(5000.0);
    EXPECT_DOUBLE_EQ(b.kappa, 50000.0);
    EXPECT_DOUBLE_EQ(b.lambda, 5e6);
    EXPECT_DOUBLE_EQ(BarrierParams::from_scale(0.1).kappa, 10.0);
    ScheduleMetrics m;
    m.expected_cost = 100.0;
    m.p_reliability_ok = 0.75;
    m.p_shed_ok = 1.0;
    ChanceThresholds thr;  // alpha 0.05
    const BarrierParams k{10.0, 1000.0};
    EXPECT_NEAR(penalized_cost(m, thr, k), 100.0 + 10.0 * 0.2 + 1000.0 * 0.04, 1e-9);
    m.p_reliability_ok = 0.95;
    EXPECT_DOUBLE_EQ(penalized_cost(m, thr, k), 100.0);
}

TEST(Ce, Quartiles) {
    const auto q = quartiles({4, 1, 3, 2, 5});
    EXPECT_DOUBLE_EQ(q.q1, 2.0);
    EXPECT_DOUBLE_EQ(q.median, 3.0);
    EXPECT_DOUBLE_EQ(q.q3, 4.0);
}

TEST(Ce, OptimizeFindsSyntheticTarget) {
    const auto r = reqs3();
    const std::vector<int> target{3, 5, 12};
    CeParams p;
    p.n_samples = 60;
    p.rho = 0.15;
    p.max_iters = 40;
    Rng rng = make_rng(4);
    const auto res = optimize(r, {}, p, [&](const OutageSchedule& s, std::size_t) { return synthetic(s, target); }, rng);
    EXPECT_TRUE(res.converged);
    // Line 20 needs two months; the closest pair to 5 is {4,5} or {5,6} (both cost 100).
    EXPECT_EQ(res.schedule.rows[0][2], 1);
    EXPECT_EQ(res.schedule.rows[1][4], 1);
    EXPECT_TRUE(is_feasible(res.schedule, r));
    EXPECT_EQ(res.p_history.size(), res.trace.size() + 1);
    EXPECT_LT(res.trace.back().entropy, 0.03);
    for (std::size_t i = 1; i < res.trace.size(); ++i)
        EXPECT_LE(res.trace[i].best_ever_cost, res.trace[i - 1].best_ever_cost);
    for (const auto& row : res.p_history.back().p)
        for (double v : row) EXPECT_TRUE(v < 0.01 || v > 0.99);
}

TEST(Ce, OptimizeIsDeterministicAcrossWorkers) {
    const auto r = reqs3();
    const std::vector<int> target{2, 6, 12};
    CeParams p;
    p.n_samples = 40;
    p.max_iters = 40;
    auto fn = [&](const OutageSchedule& s, std::size_t) { return synthetic(s, target); };
    Rng a = make_rng(9), b = make_rng(9);
    const auto r1 = optimize(r, {}, p, fn, a);
    p.workers = 4;
    const auto r4 = optimize(r, {}, p, fn, b);
    EXPECT_EQ(r1.schedule, r4.schedule);
    EXPECT_EQ(r1.trace.size(), r4.trace.size());
    EXPECT_EQ(r1.best_ever_cost, r4.best_ever_cost);
}

TEST(Ce, MaxIterationsCarriesPartialResult) {
    const auto r = reqs3();
    CeParams p;
    p.n_samples = 20;
    p.rho = 0.5;
    p.max_iters = 2;
    p.eps_entropy = 1e-9;
    Rng rng = make_rng(5);
    try {
        optimize(r, {}, p, [&](const OutageSchedule& s, std::size_t) { return synthetic(s, {1, 3, 12}); }, rng);
        FAIL() << "expected MaxIterationsError";
    } catch (const MaxIterationsError& e) {
        EXPECT_EQ(e.partial().trace.size(), 2u);
        EXPECT_FALSE(e.partial().converged);
        EXPECT_TRUE(is_feasible(e.partial().schedule, r));
    }
}

TEST(Ce, ParamValidation) {
    CeParams p;
    p.rho = 0.0;
    EXPECT_THROW(p.validate(), ValidationError);
    OutageRequirement q{1, 3, {1, 2}};
    EXPECT_THROW(q.validate(), ValidationError);
}
