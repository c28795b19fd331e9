#include <cmath>

#include "gridsched/errors.hpp"
#include "gridsched/rt.hpp"
#include "gridsched/uc.hpp"
#include "test_util.hpp"

using namespace gridsched;

namespace {

struct Day {
    GridCase grid;
    Topology top;
    DayAheadForecast forecast;
    UcSolution uc;
};

Day make_day(int hours = 6) {
    Day d;
    d.grid = load_case(testutil::data("cases/toy5.case"));
    d.top = Topology::all_in_service(d.grid);
    auto p = ProcessParams::defaults_for(d.grid);
    p.p_w_sigma = p.p_d_sigma = 0.0;
    Rng rng = make_rng(0);
    d.forecast = sample_day_ahead(d.grid, 20, seasonal_mean(1, p), p, rng);
    d.forecast.wind = d.forecast.wind.leftCols(hours).eval();
    d.forecast.load = d.forecast.load.leftCols(hours).eval();
    d.uc = solve_uc(d.grid, d.top, d.forecast, unconstrained_start(d.grid));
    return d;
}

HourlyRealization at_forecast(const Day& d, int h) {
    auto r = HourlyRealization::start(d.grid);
    r.wind = d.forecast.wind.col(h);
    r.load = d.forecast.load.col(h);
    return r;
}

void expect_balanced(const Day& d, const HourlyRealization& st, const RtDecision& r) {
    const double supply = r.dispatch_mw.sum() + st.wind.sum() - r.curtail_mw() + r.shed_mw() - r.spill_mw.sum();
    EXPECT_NEAR(supply, st.load.sum(), 1e-6);
    // Flows from the returned angles respect limits.
    const auto dc = dc_matrices(d.grid, d.top, IslandPolicy::Allow);
    const Eigen::VectorXd f = d.grid.base_mva * (dc.b_f * r.angles_rad);
    for (std::size_t l = 0; l < d.grid.n_lines(); ++l)
        EXPECT_LE(std::abs(f(static_cast<Eigen::Index>(l))), d.grid.lines[l].flow_limit_mw + 1e-6);
    for (std::size_t g = 0; g < d.grid.n_gens(); ++g) {
        const auto gi = static_cast<Eigen::Index>(g);
        const auto& gen = d.grid.dispatchable_generators[g];
        if (r.commitment(gi)) {
            EXPECT_GE(r.dispatch_mw(gi), gen.p_min_mw - 1e-6);
            EXPECT_LE(r.dispatch_mw(gi), gen.p_max_mw + 1e-6);
        } else {
            EXPECT_EQ(r.dispatch_mw(gi), 0.0);
        }
    }
}

}  // namespace

TEST(Rt, ForecastRealizationNeedsNoRedispatch) {
    const auto d = make_day();
    for (int h = 0; h < d.uc.hours(); ++h) {
        const auto st = at_forecast(d, h);
        const auto r = solve_rt(d.grid, d.top, st, d.uc, h, nullptr);
        EXPECT_NEAR(r.redispatch_cost, 0.0, 1e-6) << "hour " << h;
        EXPECT_NEAR(r.shed_mw(), d.uc.load_shed_mw.col(h).sum(), 1e-6);
        expect_balanced(d, st, r);
        EXPECT_NEAR(rt_operating_cost(r), r.total_cost - r.shed_cost, 1e-12);
    }
}

TEST(Rt, DeviationCostsAtLeastBlockPrice) {
    const auto d = make_day();
    auto st = at_forecast(d, 2);
    st.load(1) += 20.0;
    const auto r = solve_rt(d.grid, d.top, st, d.uc, 2, nullptr);
    expect_balanced(d, st, r);
    // 20 MW of extra energy at no less than the cheapest block price.
    EXPECT_GE(r.redispatch_cost + r.shed_cost + 1e-6, 20.0 * 18.0);
    EXPECT_EQ(r.commitment, d.uc.commitment.col(2));
}

TEST(Rt, RampsAnchorToPreviousHour) {
    const auto d = make_day();
    const auto st0 = at_forecast(d, 0);
    const auto r0 = solve_rt(d.grid, d.top, st0, d.uc, 0, nullptr);
    auto st1 = at_forecast(d, 1);
    st1.load(1) += 200.0;
    const auto r1 = solve_rt(d.grid, d.top, st1, d.uc, 1, &r0);
    expect_balanced(d, st1, r1);
    for (std::size_t g = 0; g < d.grid.n_gens(); ++g) {
        const auto gi = static_cast<Eigen::Index>(g);
        if (r0.commitment(gi) && r1.commitment(gi)) {
            EXPECT_LE(r1.dispatch_mw(gi) - r0.dispatch_mw(gi), d.grid.dispatchable_generators[g].ramp_up_mw_per_h + 1e-6);
        }
    }
}

TEST(Rt, ShortfallIsShed) {
    const auto d = make_day();
    auto st = at_forecast(d, 3);
    st.load *= 3.0;
    st.wind.setZero();
    const auto r = solve_rt(d.grid, d.top, st, d.uc, 3, nullptr);
    expect_balanced(d, st, r);
    EXPECT_GT(r.shed_mw(), 1.0);
    EXPECT_NEAR(r.shed_cost, d.grid.voll * r.shed_mw(), 1e-6);
}

TEST(Rt, EmergencyCommitOnlyWhenAllowed) {
    auto d = make_day();
    // Force the peaker offline in the baseline and create a shortage it could cover.
    d.uc.commitment.row(1).setZero();
    d.uc.dispatch_mw.row(1).setZero();
    auto st = at_forecast(d, 2);
    st.load *= 1.8;
    st.wind.setZero();
    const auto plain = solve_rt(d.grid, d.top, st, d.uc, 2, nullptr);
    EXPECT_EQ(plain.commitment(1), 0);
    RtOptions opt;
    opt.allow_emergency_commit = true;
    const auto em = solve_rt(d.grid, d.top, st, d.uc, 2, nullptr, opt);
    EXPECT_EQ(em.commitment(1), 1);
    EXPECT_LT(em.total_cost, plain.total_cost);
    // Each emergency unit pays its hot start and no-load cost.
    double expected = 0.0;
    for (std::size_t g = 0; g < d.grid.n_gens(); ++g) {
        const auto gi = static_cast<Eigen::Index>(g);
        const auto& gen = d.grid.dispatchable_generators[g];
        if (em.commitment(gi) && !d.uc.commitment(gi, 2)) expected += gen.hot_start_cost() + gen.no_load_cost;
    }
    EXPECT_GE(expected, 180.0);
    EXPECT_NEAR(em.startup_cost, expected, 1e-9);
}

TEST(Rt, RejectsBadHour) {
    const auto d = make_day(3);
    EXPECT_THROW(solve_rt(d.grid, d.top, at_forecast(d, 0), d.uc, 3, nullptr), ValidationError);
}
