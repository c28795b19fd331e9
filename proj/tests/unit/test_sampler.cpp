#include <map>
#include <set>

#include "gridsched/errors.hpp"
#include "gridsched/sampler.hpp"
#include "test_util.hpp"

using namespace gridsched;

namespace {

GridCase toy() { return load_case(testutil::data("cases/toy5.case")); }

}  // namespace

TEST(Sampler, WindowStartsAreDisjointAndInMonth) {
    Rng rng = make_rng(1);
    for (int month = 1; month <= 12; ++month) {
        for (int rep = 0; rep < 200; ++rep) {
            const auto starts = sample_window_starts(month, 3, 4, rng);
            ASSERT_EQ(starts.size(), 4u);
            EXPECT_GE(starts.front(), first_day_of_month(month));
            EXPECT_LE(starts.back() + 2, first_day_of_month(month) + days_in_month(month) - 1);
            for (std::size_t i = 1; i < starts.size(); ++i) EXPECT_GE(starts[i], starts[i - 1] + 3);
        }
    }
}

TEST(Sampler, WindowPlacementIsUniform) {
    // February with one 27-day window has exactly two placements.
    Rng rng = make_rng(2);
    std::map<int, int> hits;
    const int n = 4000;
    for (int i = 0; i < n; ++i) ++hits[sample_window_starts(2, 27, 1, rng)[0]];
    ASSERT_EQ(hits.size(), 2u);
    for (const auto& [day, count] : hits) EXPECT_NEAR(static_cast<double>(count) / n, 0.5, 0.03) << day;
    // Tight packing has a single placement.
    const auto tight = sample_window_starts(2, 7, 4, rng);
    EXPECT_EQ(tight, (std::vector<int>{32, 39, 46, 53}));
}

TEST(Sampler, TooManyWindowsRejected) {
    Rng rng = make_rng(3);
    EXPECT_THROW(sample_window_starts(2, 10, 3, rng), InfeasibleWindowError);
    const auto g = toy();
    SamplerParams p;
    p.w_s = 8;
    p.n_s = 4;
    EXPECT_THROW(sample_scenario(g, p, ProcessParams::defaults_for(g), rng), InfeasibleWindowError);
}

TEST(Sampler, ShapeAndCounts) {
    const auto g = toy();
    SamplerParams p;  // 3 x 4 days, 2 x 24 h, 12 months
    Rng rng = make_rng(4);
    const auto s = sample_scenario(g, p, ProcessParams::defaults_for(g), rng);
    ASSERT_EQ(s.months.size(), 12u);
    EXPECT_EQ(s.simulated_days(), 144u);
    EXPECT_EQ(s.simulated_hours(), 6912u);
    for (const auto& m : s.months) {
        ASSERT_EQ(m.windows.size(), 4u);
        for (const auto& w : m.windows) {
            ASSERT_EQ(w.days.size(), 3u);
            for (std::size_t d = 0; d < w.days.size(); ++d) {
                EXPECT_EQ(w.days[d].day_of_year, w.start_day + static_cast<int>(d));
                EXPECT_EQ(month_of_day(w.days[d].day_of_year), m.month);
                ASSERT_EQ(w.days[d].hour_windows.size(), 2u);
                EXPECT_EQ(w.days[d].hour_windows[0].start_hour, 0);
            }
        }
    }
}

TEST(Sampler, ConstantCostReconstructsYear) {
    SamplerParams p;
    double hours = 0.0;
    for (int m = 1; m <= 12; ++m) {
        const double days = p.n_s * p.w_s * scenario_weight(p, m);
        EXPECT_DOUBLE_EQ(days, days_in_month(m));
        hours += p.n_s * p.w_s * scenario_weight(p, m) * p.n_rt * p.w_rt * hour_weight(p);
    }
    EXPECT_DOUBLE_EQ(hours, 8760.0);
}

TEST(Sampler, WalkRestartsEachWindow) {
    const auto g = toy();
    SamplerParams p;
    p.w_rt = 6;
    p.n_rt = 3;
    p.months = 2;
    auto proc = ProcessParams::defaults_for(g);
    Rng rng = make_rng(5);
    const auto s = sample_scenario(g, p, proc, rng);
    for (const auto& m : s.months)
        for (const auto& w : m.windows)
            for (const auto& d : w.days)
                for (const auto& hw : d.hour_windows) {
                    EXPECT_GE(hw.start_hour, 0);
                    EXPECT_LE(hw.start_hour, 18);
                    ASSERT_EQ(hw.hours.size(), 6u);
                    // First-hour error is a single step from zero: bounded by a few sigma.
                    const double sd = proc.load_walk_noise_frac * d.forecast.load(1, 0);
                    EXPECT_LT(std::abs(hw.hours[0].load_delta(1)), 6.0 * sd);
                }
}

TEST(Sampler, DeterministicAcrossWorkers) {
    const auto g = toy();
    SamplerParams p;
    p.months = 4;
    const auto proc = ProcessParams::defaults_for(g);
    Rng a = make_rng(77), b = make_rng(77);
    const auto s1 = sample_scenario(g, p, proc, a, 1);
    const auto s4 = sample_scenario(g, p, proc, b, 4);
    EXPECT_EQ(dump_scenario(s1), dump_scenario(s4));
    Rng c = make_rng(78);
    EXPECT_NE(dump_scenario(sample_scenario(g, p, proc, c, 1)), dump_scenario(s1));
}

TEST(Sampler, ParamValidation) {
    SamplerParams p;
    p.w_rt = 25;
    EXPECT_THROW(p.validate(), ValidationError);
    p = {};
    p.months = 0;
    EXPECT_THROW(p.validate(), ValidationError);
    p = {};
    p.n_s = 0;
    EXPECT_THROW(p.validate(), ValidationError);
}
