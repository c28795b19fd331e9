#include <cmath>

#include "gridsched/errors.hpp"
#include "gridsched/reliability.hpp"
#include "test_util.hpp"

using namespace gridsched;

namespace {

// Triangle 1-2-3 plus a stub 3-4 with no injection at bus 4.
GridCase triangle(double limit_12) {
    GridCase g;
    g.name = "tri";
    for (int b = 1; b <= 4; ++b) g.buses.push_back({b, 0.0, 0});
    g.lines.push_back({1, 1, 2, 0.1, limit_12});
    g.lines.push_back({2, 2, 3, 0.1, 100.0});
    g.lines.push_back({3, 1, 3, 0.1, 100.0});
    g.lines.push_back({4, 3, 4, 0.1, 100.0});
    g.reference_buses = {1};
    return g;
}

Eigen::VectorXd injections(double p) {
    Eigen::VectorXd inj(4);
    inj << p, 0.0, -p, 0.0;
    return inj;
}

}  // namespace

TEST(Reliability, ContingencyListSortedByLineId) {
    auto g = triangle(100);
    std::swap(g.lines[0], g.lines[2]);
    auto t = Topology::all_in_service(g);
    t.line_status[1] = false;
    const auto list = contingency_list(g, t);
    ASSERT_EQ(list.size(), 3u);
    EXPECT_EQ(list[0].line_id, 1);
    EXPECT_EQ(list[1].line_id, 3);
    EXPECT_EQ(list[2].line_id, 4);
    EXPECT_EQ(g.lines[list[0].line].id, 1);
}

TEST(Reliability, DcFlowsSplitByReactance) {
    const auto g = triangle(100);
    const auto f = DcFeasibilityChecker::flows(g, Topology::all_in_service(g), injections(90));
    EXPECT_NEAR(f(0), 30.0, 1e-9);
    EXPECT_NEAR(f(1), 30.0, 1e-9);
    EXPECT_NEAR(f(2), 60.0, 1e-9);
    EXPECT_NEAR(f(3), 0.0, 1e-9);
}

TEST(Reliability, PostContingencyOverload) {
    const DcFeasibilityChecker checker;
    const auto g = triangle(80);
    const auto pre = Topology::all_in_service(g);
    auto post = pre;
    post.line_status[2] = false;  // 1-3 out: 90 MW over 1-2 (limit 80)
    EXPECT_FALSE(checker.feasible(g, pre, post, injections(90)));
    post = pre;
    post.line_status[0] = false;  // 1-2 out: 90 MW over 1-3
    EXPECT_TRUE(checker.feasible(g, pre, post, injections(90)));
    EXPECT_TRUE(checker.feasible(g, pre, post, injections(70)));
    post = pre;
    post.line_status[2] = false;
    EXPECT_TRUE(checker.feasible(g, pre, post, injections(70)));
}

TEST(Reliability, IslandingRules) {
    const DcFeasibilityChecker checker;
    const auto g = triangle(100);
    const auto pre = Topology::all_in_service(g);
    auto post = pre;
    post.line_status[3] = false;  // bus 4 carries nothing: harmless
    EXPECT_TRUE(checker.feasible(g, pre, post, injections(50)));
    Eigen::VectorXd inj = injections(50);
    inj(2) = -30.0;
    inj(3) = -20.0;  // now bus 4 holds load
    EXPECT_FALSE(checker.feasible(g, pre, post, inj));
}

TEST(Reliability, StateReliabilityCountsContingencies) {
    const auto g = triangle(80);
    const auto top = Topology::all_in_service(g);
    HourlyRealization st;
    st.wind = Eigen::VectorXd::Zero(0);
    st.load = Eigen::VectorXd::Zero(4);
    st.load(2) = 90.0;
    RtDecision d;
    d.dispatch_mw = Eigen::VectorXd::Zero(0);
    d.wind_curtail_mw = Eigen::VectorXd::Zero(0);
    d.load_shed_mw = Eigen::VectorXd::Zero(4);
    // No generators in this case: place the supply as negative shedding at bus 1.
    d.load_shed_mw(0) = 90.0;
    const DcFeasibilityChecker checker;
    const auto inj = net_injections(g, st, d);
    EXPECT_NEAR(inj(0), 90.0, 1e-12);
    EXPECT_NEAR(inj(2), -90.0, 1e-12);
    // Lines 1, 2 and 4 survive; losing 1-3 overloads 1-2.
    EXPECT_DOUBLE_EQ(state_reliability(g, top, st, d, checker), 0.75);
    Topology none = top;
    for (std::size_t l = 0; l < none.size(); ++l) none.line_status[l] = false;
    EXPECT_DOUBLE_EQ(state_reliability(g, none, st, d, checker), 1.0);
}

TEST(Reliability, ChanceEvaluation) {
    ChanceThresholds thr;
    thr.r_min = 0.8;
    thr.shed_max_frac = 0.01;
    thr.alpha_r = 0.25;
    thr.alpha_shed = 0.0;
    std::vector<ScenarioMetrics> s(4);
    s[0].mean_reliability = 0.9;
    s[1].mean_reliability = 0.8;
    s[2].mean_reliability = 0.85;
    s[3].mean_reliability = 0.5;
    s[3].mean_shed_mw = 2.0;
    const auto r = evaluate_chance(s, thr, 100.0);
    EXPECT_DOUBLE_EQ(r.p_r, 0.75);
    EXPECT_TRUE(r.reliability_ok);
    EXPECT_DOUBLE_EQ(r.p_ls, 0.75);
    EXPECT_FALSE(r.shed_ok);
    EXPECT_THROW(evaluate_chance({}, thr, 100.0), ValidationError);
}

TEST(Reliability, AggregateMetrics) {
    std::vector<ScenarioMetrics> s(2);
    s[0].total_cost = 10;
    s[1].total_cost = 30;
    s[0].mean_reliability = 1.0;
    s[1].mean_reliability = 0.5;
    s[0].mean_shed_frac = 0.02;
    const auto m = aggregate_metrics(s, {}, 100.0);
    EXPECT_DOUBLE_EQ(m.expected_cost, 20.0);
    EXPECT_DOUBLE_EQ(m.mean_reliability(), 0.75);
    EXPECT_DOUBLE_EQ(m.mean_shed_frac(), 0.01);
    EXPECT_DOUBLE_EQ(m.p_reliability_ok, 0.5);
}

TEST(Reliability, ThresholdValidation) {
    ChanceThresholds t;
    t.alpha_r = 1.5;
    EXPECT_THROW(t.validate(), ValidationError);
}
