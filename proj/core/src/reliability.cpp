#include "gridsched/reliability.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

#include "gridsched/errors.hpp"

namespace gridsched {

std::vector<Contingency> contingency_list(const GridCase& grid, const Topology& topology) {
    if (topology.size() != grid.n_lines()) throw ValidationError("topology", "length differs from line count");
    std::vector<Contingency> out;
    for (std::size_t l = 0; l < grid.n_lines(); ++l) {
        if (topology.in_service(l)) out.push_back({l, grid.lines[l].id});
    }
    std::stable_sort(out.begin(), out.end(), [](const Contingency& a, const Contingency& b) { return a.line_id < b.line_id; });
    return out;
}

Eigen::VectorXd DcFeasibilityChecker::flows(const GridCase& grid, const Topology& topology,
                                            const Eigen::VectorXd& injections_mw) {
    const auto dc = dc_matrices(grid, topology, IslandPolicy::Allow);
    const auto anchors = angle_anchor_buses(grid, topology);
    std::vector<Eigen::Index> free;
    for (std::size_t b = 0; b < grid.n_buses(); ++b) {
        if (!anchors[b]) free.push_back(static_cast<Eigen::Index>(b));
    }
    Eigen::VectorXd theta = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.n_buses()));
    if (!free.empty()) {
        const auto n = static_cast<Eigen::Index>(free.size());
        Eigen::MatrixXd reduced(n, n);
        Eigen::VectorXd rhs(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            rhs(i) = injections_mw(free[static_cast<std::size_t>(i)]) / grid.base_mva;
            for (Eigen::Index j = 0; j < n; ++j) reduced(i, j) = dc.b_bus(free[static_cast<std::size_t>(i)], free[static_cast<std::size_t>(j)]);
        }
        Eigen::LDLT<Eigen::MatrixXd> ldlt(reduced);
        if (ldlt.info() != Eigen::Success) throw NumericalError("reduced susceptance matrix is not factorizable");
        const Eigen::VectorXd sol = ldlt.solve(rhs);
        for (Eigen::Index i = 0; i < n; ++i) theta(free[static_cast<std::size_t>(i)]) = sol(i);
    }
    return grid.base_mva * (dc.b_f * theta);
}

bool DcFeasibilityChecker::feasible(const GridCase& grid, const Topology& pre, const Topology& post,
                                    const Eigen::VectorXd& injections_mw) const {
    const auto before = connected_components(grid, pre);
    const auto after = connected_components(grid, post);
    const std::size_t B = grid.n_buses();
    // Every post-contingency island must balance on its own. Pieces still
    // holding a reference bus can absorb rounding noise only.
    std::vector<double> net(B, 0.0);
    std::vector<int> has_ref(B, 0);
    // The piece of each original component that keeps its reference bus
    // (or its lowest bus when it has none) stays connected to the system.
    std::vector<int> main_piece(B, -1);
    for (std::size_t b = 0; b < B; ++b) {
        const auto c = static_cast<std::size_t>(after[b]);
        net[c] += injections_mw(static_cast<Eigen::Index>(b));
        if (grid.is_reference_index(b)) {
            has_ref[c] = 1;
            auto& m = main_piece[static_cast<std::size_t>(before[b])];
            if (m < 0) m = after[b];
        }
    }
    for (std::size_t b = 0; b < B; ++b) {
        auto& m = main_piece[static_cast<std::size_t>(before[b])];
        if (m < 0) m = before[b];
    }
    for (std::size_t b = 0; b < B; ++b) {
        if (after[b] == main_piece[static_cast<std::size_t>(before[b])]) continue;
        if (std::abs(injections_mw(static_cast<Eigen::Index>(b))) > balance_tol_) return false;
    }
    for (std::size_t c = 0; c < B; ++c) {
        if (!has_ref[c] && std::abs(net[c]) > balance_tol_) return false;
    }
    const auto f = flows(grid, post, injections_mw);
    for (std::size_t l = 0; l < grid.n_lines(); ++l) {
        if (!post.in_service(l)) continue;
        if (std::abs(f(static_cast<Eigen::Index>(l))) > grid.lines[l].flow_limit_mw + flow_tol_) return false;
    }
    return true;
}

Eigen::VectorXd net_injections(const GridCase& grid, const HourlyRealization& state, const RtDecision& decision) {
    Eigen::VectorXd inj = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.n_buses()));
    for (std::size_t g = 0; g < grid.n_gens(); ++g)
        inj(static_cast<Eigen::Index>(grid.bus_index(grid.dispatchable_generators[g].bus))) +=
            decision.dispatch_mw(static_cast<Eigen::Index>(g));
    for (std::size_t w = 0; w < grid.n_wind(); ++w) {
        const auto wi = static_cast<Eigen::Index>(w);
        inj(static_cast<Eigen::Index>(grid.bus_index(grid.wind_generators[w].bus))) +=
            state.wind(wi) - decision.wind_curtail_mw(wi);
    }
    inj -= state.load;
    inj += decision.load_shed_mw;
    if (decision.spill_mw.size() == inj.size()) inj -= decision.spill_mw;
    return inj;
}

double state_reliability(const GridCase& grid, const Topology& topology, const HourlyRealization& state,
                         const RtDecision& decision, const FeasibilityChecker& checker) {
    const auto list = contingency_list(grid, topology);
    if (list.empty()) return 1.0;
    const auto inj = net_injections(grid, state, decision);
    std::size_t ok = 0;
    for (const auto& c : list) {
        Topology post = topology;
        post.line_status[c.line] = false;
        if (checker.feasible(grid, topology, post, inj)) ++ok;
    }
    return static_cast<double>(ok) / static_cast<double>(list.size());
}

void ChanceThresholds::validate() const {
    auto unit = [](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(fmt::format("thresholds.{}", name), "must lie in [0,1]");
    };
    unit(r_min, "r_min");
    unit(shed_max_frac, "shed_max_frac");
    unit(alpha_r, "alpha_r");
    unit(alpha_shed, "alpha_shed");
}

ChanceResult evaluate_chance(const std::vector<ScenarioMetrics>& per_scenario, const ChanceThresholds& thr,
                             double total_load_capacity_mw) {
    if (per_scenario.empty()) throw ValidationError("per_scenario", "at least one scenario is required");
    std::size_t r_hits = 0, ls_hits = 0;
    const double shed_cap = thr.shed_max_frac * total_load_capacity_mw;
    for (const auto& s : per_scenario) {
        if (s.mean_reliability >= thr.r_min) ++r_hits;
        if (s.mean_shed_mw <= shed_cap) ++ls_hits;
    }
    const double n = static_cast<double>(per_scenario.size());
    ChanceResult r;
    r.p_r = static_cast<double>(r_hits) / n;
    r.p_ls = static_cast<double>(ls_hits) / n;
    r.reliability_ok = r.p_r >= 1.0 - thr.alpha_r;
    r.shed_ok = r.p_ls >= 1.0 - thr.alpha_shed;
    return r;
}

double ScheduleMetrics::mean_reliability() const {
    if (per_scenario.empty()) return 0.0;
    double s = 0.0;
    for (const auto& m : per_scenario) s += m.mean_reliability;
    return s / static_cast<double>(per_scenario.size());
}

double ScheduleMetrics::mean_shed_frac() const {
    if (per_scenario.empty()) return 0.0;
    double s = 0.0;
    for (const auto& m : per_scenario) s += m.mean_shed_frac;
    return s / static_cast<double>(per_scenario.size());
}

ScheduleMetrics aggregate_metrics(std::vector<ScenarioMetrics> per_scenario, const ChanceThresholds& thr,
                                  double total_load_capacity_mw) {
    ScheduleMetrics m;
    const auto chance = evaluate_chance(per_scenario, thr, total_load_capacity_mw);
    double cost = 0.0;
    for (const auto& s : per_scenario) cost += s.total_cost;
    m.expected_cost = cost / static_cast<double>(per_scenario.size());
    m.p_reliability_ok = chance.p_r;
    m.p_shed_ok = chance.p_ls;
    m.per_scenario = std::move(per_scenario);
    return m;
}

}  // namespace gridsched
