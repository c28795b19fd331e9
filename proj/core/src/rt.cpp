#include "gridsched/rt.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "gridsched/errors.hpp"
#include "gridsched/lp.hpp"

namespace gridsched {

namespace {

struct GenCols {
    bool active = false;
    bool emergency = false;
    std::size_t power = 0, commit = 0;
    std::vector<std::size_t> seg, up, dn;
};

struct RtModel {
    lp::MixedIntegerProgram mip;
    std::vector<GenCols> gens;
    std::vector<std::size_t> curtail, shed, spill, angle;
};

RtModel build_rt(const GridCase& grid, const Topology& topology, const HourlyRealization& state,
                 const UcSolution& baseline, int hour, const RtDecision* prev, const RtOptions& options, bool with_spill) {
    using lp::Relation;
    using lp::Term;
    const std::size_t G = grid.n_gens(), W = grid.n_wind(), B = grid.n_buses();
    const auto dc = dc_matrices(grid, topology, IslandPolicy::Allow);
    const auto anchors = angle_anchor_buses(grid, topology);
    RtModel m;
    auto& lp = m.mip.lp;
    m.gens.resize(G);
    for (std::size_t g = 0; g < G; ++g) {
        const auto& gen = grid.dispatchable_generators[g];
        const auto gi = static_cast<Eigen::Index>(g);
        const bool on = baseline.commitment(gi, hour) == 1;
        const bool candidate = !on && options.allow_emergency_commit && gen.p_min_mw <= gen.ramp_up_mw_per_h;
        auto& c = m.gens[g];
        if (!on && !candidate) continue;
        c.active = true;
        c.emergency = candidate;
        double lo = on ? gen.p_min_mw : 0.0;
        double hi = gen.p_max_mw;
        const bool prev_on = prev ? prev->commitment(gi) == 1 : on;
        const double prev_p = prev ? prev->dispatch_mw(gi) : baseline.dispatch_mw(gi, hour);
        if (on && prev_on) {
            lo = std::max(lo, prev_p - gen.ramp_down_mw_per_h);
            hi = std::min(hi, prev_p + gen.ramp_up_mw_per_h);
            if (lo > hi) lo = hi;
        }
        c.power = lp.add_variable(lo, hi, 0.0, fmt::format("p_g{}", gen.id));
        const auto base_seg = fill_segments(gen, on ? baseline.dispatch_mw(gi, hour) : 0.0);
        std::vector<Term> link{{c.power, 1.0}};
        for (std::size_t k = 0; k < gen.cost_curve.size(); ++k) {
            const double price = gen.cost_curve[k].price;
            c.seg.push_back(lp.add_variable(0.0, gen.segment_width(k), 0.0, fmt::format("seg{}_g{}", k, gen.id)));
            c.up.push_back(lp.add_variable(0.0, lp::kInf, price, fmt::format("up{}_g{}", k, gen.id)));
            c.dn.push_back(lp.add_variable(0.0, lp::kInf, price, fmt::format("dn{}_g{}", k, gen.id)));
            link.push_back({c.seg[k], -1.0});
            lp.add_constraint({{c.seg[k], 1.0}, {c.up[k], -1.0}, {c.dn[k], 1.0}}, Relation::Equal, base_seg[k]);
        }
        lp.add_constraint(std::move(link), Relation::Equal, 0.0);
        if (candidate) {
            c.commit = lp.add_variable(0.0, 1.0, gen.hot_start_cost() + gen.no_load_cost, fmt::format("z_g{}", gen.id));
            m.mip.binary_vars.push_back(c.commit);
            lp.add_constraint({{c.power, 1.0}, {c.commit, -gen.p_max_mw}}, Relation::LessEqual, 0.0);
            lp.add_constraint({{c.power, 1.0}, {c.commit, -gen.p_min_mw}}, Relation::GreaterEqual, 0.0);
        }
    }
    for (std::size_t w = 0; w < W; ++w)
        m.curtail.push_back(lp.add_variable(0.0, state.wind(static_cast<Eigen::Index>(w)), grid.wind_curtail_price,
                                            fmt::format("wc_w{}", grid.wind_generators[w].id)));
    for (std::size_t b = 0; b < B; ++b) {
        m.shed.push_back(lp.add_variable(0.0, state.load(static_cast<Eigen::Index>(b)), grid.voll,
                                         fmt::format("ls_b{}", grid.buses[b].id)));
        if (with_spill) m.spill.push_back(lp.add_variable(0.0, lp::kInf, grid.voll, fmt::format("spill_b{}", grid.buses[b].id)));
        const double span = anchors[b] ? 0.0 : std::numbers::pi;
        m.angle.push_back(lp.add_variable(-span, span, 0.0, fmt::format("theta_b{}", grid.buses[b].id)));
    }
    for (std::size_t b = 0; b < B; ++b) {
        std::vector<Term> row;
        for (std::size_t g = 0; g < G; ++g) {
            if (m.gens[g].active && grid.bus_index(grid.dispatchable_generators[g].bus) == b)
                row.push_back({m.gens[g].power, 1.0});
        }
        double wind = 0.0;
        for (std::size_t w = 0; w < W; ++w) {
            if (grid.bus_index(grid.wind_generators[w].bus) == b) {
                row.push_back({m.curtail[w], -1.0});
                wind += state.wind(static_cast<Eigen::Index>(w));
            }
        }
        row.push_back({m.shed[b], 1.0});
        if (with_spill) row.push_back({m.spill[b], -1.0});
        for (std::size_t j = 0; j < B; ++j) {
            const double v = dc.b_bus(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(j));
            if (v != 0.0) row.push_back({m.angle[j], -grid.base_mva * v});
        }
        lp.add_constraint(std::move(row), Relation::Equal, state.load(static_cast<Eigen::Index>(b)) - wind);
    }
    for (std::size_t l = 0; l < grid.n_lines(); ++l) {
        if (!topology.in_service(l)) continue;
        std::vector<Term> row;
        for (std::size_t j = 0; j < B; ++j) {
            const double v = dc.b_f(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j));
            if (v != 0.0) row.push_back({m.angle[j], grid.base_mva * v});
        }
        const double fmax = grid.lines[l].flow_limit_mw;
        lp.add_constraint(row, Relation::LessEqual, fmax);
        lp.add_constraint(std::move(row), Relation::GreaterEqual, -fmax);
    }
    return m;
}

}  // namespace

RtDecision solve_rt(const GridCase& grid, const Topology& topology, const HourlyRealization& state,
                    const UcSolution& baseline, int hour, const RtDecision* prev, const RtOptions& options) {
    if (hour < 0 || hour >= baseline.hours())
        throw ValidationError("hour", fmt::format("hour {} outside the {}-hour baseline", hour, baseline.hours()));
    if (state.wind.size() != static_cast<Eigen::Index>(grid.n_wind()) ||
        state.load.size() != static_cast<Eigen::Index>(grid.n_buses()))
        throw ValidationError("state", "realization dimensions differ from the case");

    lp::Solution sol;
    RtModel model;
    for (bool with_spill : {false, true}) {
        model = build_rt(grid, topology, state, baseline, hour, prev, options, with_spill);
        sol = model.mip.binary_vars.empty() ? lp::solve_lp(model.mip.lp) : lp::solve_milp(model.mip);
        if (sol.optimal()) break;
    }
    if (!sol.optimal())
        throw InfeasibleError(fmt::format("real-time redispatch at hour {} is {}", hour, lp::to_string(sol.status)));

    const auto& v = sol.values;
    const std::size_t G = grid.n_gens();
    RtDecision d;
    d.hour = hour;
    d.commitment = Eigen::VectorXi::Zero(static_cast<Eigen::Index>(G));
    d.dispatch_mw = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(G));
    for (std::size_t g = 0; g < G; ++g) {
        const auto& c = model.gens[g];
        if (!c.active) continue;
        const auto& gen = grid.dispatchable_generators[g];
        const auto gi = static_cast<Eigen::Index>(g);
        const bool on = c.emergency ? v[c.commit] > 0.5 : true;
        d.commitment(gi) = on ? 1 : 0;
        d.dispatch_mw(gi) = on ? v[c.power] : 0.0;
        for (std::size_t k = 0; k < c.seg.size(); ++k)
            d.redispatch_cost += gen.cost_curve[k].price * (v[c.up[k]] + v[c.dn[k]]);
        if (c.emergency && on) d.startup_cost += gen.hot_start_cost() + gen.no_load_cost;
    }
    d.wind_curtail_mw.resize(static_cast<Eigen::Index>(grid.n_wind()));
    for (std::size_t w = 0; w < grid.n_wind(); ++w) d.wind_curtail_mw(static_cast<Eigen::Index>(w)) = std::max(0.0, v[model.curtail[w]]);
    const auto B = static_cast<Eigen::Index>(grid.n_buses());
    d.load_shed_mw.resize(B);
    d.spill_mw = Eigen::VectorXd::Zero(B);
    d.angles_rad.resize(B);
    for (Eigen::Index b = 0; b < B; ++b) {
        const auto ub = static_cast<std::size_t>(b);
        d.load_shed_mw(b) = std::max(0.0, v[model.shed[ub]]);
        if (!model.spill.empty()) d.spill_mw(b) = std::max(0.0, v[model.spill[ub]]);
        d.angles_rad(b) = v[model.angle[ub]];
    }
    d.curtail_cost = grid.wind_curtail_price * d.curtail_mw();
    d.shed_cost = grid.voll * d.shed_mw();
    d.spill_cost = grid.voll * d.spill_mw.sum();
    d.total_cost = d.redispatch_cost + d.curtail_cost + d.shed_cost + d.spill_cost + d.startup_cost;
    return d;
}

double rt_operating_cost(const RtDecision& decision) { return decision.total_cost - decision.shed_cost; }

}  // namespace gridsched
