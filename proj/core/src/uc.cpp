#include "gridsched/uc.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <fmt/format.h>

#include "gridsched/errors.hpp"

namespace gridsched {

namespace {

// Commitment of a generator n hours before the horizon (n = 1 is the hour
// just before hour 0).
int alpha_before(const InitialStatus& st, int n) {
    if (st.on) return n <= st.hours ? 1 : 0;
    return n <= st.hours ? 0 : 1;
}

// Start indicator n hours before the horizon.
int start_before(const InitialStatus& st, int n) { return st.on && n == st.hours ? 1 : 0; }

void check_dims(const GridCase& grid, const Topology& topology, const DayAheadForecast& forecast,
                const InitialStatusList& initial) {
    if (topology.size() != grid.n_lines())
        throw ValidationError("topology", fmt::format("{} entries for {} lines", topology.size(), grid.n_lines()));
    if (forecast.wind.rows() != static_cast<Eigen::Index>(grid.n_wind()))
        throw ValidationError("forecast.wind", "row count differs from wind generator count");
    if (forecast.load.rows() != static_cast<Eigen::Index>(grid.n_buses()))
        throw ValidationError("forecast.load", "row count differs from bus count");
    if (forecast.wind.cols() != forecast.load.cols() || forecast.load.cols() < 1)
        throw ValidationError("forecast", "wind and load horizons differ or are empty");
    if (initial.size() != grid.n_gens())
        throw ValidationError("initial_status", fmt::format("{} entries for {} generators", initial.size(), grid.n_gens()));
}

}  // namespace

InitialStatusList unconstrained_start(const GridCase& grid) {
    return InitialStatusList(grid.n_gens(), InitialStatus::long_on());
}

InitialStatusList UcSolution::final_status() const {
    InitialStatusList out;
    const int T = hours();
    for (Eigen::Index g = 0; g < commitment.rows(); ++g) {
        const bool on = commitment(g, T - 1) == 1;
        int run = 0;
        int t = T - 1;
        while (t >= 0 && (commitment(g, t) == 1) == on) {
            ++run;
            --t;
        }
        if (t < 0) {
            const auto& st = initial[static_cast<std::size_t>(g)];
            if (st.on == on) run += st.hours;
        }
        out.push_back({on, std::min(run, InitialStatus::kLongEnough)});
    }
    return out;
}

std::size_t uc_variable_count(const GridCase& grid, int hours) {
    std::size_t per_hour = 3 * grid.n_gens() + grid.n_wind() + 2 * grid.n_buses();
    for (const auto& g : grid.dispatchable_generators) {
        per_hour += g.cost_curve.size();
        if (g.startup_cost_fn.size() > 1) per_hour += g.startup_cost_fn.size() - 1;
    }
    return per_hour * static_cast<std::size_t>(hours);
}

std::vector<double> fill_segments(const DispatchableGenerator& gen, double p_mw) {
    std::vector<double> seg(gen.cost_curve.size(), 0.0);
    double remaining = std::max(0.0, p_mw);
    for (std::size_t k = 0; k < seg.size(); ++k) {
        seg[k] = std::min(remaining, gen.segment_width(k));
        remaining -= seg[k];
    }
    return seg;
}

UcProblem build_uc(const GridCase& grid, const Topology& topology, const DayAheadForecast& forecast,
                   const InitialStatusList& initial) {
    using lp::Relation;
    using lp::Term;
    check_dims(grid, topology, forecast, initial);
    const int T = forecast.hours();
    const std::size_t G = grid.n_gens(), W = grid.n_wind(), B = grid.n_buses();
    const auto dc = dc_matrices(grid, topology, IslandPolicy::Allow);
    const auto anchors = angle_anchor_buses(grid, topology);

    UcProblem prob;
    auto& lp = prob.mip.lp;
    auto& ix = prob.index;
    ix.hours = T;
    ix.alpha.assign(G, std::vector<std::size_t>(static_cast<std::size_t>(T)));
    ix.start = ix.alpha;
    ix.power = ix.alpha;
    ix.segment.resize(G);
    ix.cold.resize(G);
    for (std::size_t g = 0; g < G; ++g) {
        const auto& gen = grid.dispatchable_generators[g];
        ix.segment[g].assign(gen.cost_curve.size(), std::vector<std::size_t>(static_cast<std::size_t>(T)));
        const std::size_t steps = gen.startup_cost_fn.empty() ? 0 : gen.startup_cost_fn.size() - 1;
        ix.cold[g].assign(steps, std::vector<std::size_t>(static_cast<std::size_t>(T)));
    }
    ix.curtail.assign(W, std::vector<std::size_t>(static_cast<std::size_t>(T)));
    ix.shed.assign(B, std::vector<std::size_t>(static_cast<std::size_t>(T)));
    ix.angle = ix.shed;

    for (int t = 0; t < T; ++t) {
        const auto ut = static_cast<std::size_t>(t);
        for (std::size_t g = 0; g < G; ++g) {
            const auto& gen = grid.dispatchable_generators[g];
            const auto& st = initial[g];
            double lo = 0.0, hi = 1.0;
            if (st.on && st.hours < gen.min_up_h && t < gen.min_up_h - st.hours) lo = 1.0;
            if (!st.on && st.hours < gen.min_down_h && t < gen.min_down_h - st.hours) hi = 0.0;
            ix.alpha[g][ut] = lp.add_variable(lo, hi, gen.no_load_cost, fmt::format("alpha_g{}_t{}", gen.id, t));
            prob.mip.binary_vars.push_back(ix.alpha[g][ut]);
            ix.start[g][ut] = lp.add_variable(0.0, 1.0, gen.hot_start_cost(), fmt::format("su_g{}_t{}", gen.id, t));
            ix.power[g][ut] = lp.add_variable(0.0, gen.p_max_mw, 0.0, fmt::format("p_g{}_t{}", gen.id, t));
            for (std::size_t k = 0; k < gen.cost_curve.size(); ++k) {
                ix.segment[g][k][ut] = lp.add_variable(0.0, gen.segment_width(k), gen.cost_curve[k].price,
                                                       fmt::format("seg{}_g{}_t{}", k, gen.id, t));
            }
            for (std::size_t j = 0; j < ix.cold[g].size(); ++j) {
                ix.cold[g][j][ut] = lp.add_variable(0.0, lp::kInf, 1.0, fmt::format("cold{}_g{}_t{}", j + 1, gen.id, t));
            }
        }
        for (std::size_t w = 0; w < W; ++w) {
            const double avail = forecast.wind(static_cast<Eigen::Index>(w), t);
            ix.curtail[w][ut] = lp.add_variable(0.0, avail, grid.wind_curtail_price,
                                                fmt::format("wc_w{}_t{}", grid.wind_generators[w].id, t));
        }
        for (std::size_t b = 0; b < B; ++b) {
            const double load = forecast.load(static_cast<Eigen::Index>(b), t);
            ix.shed[b][ut] = lp.add_variable(0.0, load, grid.voll, fmt::format("ls_b{}_t{}", grid.buses[b].id, t));
            const double span = anchors[b] ? 0.0 : std::numbers::pi;
            ix.angle[b][ut] = lp.add_variable(-span, span, 0.0, fmt::format("theta_b{}_t{}", grid.buses[b].id, t));
        }
    }

    for (int t = 0; t < T; ++t) {
        const auto ut = static_cast<std::size_t>(t);
        for (std::size_t g = 0; g < G; ++g) {
            const auto& gen = grid.dispatchable_generators[g];
            const auto& st = initial[g];
            const auto a = ix.alpha[g];
            const auto s = ix.start[g];
            std::vector<Term> link{{ix.power[g][ut], 1.0}};
            for (std::size_t k = 0; k < gen.cost_curve.size(); ++k) link.push_back({ix.segment[g][k][ut], -1.0});
            lp.add_constraint(std::move(link), Relation::Equal, 0.0);
            lp.add_constraint({{ix.power[g][ut], 1.0}, {a[ut], -gen.p_max_mw}}, Relation::LessEqual, 0.0);
            lp.add_constraint({{ix.power[g][ut], 1.0}, {a[ut], -gen.p_min_mw}}, Relation::GreaterEqual, 0.0);
            if (t == 0) {
                lp.add_constraint({{s[0], 1.0}, {a[0], -1.0}}, Relation::GreaterEqual, -alpha_before(st, 1));
            } else {
                lp.add_constraint({{s[ut], 1.0}, {a[ut], -1.0}, {a[ut - 1], 1.0}}, Relation::GreaterEqual, 0.0);
            }
            if (gen.min_up_h > 1) {
                std::vector<Term> row{{a[ut], -1.0}};
                double rhs = 0.0;
                for (int tau = t - gen.min_up_h + 1; tau <= t; ++tau) {
                    if (tau >= 0) row.push_back({s[static_cast<std::size_t>(tau)], 1.0});
                    else rhs -= start_before(st, -tau);
                }
                lp.add_constraint(std::move(row), Relation::LessEqual, rhs);
            }
            if (gen.min_down_h > 1) {
                std::vector<Term> row;
                double rhs = 1.0;
                for (int tau = t - gen.min_down_h + 1; tau <= t; ++tau) {
                    if (tau >= 0) row.push_back({s[static_cast<std::size_t>(tau)], 1.0});
                    else rhs -= start_before(st, -tau);
                }
                const int back = t - gen.min_down_h;
                if (back >= 0) row.push_back({a[static_cast<std::size_t>(back)], 1.0});
                else rhs -= alpha_before(st, -back);
                lp.add_constraint(std::move(row), Relation::LessEqual, rhs);
            }
            for (std::size_t j = 0; j < ix.cold[g].size(); ++j) {
                const auto& step = gen.startup_cost_fn[j + 1];
                const double delta = step.cost - gen.startup_cost_fn[j].cost;
                std::vector<Term> row{{ix.cold[g][j][ut], 1.0}, {a[ut], -delta}};
                double rhs = 0.0;
                for (int n = 1; n <= step.off_hours; ++n) {
                    if (t - n >= 0) row.push_back({a[static_cast<std::size_t>(t - n)], delta});
                    else rhs -= delta * alpha_before(st, n - t);
                }
                lp.add_constraint(std::move(row), Relation::GreaterEqual, rhs);
            }
        }
        for (std::size_t b = 0; b < B; ++b) {
            std::vector<Term> row;
            for (std::size_t g = 0; g < G; ++g) {
                if (grid.bus_index(grid.dispatchable_generators[g].bus) == b) row.push_back({ix.power[g][ut], 1.0});
            }
            double wind = 0.0;
            for (std::size_t w = 0; w < W; ++w) {
                if (grid.bus_index(grid.wind_generators[w].bus) == b) {
                    row.push_back({ix.curtail[w][ut], -1.0});
                    wind += forecast.wind(static_cast<Eigen::Index>(w), t);
                }
            }
            row.push_back({ix.shed[b][ut], 1.0});
            for (std::size_t j = 0; j < B; ++j) {
                const double v = dc.b_bus(static_cast<Eigen::Index>(b), static_cast<Eigen::Index>(j));
                if (v != 0.0) row.push_back({ix.angle[j][ut], -grid.base_mva * v});
            }
            const double load = forecast.load(static_cast<Eigen::Index>(b), t);
            lp.add_constraint(std::move(row), Relation::Equal, load - wind,
                              fmt::format("balance_b{}_t{}", grid.buses[b].id, t));
        }
        for (std::size_t l = 0; l < grid.n_lines(); ++l) {
            if (!topology.in_service(l)) continue;
            std::vector<Term> row;
            for (std::size_t j = 0; j < B; ++j) {
                const double v = dc.b_f(static_cast<Eigen::Index>(l), static_cast<Eigen::Index>(j));
                if (v != 0.0) row.push_back({ix.angle[j][ut], grid.base_mva * v});
            }
            const double fmax = grid.lines[l].flow_limit_mw;
            lp.add_constraint(row, Relation::LessEqual, fmax);
            lp.add_constraint(std::move(row), Relation::GreaterEqual, -fmax);
        }
    }
    return prob;
}

double startup_cost_at(const DispatchableGenerator& gen, const Eigen::MatrixXi& commitment, std::size_t g, int t,
                       const InitialStatus& initial) {
    auto alpha = [&](int tt) {
        return tt >= 0 ? commitment(static_cast<Eigen::Index>(g), tt) : alpha_before(initial, -tt);
    };
    if (alpha(t) != 1 || alpha(t - 1) != 0) return 0.0;
    int off = 0;
    while (off < InitialStatus::kLongEnough && alpha(t - 1 - off) == 0) ++off;
    return gen.startup_cost(off);
}

double uc_cost(const GridCase& grid, const UcSolution& sol) {
    double cost = 0.0;
    for (std::size_t g = 0; g < grid.n_gens(); ++g) {
        const auto& gen = grid.dispatchable_generators[g];
        const auto gi = static_cast<Eigen::Index>(g);
        for (int t = 0; t < sol.hours(); ++t) {
            if (sol.commitment(gi, t) == 1) cost += gen.no_load_cost + gen.energy_cost(sol.dispatch_mw(gi, t));
            cost += startup_cost_at(gen, sol.commitment, g, t, sol.initial[g]);
        }
    }
    cost += grid.wind_curtail_price * sol.wind_curtail_mw.sum();
    cost += grid.voll * sol.load_shed_mw.sum();
    return cost;
}

UcSolution extract_uc(const GridCase& grid, const Topology& topology, const InitialStatusList& initial,
                      const UcIndex& ix, const std::vector<double>& v) {
    const int T = ix.hours;
    UcSolution sol;
    sol.topology = topology;
    sol.initial = initial;
    sol.commitment.resize(static_cast<Eigen::Index>(grid.n_gens()), T);
    sol.dispatch_mw.resize(static_cast<Eigen::Index>(grid.n_gens()), T);
    sol.wind_curtail_mw.resize(static_cast<Eigen::Index>(grid.n_wind()), T);
    sol.load_shed_mw.resize(static_cast<Eigen::Index>(grid.n_buses()), T);
    sol.angles_rad.resize(static_cast<Eigen::Index>(grid.n_buses()), T);
    for (int t = 0; t < T; ++t) {
        const auto ut = static_cast<std::size_t>(t);
        for (std::size_t g = 0; g < grid.n_gens(); ++g) {
            const auto& gen = grid.dispatchable_generators[g];
            const int on = v[ix.alpha[g][ut]] > 0.5 ? 1 : 0;
            const auto gi = static_cast<Eigen::Index>(g);
            sol.commitment(gi, t) = on;
            sol.dispatch_mw(gi, t) = on ? std::clamp(v[ix.power[g][ut]], gen.p_min_mw, gen.p_max_mw) : 0.0;
        }
        for (std::size_t w = 0; w < grid.n_wind(); ++w)
            sol.wind_curtail_mw(static_cast<Eigen::Index>(w), t) = std::max(0.0, v[ix.curtail[w][ut]]);
        for (std::size_t b = 0; b < grid.n_buses(); ++b) {
            sol.load_shed_mw(static_cast<Eigen::Index>(b), t) = std::max(0.0, v[ix.shed[b][ut]]);
            sol.angles_rad(static_cast<Eigen::Index>(b), t) = v[ix.angle[b][ut]];
        }
    }
    sol.cost = uc_cost(grid, sol);
    return sol;
}

UcSolution solve_uc(const GridCase& grid, const Topology& topology, const DayAheadForecast& forecast,
                    const InitialStatusList& initial, double gap_tol) {
    auto prob = build_uc(grid, topology, forecast, initial);
    const auto result = lp::solve_milp(prob.mip, gap_tol);
    if (!result.optimal())
        throw InfeasibleError(fmt::format("unit commitment for case '{}' is {}", grid.name, lp::to_string(result.status)));
    return extract_uc(grid, topology, initial, prob.index, result.values);
}

std::vector<std::string> verify_uc(const GridCase& grid, const Topology& topology, const DayAheadForecast& forecast,
                                   const UcSolution& sol, double tol) {
    std::vector<std::string> issues;
    const int T = sol.hours();
    for (std::size_t g = 0; g < grid.n_gens(); ++g) {
        const auto& gen = grid.dispatchable_generators[g];
        const auto gi = static_cast<Eigen::Index>(g);
        for (int t = 0; t < T; ++t) {
            const int a = sol.commitment(gi, t);
            const double p = sol.dispatch_mw(gi, t);
            if (a != 0 && a != 1) issues.push_back(fmt::format("gen {} hour {}: commitment {} not binary", gen.id, t, a));
            if (a == 0 && std::abs(p) > tol) issues.push_back(fmt::format("gen {} hour {}: off but dispatched {}", gen.id, t, p));
            if (a == 1 && (p < gen.p_min_mw - tol || p > gen.p_max_mw + tol))
                issues.push_back(fmt::format("gen {} hour {}: dispatch {} outside [{}, {}]", gen.id, t, p, gen.p_min_mw,
                                             gen.p_max_mw));
        }
        // Run lengths including the pre-horizon history.
        const auto& st = sol.initial[g];
        bool state = st.on;
        int run = st.hours;
        for (int t = 0; t < T; ++t) {
            const bool on = sol.commitment(gi, t) == 1;
            if (on == state) {
                ++run;
                continue;
            }
            if (state && run < gen.min_up_h)
                issues.push_back(fmt::format("gen {} hour {}: shut down after {} h on (min up {})", gen.id, t, run, gen.min_up_h));
            if (!state && run < gen.min_down_h)
                issues.push_back(
                    fmt::format("gen {} hour {}: started after {} h off (min down {})", gen.id, t, run, gen.min_down_h));
            state = on;
            run = 1;
        }
    }
    for (std::size_t w = 0; w < grid.n_wind(); ++w) {
        for (int t = 0; t < T; ++t) {
            const double wc = sol.wind_curtail_mw(static_cast<Eigen::Index>(w), t);
            const double avail = forecast.wind(static_cast<Eigen::Index>(w), t);
            if (wc < -tol || wc > avail + tol)
                issues.push_back(fmt::format("wind {} hour {}: curtailment {} outside [0, {}]", grid.wind_generators[w].id, t, wc, avail));
        }
    }
    for (int t = 0; t < T; ++t) {
        std::vector<double> net(grid.n_buses(), 0.0);
        for (std::size_t g = 0; g < grid.n_gens(); ++g)
            net[grid.bus_index(grid.dispatchable_generators[g].bus)] += sol.dispatch_mw(static_cast<Eigen::Index>(g), t);
        for (std::size_t w = 0; w < grid.n_wind(); ++w) {
            const auto wi = static_cast<Eigen::Index>(w);
            net[grid.bus_index(grid.wind_generators[w].bus)] += forecast.wind(wi, t) - sol.wind_curtail_mw(wi, t);
        }
        for (std::size_t b = 0; b < grid.n_buses(); ++b) {
            const auto bi = static_cast<Eigen::Index>(b);
            const double ls = sol.load_shed_mw(bi, t);
            const double load = forecast.load(bi, t);
            if (ls < -tol || ls > load + tol)
                issues.push_back(fmt::format("bus {} hour {}: shedding {} outside [0, {}]", grid.buses[b].id, t, ls, load));
            net[b] += ls - load;
            if (grid.is_reference_index(b) && std::abs(sol.angles_rad(bi, t)) > tol)
                issues.push_back(fmt::format("bus {} hour {}: reference angle {}", grid.buses[b].id, t, sol.angles_rad(bi, t)));
        }
        for (std::size_t l = 0; l < grid.n_lines(); ++l) {
            if (!topology.in_service(l)) continue;
            const auto& line = grid.lines[l];
            const std::size_t i = grid.bus_index(line.from_bus), j = grid.bus_index(line.to_bus);
            const double flow = grid.base_mva *
                                (sol.angles_rad(static_cast<Eigen::Index>(i), t) - sol.angles_rad(static_cast<Eigen::Index>(j), t)) /
                                line.reactance_pu;
            net[i] -= flow;
            net[j] += flow;
            if (std::abs(flow) > line.flow_limit_mw + tol)
                issues.push_back(fmt::format("line {} hour {}: flow {} exceeds {}", line.id, t, flow, line.flow_limit_mw));
        }
        for (std::size_t b = 0; b < grid.n_buses(); ++b) {
            if (std::abs(net[b]) > tol)
                issues.push_back(fmt::format("bus {} hour {}: balance residual {}", grid.buses[b].id, t, net[b]));
        }
    }
    return issues;
}

}  // namespace gridsched
