#include "gridsched/grid.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include <fmt/format.h>

#include "gridsched/errors.hpp"

namespace gridsched {

double DispatchableGenerator::segment_width(std::size_t k) const {
    const double lo = k == 0 ? 0.0 : cost_curve[k - 1].up_to_mw;
    return std::max(0.0, std::min(cost_curve[k].up_to_mw, p_max_mw) - std::min(lo, p_max_mw));
}

double DispatchableGenerator::energy_cost(double p_mw) const {
    double cost = 0.0;
    double remaining = p_mw;
    for (std::size_t k = 0; k < cost_curve.size() && remaining > 0.0; ++k) {
        const double take = std::min(remaining, segment_width(k));
        cost += take * cost_curve[k].price;
        remaining -= take;
    }
    return cost;
}

double DispatchableGenerator::startup_cost(int hours_off) const {
    double cost = 0.0;
    for (const auto& step : startup_cost_fn) {
        if (hours_off >= step.off_hours) cost = step.cost;
    }
    return cost;
}

double DispatchableGenerator::hot_start_cost() const {
    return startup_cost_fn.empty() ? 0.0 : startup_cost_fn.front().cost;
}

std::size_t GridCase::bus_index(int bus_id) const {
    for (std::size_t i = 0; i < buses.size(); ++i) {
        if (buses[i].id == bus_id) return i;
    }
    throw ValidationError("buses", fmt::format("no bus with id {}", bus_id));
}

std::size_t GridCase::line_index(int line_id) const {
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (lines[i].id == line_id) return i;
    }
    throw ValidationError("lines", fmt::format("no line with id {}", line_id));
}

bool GridCase::has_bus(int bus_id) const {
    return std::any_of(buses.begin(), buses.end(), [&](const Bus& b) { return b.id == bus_id; });
}

bool GridCase::is_reference_index(std::size_t bus_pos) const {
    const int id = buses[bus_pos].id;
    return std::find(reference_buses.begin(), reference_buses.end(), id) != reference_buses.end();
}

double GridCase::total_peak_load() const {
    return std::accumulate(buses.begin(), buses.end(), 0.0,
                           [](double s, const Bus& b) { return s + b.peak_load_mw; });
}

double GridCase::total_wind_capacity() const {
    return std::accumulate(wind_generators.begin(), wind_generators.end(), 0.0,
                           [](double s, const WindGenerator& w) { return s + w.capacity_mw; });
}

void validate(const GridCase& grid) {
    if (grid.buses.empty()) throw ValidationError("buses", "case has no buses");
    if (!(grid.base_mva > 0.0)) throw ValidationError("base_mva", "must be positive");
    for (std::size_t i = 0; i < grid.buses.size(); ++i) {
        const auto& b = grid.buses[i];
        const auto path = fmt::format("buses[{}]", i);
        if (!std::isfinite(b.peak_load_mw) || b.peak_load_mw < 0.0)
            throw ValidationError(path + ".peak_load_MW", "must be finite and non-negative");
        for (std::size_t j = 0; j < i; ++j) {
            if (grid.buses[j].id == b.id)
                throw ValidationError(path + ".id", fmt::format("duplicate bus id {}", b.id));
        }
    }
    for (std::size_t i = 0; i < grid.lines.size(); ++i) {
        const auto& l = grid.lines[i];
        const auto path = fmt::format("lines[{}]", i);
        if (!grid.has_bus(l.from_bus))
            throw ValidationError(path + ".from_bus",
                                  fmt::format("line {} references unknown bus {}", l.id, l.from_bus));
        if (!grid.has_bus(l.to_bus))
            throw ValidationError(path + ".to_bus",
                                  fmt::format("line {} references unknown bus {}", l.id, l.to_bus));
        if (l.from_bus == l.to_bus)
            throw ValidationError(path, fmt::format("line {} is a self loop", l.id));
        if (!(l.reactance_pu > 0.0))
            throw ValidationError(path + ".reactance_pu", fmt::format("line {} reactance must be > 0", l.id));
        if (!(l.flow_limit_mw > 0.0))
            throw ValidationError(path + ".flow_limit_MW", fmt::format("line {} limit must be > 0", l.id));
        for (std::size_t j = 0; j < i; ++j) {
            if (grid.lines[j].id == l.id)
                throw ValidationError(path + ".id", fmt::format("duplicate line id {}", l.id));
        }
    }
    for (std::size_t i = 0; i < grid.dispatchable_generators.size(); ++i) {
        const auto& g = grid.dispatchable_generators[i];
        const auto path = fmt::format("dispatchable_generators[{}]", i);
        if (!grid.has_bus(g.bus))
            throw ValidationError(path + ".bus", fmt::format("generator {} references unknown bus {}", g.id, g.bus));
        if (!(g.p_min_mw >= 0.0) || !(g.p_min_mw <= g.p_max_mw))
            throw ValidationError(path + ".p_min_MW", fmt::format("generator {} needs 0 <= p_min <= p_max", g.id));
        if (g.min_up_h < 1) throw ValidationError(path + ".min_up_h", "must be >= 1");
        if (g.min_down_h < 1) throw ValidationError(path + ".min_down_h", "must be >= 1");
        if (g.ramp_up_mw_per_h < 0.0 || g.ramp_down_mw_per_h < 0.0)
            throw ValidationError(path + ".ramp_up_MW_per_h", "ramp limits must be non-negative");
        if (g.cost_curve.empty()) throw ValidationError(path + ".cost_curve", "at least one segment required");
        double prev_up = 0.0;
        double prev_price = -std::numeric_limits<double>::infinity();
        for (std::size_t k = 0; k < g.cost_curve.size(); ++k) {
            const auto& seg = g.cost_curve[k];
            const auto sp = fmt::format("{}.cost_curve[{}]", path, k);
            if (!(seg.up_to_mw > prev_up)) throw ValidationError(sp, "breakpoints must increase");
            if (seg.price < prev_price) throw ValidationError(sp, "prices must be non-decreasing (convex cost)");
            prev_up = seg.up_to_mw;
            prev_price = seg.price;
        }
        if (prev_up + 1e-9 < g.p_max_mw)
            throw ValidationError(path + ".cost_curve", "segments must cover [0, p_max]");
        int prev_hours = -1;
        for (std::size_t k = 0; k < g.startup_cost_fn.size(); ++k) {
            const auto& st = g.startup_cost_fn[k];
            const auto sp = fmt::format("{}.startup_cost_fn[{}]", path, k);
            if (st.off_hours <= prev_hours) throw ValidationError(sp, "off_hours must increase");
            if (st.cost < 0.0) throw ValidationError(sp, "cost must be non-negative");
            if (k > 0 && st.cost < g.startup_cost_fn[k - 1].cost)
                throw ValidationError(sp, "start-up cost must not decrease with hours off");
            prev_hours = st.off_hours;
        }
        if (!g.startup_cost_fn.empty() && g.startup_cost_fn.front().off_hours != 0)
            throw ValidationError(path + ".startup_cost_fn[0]", "first step must start at 0 hours off");
    }
    for (std::size_t i = 0; i < grid.wind_generators.size(); ++i) {
        const auto& w = grid.wind_generators[i];
        const auto path = fmt::format("wind_generators[{}]", i);
        if (!grid.has_bus(w.bus))
            throw ValidationError(path + ".bus", fmt::format("wind generator {} references unknown bus {}", w.id, w.bus));
        if (!(w.capacity_mw >= 0.0)) throw ValidationError(path + ".capacity_MW", "must be non-negative");
    }
    if (grid.reference_buses.empty()) throw ValidationError("reference_buses", "at least one reference bus required");
    for (std::size_t i = 0; i < grid.reference_buses.size(); ++i) {
        if (!grid.has_bus(grid.reference_buses[i]))
            throw ValidationError(fmt::format("reference_buses[{}]", i),
                                  fmt::format("unknown bus {}", grid.reference_buses[i]));
    }
    if (!(grid.voll >= 0.0)) throw ValidationError("prices.voll", "must be non-negative");
    if (!(grid.wind_curtail_price >= 0.0)) throw ValidationError("prices.wind_curtail_price", "must be non-negative");
}

Topology Topology::all_in_service(const GridCase& grid) {
    return Topology{std::vector<bool>(grid.n_lines(), true)};
}

std::size_t Topology::count_in_service() const {
    return static_cast<std::size_t>(std::count(line_status.begin(), line_status.end(), true));
}

std::vector<int> connected_components(const GridCase& grid, const Topology& topology) {
    const std::size_t n = grid.n_buses();
    std::vector<int> parent(n);
    std::iota(parent.begin(), parent.end(), 0);
    auto find = [&](int x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    };
    for (std::size_t l = 0; l < grid.n_lines(); ++l) {
        if (!topology.in_service(l)) continue;
        const int a = find(static_cast<int>(grid.bus_index(grid.lines[l].from_bus)));
        const int b = find(static_cast<int>(grid.bus_index(grid.lines[l].to_bus)));
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
    std::vector<int> label(n);
    for (std::size_t i = 0; i < n; ++i) label[i] = find(static_cast<int>(i));
    return label;
}

std::vector<bool> angle_anchor_buses(const GridCase& grid, const Topology& topology) {
    const auto label = connected_components(grid, topology);
    const std::size_t n = grid.n_buses();
    std::vector<bool> anchor(n, false);
    std::vector<bool> has_ref(n, false);
    for (std::size_t i = 0; i < n; ++i) {
        if (grid.is_reference_index(i)) {
            anchor[i] = true;
            has_ref[label[i]] = true;
        }
    }
    for (std::size_t i = 0; i < n; ++i) {
        // label[i] is the lowest bus position in the island
        if (static_cast<std::size_t>(label[i]) == i && !has_ref[i]) anchor[i] = true;
    }
    return anchor;
}

DcMatrices dc_matrices(const GridCase& grid, const Topology& topology, IslandPolicy policy) {
    if (topology.size() != grid.n_lines())
        throw ValidationError("topology", fmt::format("length {} does not match {} lines", topology.size(),
                                                      grid.n_lines()));
    const auto nb = static_cast<Eigen::Index>(grid.n_buses());
    const auto nl = static_cast<Eigen::Index>(grid.n_lines());
    DcMatrices m;
    m.b_bus = Eigen::MatrixXd::Zero(nb, nb);
    m.b_f = Eigen::MatrixXd::Zero(nl, nb);
    m.p_bus_shift = Eigen::VectorXd::Zero(nb);
    m.p_f_shift = Eigen::VectorXd::Zero(nl);
    m.g_sh = Eigen::VectorXd::Zero(nb);
    for (Eigen::Index l = 0; l < nl; ++l) {
        if (!topology.in_service(static_cast<std::size_t>(l))) continue;
        const auto& line = grid.lines[static_cast<std::size_t>(l)];
        const auto i = static_cast<Eigen::Index>(grid.bus_index(line.from_bus));
        const auto j = static_cast<Eigen::Index>(grid.bus_index(line.to_bus));
        const double b = 1.0 / line.reactance_pu;
        m.b_f(l, i) = b;
        m.b_f(l, j) = -b;
        m.b_bus(i, i) += b;
        m.b_bus(j, j) += b;
        m.b_bus(i, j) -= b;
        m.b_bus(j, i) -= b;
    }
    if (policy == IslandPolicy::Reject) {
        const auto label = connected_components(grid, topology);
        std::vector<bool> has_ref(grid.n_buses(), false);
        for (std::size_t i = 0; i < grid.n_buses(); ++i) {
            if (grid.is_reference_index(i)) has_ref[label[i]] = true;
        }
        for (std::size_t i = 0; i < grid.n_buses(); ++i) {
            if (grid.buses[i].peak_load_mw > 0.0 && !has_ref[label[i]]) {
                throw SingularTopologyError(
                    fmt::format("bus {} carries load but is disconnected from every reference bus",
                                grid.buses[i].id));
            }
        }
    }
    return m;
}

GridCase apply_modifications(const GridCase& grid, const ModificationList& mods) {
    GridCase out = grid;
    for (std::size_t k = 0; k < mods.size(); ++k) {
        const auto& mod = mods[k];
        const auto path = fmt::format("modifications[{}]", k);
        switch (mod.kind) {
        case Modification::Kind::RemoveLine: {
            auto it = std::find_if(out.lines.begin(), out.lines.end(),
                                   [&](const Line& l) { return l.id == mod.line; });
            if (it == out.lines.end())
                throw ValidationError(path, fmt::format("remove_line: no line with id {}", mod.line));
            out.lines.erase(it);
            break;
        }
        case Modification::Kind::MoveLoad: {
            if (!out.has_bus(mod.from_bus) || !out.has_bus(mod.to_bus))
                throw ValidationError(path, fmt::format("move_load: unknown bus {} or {}", mod.from_bus, mod.to_bus));
            auto& from = out.buses[out.bus_index(mod.from_bus)];
            auto& to = out.buses[out.bus_index(mod.to_bus)];
            if (&from == &to) break;
            to.peak_load_mw += from.peak_load_mw;
            from.peak_load_mw = 0.0;
            break;
        }
        case Modification::Kind::ScaleLoad: {
            if (!out.has_bus(mod.bus)) throw ValidationError(path, fmt::format("scale_load: unknown bus {}", mod.bus));
            if (!(mod.factor >= 0.0)) throw ValidationError(path, "scale_load: factor must be non-negative");
            out.buses[out.bus_index(mod.bus)].peak_load_mw *= mod.factor;
            break;
        }
        }
    }
    validate(out);
    return out;
}

}  // namespace gridsched
