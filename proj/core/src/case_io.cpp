#include <fmt/format.h>

#include "gridsched/errors.hpp"
#include "gridsched/grid.hpp"
#include "json_util.hpp"

namespace gridsched {

using detail::field;
using detail::field_or;
using detail::Json;

namespace {

GridCase case_from_json(const Json& doc, const std::string& origin) {
    if (!doc.is_object()) throw ParseError(origin + ": case file must be an object");
    GridCase g;
    const std::string root = origin;
    g.name = field_or<std::string>(doc, "name", "", root);
    g.base_mva = field_or<double>(doc, "base_mva", 100.0, root);

    const auto& buses = detail::require_array(doc, "buses", root);
    for (std::size_t i = 0; i < buses.size(); ++i) {
        const auto p = fmt::format("buses[{}]", i);
        Bus b;
        b.id = field<int>(buses[i], "id", p);
        b.peak_load_mw = field<double>(buses[i], "peak_load_MW", p);
        b.load_profile_id = field_or<int>(buses[i], "load_profile_id", 0, p);
        g.buses.push_back(b);
    }
    const auto& lines = detail::require_array(doc, "lines", root);
    for (std::size_t i = 0; i < lines.size(); ++i) {
        const auto p = fmt::format("lines[{}]", i);
        Line l;
        l.id = field<int>(lines[i], "id", p);
        l.from_bus = field<int>(lines[i], "from_bus", p);
        l.to_bus = field<int>(lines[i], "to_bus", p);
        l.reactance_pu = field<double>(lines[i], "reactance_pu", p);
        l.flow_limit_mw = field<double>(lines[i], "flow_limit_MW", p);
        g.lines.push_back(l);
    }
    const auto& gens = detail::require_array(doc, "dispatchable_generators", root);
    for (std::size_t i = 0; i < gens.size(); ++i) {
        const auto p = fmt::format("dispatchable_generators[{}]", i);
        const auto& j = gens[i];
        DispatchableGenerator d;
        d.id = field<int>(j, "id", p);
        d.bus = field<int>(j, "bus", p);
        d.p_min_mw = field<double>(j, "p_min_MW", p);
        d.p_max_mw = field<double>(j, "p_max_MW", p);
        d.ramp_up_mw_per_h = field<double>(j, "ramp_up_MW_per_h", p);
        d.ramp_down_mw_per_h = field<double>(j, "ramp_down_MW_per_h", p);
        d.min_up_h = field<int>(j, "min_up_h", p);
        d.min_down_h = field<int>(j, "min_down_h", p);
        d.no_load_cost = field_or<double>(j, "no_load_cost", 0.0, p);
        const auto& curve = detail::require_array(j, "cost_curve", p);
        for (std::size_t k = 0; k < curve.size(); ++k) {
            const auto sp = fmt::format("{}.cost_curve[{}]", p, k);
            d.cost_curve.push_back({field<double>(curve[k], "up_to_MW", sp), field<double>(curve[k], "price", sp)});
        }
        if (j.contains("startup_cost_fn")) {
            const auto& su = detail::require_array(j, "startup_cost_fn", p);
            for (std::size_t k = 0; k < su.size(); ++k) {
                const auto sp = fmt::format("{}.startup_cost_fn[{}]", p, k);
                d.startup_cost_fn.push_back({field<int>(su[k], "off_hours", sp), field<double>(su[k], "cost", sp)});
            }
        }
        g.dispatchable_generators.push_back(std::move(d));
    }
    if (doc.contains("wind_generators")) {
        const auto& winds = detail::require_array(doc, "wind_generators", root);
        for (std::size_t i = 0; i < winds.size(); ++i) {
            const auto p = fmt::format("wind_generators[{}]", i);
            WindGenerator w;
            w.id = field<int>(winds[i], "id", p);
            w.bus = field<int>(winds[i], "bus", p);
            w.capacity_mw = field<double>(winds[i], "capacity_MW", p);
            g.wind_generators.push_back(w);
        }
    }
    g.reference_buses = field<std::vector<int>>(doc, "reference_buses", root);
    const auto& prices = detail::require(doc, "prices", root);
    g.voll = field<double>(prices, "voll", "prices");
    g.wind_curtail_price = field<double>(prices, "wind_curtail_price", "prices");
    return g;
}

Json case_to_json(const GridCase& g) {
    Json doc = Json::object();
    doc["name"] = g.name;
    doc["base_mva"] = g.base_mva;
    doc["buses"] = Json::array();
    for (const auto& b : g.buses) {
        doc["buses"].push_back({{"id", b.id}, {"peak_load_MW", b.peak_load_mw}, {"load_profile_id", b.load_profile_id}});
    }
    doc["lines"] = Json::array();
    for (const auto& l : g.lines) {
        doc["lines"].push_back({{"id", l.id},
                                {"from_bus", l.from_bus},
                                {"to_bus", l.to_bus},
                                {"reactance_pu", l.reactance_pu},
                                {"flow_limit_MW", l.flow_limit_mw}});
    }
    doc["dispatchable_generators"] = Json::array();
    for (const auto& d : g.dispatchable_generators) {
        Json curve = Json::array();
        for (const auto& s : d.cost_curve) curve.push_back({{"up_to_MW", s.up_to_mw}, {"price", s.price}});
        Json su = Json::array();
        for (const auto& s : d.startup_cost_fn) su.push_back({{"off_hours", s.off_hours}, {"cost", s.cost}});
        doc["dispatchable_generators"].push_back({{"id", d.id},
                                                  {"bus", d.bus},
                                                  {"p_min_MW", d.p_min_mw},
                                                  {"p_max_MW", d.p_max_mw},
                                                  {"ramp_up_MW_per_h", d.ramp_up_mw_per_h},
                                                  {"ramp_down_MW_per_h", d.ramp_down_mw_per_h},
                                                  {"min_up_h", d.min_up_h},
                                                  {"min_down_h", d.min_down_h},
                                                  {"no_load_cost", d.no_load_cost},
                                                  {"cost_curve", curve},
                                                  {"startup_cost_fn", su}});
    }
    doc["wind_generators"] = Json::array();
    for (const auto& w : g.wind_generators) {
        doc["wind_generators"].push_back({{"id", w.id}, {"bus", w.bus}, {"capacity_MW", w.capacity_mw}});
    }
    doc["reference_buses"] = g.reference_buses;
    doc["prices"] = {{"voll", g.voll}, {"wind_curtail_price", g.wind_curtail_price}};
    return doc;
}

Modification modification_from_json(const Json& rec, const std::string& path) {
    const auto kind = field<std::string>(rec, "kind", path);
    const auto& args = detail::require(rec, "args", path);
    const auto ap = path + ".args";
    Modification m;
    if (kind == "remove_line") {
        m.kind = Modification::Kind::RemoveLine;
        m.line = field<int>(args, "line", ap);
    } else if (kind == "move_load") {
        m.kind = Modification::Kind::MoveLoad;
        m.from_bus = field<int>(args, "from_bus", ap);
        m.to_bus = field<int>(args, "to_bus", ap);
    } else if (kind == "scale_load") {
        m.kind = Modification::Kind::ScaleLoad;
        m.bus = field<int>(args, "bus", ap);
        m.factor = field<double>(args, "factor", ap);
    } else {
        throw ParseError(fmt::format("{}.kind: unknown modification kind '{}'", path, kind));
    }
    return m;
}

}  // namespace

GridCase parse_case(const std::string& text, const std::string& origin) {
    auto g = case_from_json(detail::parse_json(text, origin), origin);
    validate(g);
    return g;
}

GridCase load_case(const std::filesystem::path& path) {
    return parse_case(detail::read_text_file(path), path.string());
}

std::string write_case(const GridCase& grid) { return case_to_json(grid).dump(2) + "\n"; }

std::string case_hash(const GridCase& grid) {
    return fmt::format("{:016x}", detail::fnv1a64(case_to_json(grid).dump()));
}

ModificationList parse_modifications(const std::string& text, const std::string& origin) {
    const auto doc = detail::parse_json(text, origin);
    if (!doc.is_array()) throw ParseError(origin + ": modification file must be a list of {kind, args}");
    ModificationList mods;
    for (std::size_t i = 0; i < doc.size(); ++i) {
        mods.push_back(modification_from_json(doc[i], fmt::format("modifications[{}]", i)));
    }
    return mods;
}

ModificationList load_modifications(const std::filesystem::path& path) {
    return parse_modifications(detail::read_text_file(path), path.string());
}

}  // namespace gridsched
