#include "gridsched/config.hpp"

#include <algorithm>
#include <sstream>

#include <fmt/format.h>

#include "json_util.hpp"

namespace gridsched {

using detail::field;
using detail::field_or;
using detail::Json;

const char* to_string(AssessmentMode m) { return m == AssessmentMode::Exact ? "exact" : "proxy"; }

namespace {

std::filesystem::path resolve_path(const std::filesystem::path& base, const std::string& p) {
    std::filesystem::path path(p);
    if (path.is_relative()) path = base / path;
    return path.lexically_normal();
}

std::array<double, 12> month_array(const Json& v, const std::string& path) {
    auto vec = detail::get_as<std::vector<double>>(v, path);
    if (vec.size() != 12) throw ParseError(fmt::format("{}: expected 12 values, got {}", path, vec.size()));
    std::array<double, 12> out{};
    std::copy(vec.begin(), vec.end(), out.begin());
    return out;
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
        auto b = cell.find_first_not_of(" \t\r");
        auto e = cell.find_last_not_of(" \t\r");
        out.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
    }
    return out;
}

}  // namespace

Eigen::MatrixXd load_profile_csv(const std::filesystem::path& path, const std::vector<int>& ids, int cols) {
    std::stringstream in(detail::read_text_file(path));
    std::string line;
    if (!std::getline(in, line)) throw ParseError(fmt::format("{}: empty file", path.string()));
    auto header = split_csv_line(line);
    if (static_cast<int>(header.size()) != cols + 1)
        throw ParseError(fmt::format("{}: header must have {} columns", path.string(), cols + 1));
    Eigen::MatrixXd out = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(ids.size()), cols, -1.0);
    std::vector<bool> seen(ids.size(), false);
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto cells = split_csv_line(line);
        if (static_cast<int>(cells.size()) != cols + 1)
            throw ParseError(fmt::format("{}:{}: expected {} cells", path.string(), lineno, cols + 1));
        try {
            int id = std::stoi(cells[0]);
            auto it = std::find(ids.begin(), ids.end(), id);
            if (it == ids.end()) throw ParseError(fmt::format("{}:{}: unknown id {}", path.string(), lineno, id));
            auto r = static_cast<std::size_t>(it - ids.begin());
            for (int c = 0; c < cols; ++c) out(static_cast<Eigen::Index>(r), c) = std::stod(cells[c + 1]);
            seen[r] = true;
        } catch (const std::logic_error&) {
            throw ParseError(fmt::format("{}:{}: malformed number", path.string(), lineno));
        }
    }
    for (std::size_t r = 0; r < ids.size(); ++r)
        if (!seen[r]) throw ParseError(fmt::format("{}: missing row for id {}", path.string(), ids[r]));
    return out;
}

ProcessParams ProcessConfig::resolve(const GridCase& grid) const {
    ProcessParams p = ProcessParams::defaults_for(grid);
    p.p_w_sigma = p_w_sigma;
    p.p_d_sigma = p_d_sigma;
    p.wind_walk_noise_frac = wind_walk_noise_frac;
    p.load_walk_noise_frac = load_walk_noise_frac;
    p.seasonal_ar_coeff = seasonal_ar_coeff;
    p.seasonal_noise_sd = seasonal_noise_sd;
    p.forced_outage_rate = forced_outage_rate;
    if (monthly_wind_profile) p.monthly_wind_profile = *monthly_wind_profile;
    if (monthly_load_profile) p.monthly_load_profile = *monthly_load_profile;
    if (daily_wind_profile_csv) {
        std::vector<int> ids;
        for (const auto& w : grid.wind_generators) ids.push_back(w.id);
        p.daily_wind_profile_mw = load_profile_csv(*daily_wind_profile_csv, ids, kHoursPerDay);
    }
    if (daily_load_profile_csv) {
        std::vector<int> ids;
        for (const auto& b : grid.buses) ids.push_back(b.id);
        p.daily_load_profile_mw = load_profile_csv(*daily_load_profile_csv, ids, kHoursPerDay);
    }
    p.validate(grid);
    return p;
}

void ExperimentConfig::validate() const {
    if (case_path.empty()) throw ValidationError("case", "case path is empty");
    sampler.validate();
    thresholds.validate();
    ce.validate();
    for (std::size_t i = 0; i < outage_requirements.size(); ++i) {
        outage_requirements[i].validate();
        for (std::size_t j = 0; j < i; ++j)
            if (outage_requirements[j].line_id == outage_requirements[i].line_id)
                throw ValidationError(fmt::format("outage_requirements[{}]", i), "duplicate line");
        for (int m : outage_requirements[i].allowed_months)
            if (m > sampler.months)
                throw ValidationError(fmt::format("outage_requirements[{}].allowed_months", i),
                                      fmt::format("month {} beyond the simulated {} months", m, sampler.months));
    }
    if (mode == AssessmentMode::Proxy && !proxy.dataset)
        throw ValidationError("proxy.dataset", "proxy mode needs a dataset path");
    if (workers < 1) throw ValidationError("workers", "must be at least 1");
    if (scenarios_per_assessment < 1) throw ValidationError("scenarios_per_assessment", "must be at least 1");
    if (voll && *voll <= 0) throw ValidationError("prices.voll", "must be positive");
    if (wind_curtail_price && *wind_curtail_price < 0) throw ValidationError("prices.wind_curtail_price", "negative");
    if (proxy.min_bucket < 1) throw ValidationError("proxy.min_bucket", "must be at least 1");
}

ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir,
                              const std::string& origin) {
    const Json root = detail::parse_json(text, origin);
    const std::string r = origin;
    ExperimentConfig cfg;
    cfg.case_path = resolve_path(base_dir, field<std::string>(root, "case", r));
    if (auto it = root.find("modifications"); it != root.end() && !it->is_null())
        cfg.modifications_path = resolve_path(base_dir, detail::get_as<std::string>(*it, r + ".modifications"));

    if (auto it = root.find("prices"); it != root.end() && !it->is_null()) {
        const std::string p = r + ".prices";
        if (it->contains("voll")) cfg.voll = field<double>(*it, "voll", p);
        if (it->contains("wind_curtail_price")) cfg.wind_curtail_price = field<double>(*it, "wind_curtail_price", p);
    }

    if (auto it = root.find("outage_requirements"); it != root.end()) {
        if (!it->is_array()) throw ParseError(r + ".outage_requirements: expected an array");
        for (std::size_t i = 0; i < it->size(); ++i) {
            const auto& o = (*it)[i];
            const std::string p = fmt::format("{}.outage_requirements[{}]", r, i);
            ce::OutageRequirement req;
            req.line_id = field<int>(o, "line", p);
            req.count = field_or<int>(o, "count", 1, p);
            req.allowed_months = field_or<std::vector<int>>(o, "allowed_months", {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, 12}, p);
            std::sort(req.allowed_months.begin(), req.allowed_months.end());
            cfg.outage_requirements.push_back(std::move(req));
        }
    }

    if (auto it = root.find("sampler"); it != root.end() && !it->is_null()) {
        const std::string p = r + ".sampler";
        cfg.sampler.w_s = field_or(*it, "w_s", cfg.sampler.w_s, p);
        cfg.sampler.n_s = field_or(*it, "n_s", cfg.sampler.n_s, p);
        cfg.sampler.w_rt = field_or(*it, "w_rt", cfg.sampler.w_rt, p);
        cfg.sampler.n_rt = field_or(*it, "n_rt", cfg.sampler.n_rt, p);
        cfg.sampler.months = field_or(*it, "months", cfg.sampler.months, p);
    }

    if (auto it = root.find("process"); it != root.end() && !it->is_null()) {
        const std::string p = r + ".process";
        auto& pc = cfg.process;
        pc.p_w_sigma = field_or(*it, "p_w_sigma", pc.p_w_sigma, p);
        pc.p_d_sigma = field_or(*it, "p_d_sigma", pc.p_d_sigma, p);
        pc.wind_walk_noise_frac = field_or(*it, "wind_walk_noise_frac", pc.wind_walk_noise_frac, p);
        pc.load_walk_noise_frac = field_or(*it, "load_walk_noise_frac", pc.load_walk_noise_frac, p);
        pc.seasonal_ar_coeff = field_or(*it, "seasonal_ar_coeff", pc.seasonal_ar_coeff, p);
        pc.seasonal_noise_sd = field_or(*it, "seasonal_noise_sd", pc.seasonal_noise_sd, p);
        pc.forced_outage_rate = field_or(*it, "forced_outage_rate", pc.forced_outage_rate, p);
        if (auto m = it->find("monthly_wind_profile"); m != it->end() && !m->is_null())
            pc.monthly_wind_profile = month_array(*m, p + ".monthly_wind_profile");
        if (auto m = it->find("monthly_load_profile"); m != it->end() && !m->is_null())
            pc.monthly_load_profile = month_array(*m, p + ".monthly_load_profile");
        if (auto m = it->find("daily_wind_profile_csv"); m != it->end() && !m->is_null())
            pc.daily_wind_profile_csv = resolve_path(base_dir, detail::get_as<std::string>(*m, p));
        if (auto m = it->find("daily_load_profile_csv"); m != it->end() && !m->is_null())
            pc.daily_load_profile_csv = resolve_path(base_dir, detail::get_as<std::string>(*m, p));
    }

    if (auto it = root.find("thresholds"); it != root.end() && !it->is_null()) {
        const std::string p = r + ".thresholds";
        auto& t = cfg.thresholds;
        t.r_min = field_or(*it, "r_min", t.r_min, p);
        t.shed_max_frac = field_or(*it, "shed_max_frac", t.shed_max_frac, p);
        t.alpha_r = field_or(*it, "alpha_r", t.alpha_r, p);
        t.alpha_shed = field_or(*it, "alpha_shed", t.alpha_shed, p);
    }

    if (auto it = root.find("ce"); it != root.end() && !it->is_null()) {
        const std::string p = r + ".ce";
        auto& c = cfg.ce;
        c.n_samples = field_or(*it, "n_samples", c.n_samples, p);
        c.rho = field_or(*it, "rho", c.rho, p);
        c.max_iters = field_or(*it, "max_iters", c.max_iters, p);
        c.smoothing = field_or(*it, "smoothing", c.smoothing, p);
        if (auto e = it->find("eps_entropy"); e != it->end() && !e->is_null())
            c.eps_entropy = detail::get_as<double>(*e, p + ".eps_entropy");
        if (auto k = it->find("kappa"); k != it->end() && !k->is_null())
            c.kappa = detail::get_as<double>(*k, p + ".kappa");
    }

    const auto mode = field_or<std::string>(root, "mode", "exact", r);
    if (mode == "exact")
        cfg.mode = AssessmentMode::Exact;
    else if (mode == "proxy")
        cfg.mode = AssessmentMode::Proxy;
    else
        throw ParseError(fmt::format("{}.mode: expected 'exact' or 'proxy', got '{}'", r, mode));

    if (auto it = root.find("proxy"); it != root.end() && !it->is_null()) {
        const std::string p = r + ".proxy";
        auto& px = cfg.proxy;
        if (auto d = it->find("dataset"); d != it->end() && !d->is_null())
            px.dataset = resolve_path(base_dir, detail::get_as<std::string>(*d, p + ".dataset"));
        px.n_records = field_or(*it, "n_records", px.n_records, p);
        px.min_bucket = field_or(*it, "min_bucket", px.min_bucket, p);
        px.max_combinations = field_or(*it, "max_combinations", px.max_combinations, p);
        px.per_bus_features = field_or(*it, "per_bus_features", px.per_bus_features, p);
        px.zones = field_or(*it, "zones", px.zones, p);
        px.shared = field_or(*it, "shared", px.shared, p);
        px.n_test = field_or(*it, "n_test", px.n_test, p);
    }

    if (auto it = root.find("rt"); it != root.end() && !it->is_null())
        cfg.rt.allow_emergency_commit =
            field_or(*it, "allow_emergency_commit", cfg.rt.allow_emergency_commit, r + ".rt");

    cfg.scenarios_per_assessment = field_or(root, "scenarios_per_assessment", cfg.scenarios_per_assessment, r);
    cfg.fixed_scenarios = field_or(root, "fixed_scenarios", cfg.fixed_scenarios, r);
    cfg.master_seed = field_or<std::uint64_t>(root, "master_seed", cfg.master_seed, r);
    cfg.workers = field_or(root, "workers", cfg.workers, r);
    cfg.ce.workers = cfg.workers;

    cfg.validate();
    return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    return parse_config(detail::read_text_file(path), path.parent_path(), path.string());
}

}  // namespace gridsched
