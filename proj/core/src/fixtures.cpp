#include "gridsched/fixtures.hpp"

#include <algorithm>
#include <sstream>

#include <fmt/format.h>

#include "gridsched/uc.hpp"
#include "json_util.hpp"

namespace gridsched::fixtures {

namespace {

std::string num(double v) { return fmt::format("{:.12g}", v); }

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) out.push_back(line);
    return out;
}

const std::vector<std::string>& oracle_files() {
    static const std::vector<std::string> f{"milp_random.csv", "milp_uc.csv", "enumeration.csv"};
    return f;
}

}  // namespace

FixtureSpec load_fixture(const std::filesystem::path& dir) {
    const auto path = dir / "fixture.json";
    const auto j = detail::parse_json(detail::read_text_file(path), path.string());
    const std::string p = path.string();
    FixtureSpec spec;
    spec.dir = dir;
    std::filesystem::path cfg(detail::field<std::string>(j, "config", p));
    spec.config = (cfg.is_relative() ? dir / cfg : cfg).lexically_normal();
    spec.random_milps = detail::field_or(j, "random_milps", spec.random_milps, p);
    spec.max_binaries = detail::field_or(j, "max_binaries", spec.max_binaries, p);
    spec.uc_instances = detail::field_or(j, "uc_instances", spec.uc_instances, p);
    spec.uc_hours = detail::field_or(j, "uc_hours", spec.uc_hours, p);
    spec.seed = detail::field_or<std::uint64_t>(j, "seed", spec.seed, p);
    if (spec.max_binaries < 2 || spec.max_binaries > 20) throw ValidationError("max_binaries", "must lie in 2..20");
    if (spec.uc_hours < 1 || spec.uc_hours > kHoursPerDay) throw ValidationError("uc_hours", "must lie in 1..24");
    return spec;
}

lp::MixedIntegerProgram random_milp(Rng& rng, int max_binaries) {
    lp::MixedIntegerProgram mip;
    auto& lp = mip.lp;
    const int nb = uniform_int(rng, 2, max_binaries);
    const int nc = uniform_int(rng, 1, 4);
    const int nr = uniform_int(rng, 2, 6);
    auto u = [&](double lo, double hi) { return lo + (hi - lo) * uniform01(rng); };
    std::vector<double> x0;
    for (int i = 0; i < nb; ++i) {
        mip.binary_vars.push_back(lp.add_variable(0.0, 1.0, std::round(u(-10.0, 10.0) * 4.0) / 4.0, fmt::format("b{}", i)));
        x0.push_back(uniform01(rng) < 0.5 ? 0.0 : 1.0);
    }
    for (int i = 0; i < nc; ++i) {
        const double hi = std::round(u(1.0, 10.0));
        lp.add_variable(0.0, hi, std::round(u(-5.0, 5.0) * 4.0) / 4.0, fmt::format("c{}", i));
        x0.push_back(u(0.0, hi));
    }
    for (int r = 0; r < nr; ++r) {
        std::vector<lp::Term> terms;
        double act = 0.0;
        for (std::size_t j = 0; j < x0.size(); ++j) {
            if (uniform01(rng) < 0.3) continue;
            const double a = std::round(u(-5.0, 5.0));
            if (a == 0.0) continue;
            terms.push_back({j, a});
            act += a * x0[j];
        }
        if (terms.empty()) continue;
        const bool le = uniform01(rng) < 0.6;
        const double slack = std::round(u(0.0, 3.0) * 2.0) / 2.0;
        lp.add_constraint(std::move(terms), le ? lp::Relation::LessEqual : lp::Relation::GreaterEqual,
                          le ? act + slack : act - slack, fmt::format("r{}", r));
    }
    return mip;
}

std::vector<lp::MixedIntegerProgram> random_milps(const FixtureSpec& spec) {
    Rng rng = make_rng(derive_seed(spec.seed, "random-milp"));
    std::vector<lp::MixedIntegerProgram> out;
    for (std::size_t i = 0; i < spec.random_milps; ++i) out.push_back(random_milp(rng, spec.max_binaries));
    return out;
}

std::vector<UcInstance> uc_instances(const FixtureSpec& spec, const GridCase& grid, const ProcessParams& process) {
    Rng rng = make_rng(derive_seed(spec.seed, "uc-instances"));
    std::vector<UcInstance> out;
    for (std::size_t i = 0; i < spec.uc_instances; ++i) {
        UcInstance inst;
        inst.month = uniform_int(rng, 1, 12);
        const int prev = inst.month == 1 ? 12 : inst.month - 1;
        const auto season = seasonal_step(seasonal_mean(prev, process), inst.month, process, rng);
        inst.day_of_year = first_day_of_month(inst.month) + uniform_int(rng, 0, days_in_month(inst.month) - 1);
        const auto full = sample_day_ahead(grid, inst.day_of_year, season, process, rng);
        const int start = uniform_int(rng, 0, kHoursPerDay - spec.uc_hours);
        inst.forecast.wind = full.wind.middleCols(start, spec.uc_hours);
        inst.forecast.load = full.load.middleCols(start, spec.uc_hours);
        out.push_back(std::move(inst));
    }
    return out;
}

std::vector<ce::OutageSchedule> all_schedules(const std::vector<ce::OutageRequirement>& reqs) {
    std::vector<std::vector<std::vector<int>>> combos;
    for (const auto& r : reqs) combos.push_back(ce::month_combinations(r.allowed_months, r.count));
    std::vector<ce::OutageSchedule> out;
    std::vector<std::size_t> pick(reqs.size(), 0);
    while (true) {
        ce::OutageSchedule s = ce::empty_schedule(reqs);
        for (std::size_t r = 0; r < reqs.size(); ++r)
            for (int m : combos[r][pick[r]]) s.rows[r][static_cast<std::size_t>(m - 1)] = 1;
        out.push_back(std::move(s));
        std::size_t r = reqs.size();
        while (r > 0) {
            --r;
            if (++pick[r] < combos[r].size()) break;
            pick[r] = 0;
            if (r == 0) return out;
        }
        if (reqs.empty()) return out;
    }
}

std::size_t Enumeration::best() const {
    std::size_t b = 0;
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].penalized_cost < rows[b].penalized_cost) b = i;
    return b;
}

Enumeration enumerate_schedules(const Experiment& ex) {
    const auto& cfg = ex.config();
    Enumeration e;
    e.seed = ex.assessment_seed(0);
    for (auto& s : all_schedules(cfg.outage_requirements)) {
        EnumerationRow row;
        row.metrics = ex.assess(s, e.seed, 1).metrics;
        row.schedule = std::move(s);
        e.rows.push_back(std::move(row));
    }
    if (cfg.ce.kappa) {
        e.barrier = ce::BarrierParams{*cfg.ce.kappa, 100.0 * *cfg.ce.kappa};
    } else {
        double mean = 0.0;
        for (const auto& r : e.rows) mean += r.metrics.expected_cost;
        e.barrier = ce::BarrierParams::from_scale(mean / static_cast<double>(std::max<std::size_t>(1, e.rows.size())));
    }
    for (auto& r : e.rows) r.penalized_cost = ce::penalized_cost(r.metrics, cfg.thresholds, e.barrier);
    return e;
}

std::string enumeration_csv(const Enumeration& e) {
    std::vector<std::size_t> order(e.rows.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return e.rows[a].penalized_cost < e.rows[b].penalized_cost; });
    std::vector<std::size_t> rank(order.size());
    for (std::size_t i = 0; i < order.size(); ++i) rank[order[i]] = i + 1;
    std::string out =
        "index,rank,schedule,expected_cost,penalized_cost,p_reliability_ok,p_shed_ok,mean_reliability,mean_shed_frac\n";
    for (std::size_t i = 0; i < e.rows.size(); ++i) {
        const auto& r = e.rows[i];
        out += fmt::format("{},{},\"{}\",{},{},{},{},{},{}\n", i, rank[i], r.schedule.key(), num(r.metrics.expected_cost),
                           num(r.penalized_cost), num(r.metrics.p_reliability_ok), num(r.metrics.p_shed_ok),
                           num(r.metrics.mean_reliability()), num(r.metrics.mean_shed_frac()));
    }
    return out;
}

std::map<std::string, std::string> compute_oracles(const FixtureSpec& spec) {
    std::map<std::string, std::string> out;

    std::string milp = "instance,binaries,columns,rows,status,objective\n";
    const auto mips = random_milps(spec);
    for (std::size_t i = 0; i < mips.size(); ++i) {
        const auto sol = lp::brute_force_milp(mips[i]);
        milp += fmt::format("{},{},{},{},{},{}\n", i, mips[i].binary_vars.size(), mips[i].lp.objective.size(),
                            mips[i].lp.constraints.size(), lp::to_string(sol.status),
                            sol.optimal() ? num(sol.objective) : "");
    }
    out["milp_random.csv"] = milp;

    Experiment ex(load_config(spec.config));
    const auto& grid = ex.grid();
    std::string uc = "instance,month,day,status,objective\n";
    const auto insts = uc_instances(spec, grid, ex.process());
    for (std::size_t i = 0; i < insts.size(); ++i) {
        const auto prob = build_uc(grid, Topology::all_in_service(grid), insts[i].forecast, unconstrained_start(grid));
        const auto sol = lp::brute_force_milp(prob.mip);
        uc += fmt::format("{},{},{},{},{}\n", i, insts[i].month, insts[i].day_of_year, lp::to_string(sol.status),
                          sol.optimal() ? num(sol.objective) : "");
    }
    out["milp_uc.csv"] = uc;

    out["enumeration.csv"] = enumeration_csv(enumerate_schedules(ex));
    return out;
}

std::vector<DriftEntry> diff_oracles(const std::map<std::string, std::string>& committed,
                                     const std::map<std::string, std::string>& fresh) {
    std::vector<DriftEntry> drift;
    for (const auto& [name, text] : fresh) {
        auto it = committed.find(name);
        if (it == committed.end()) {
            drift.push_back({name, 0, "<missing>", "<present>"});
            continue;
        }
        const auto a = lines_of(it->second), b = lines_of(text);
        for (std::size_t i = 0; i < std::max(a.size(), b.size()); ++i) {
            const std::string ea = i < a.size() ? a[i] : "<eof>";
            const std::string eb = i < b.size() ? b[i] : "<eof>";
            if (ea != eb) drift.push_back({name, i + 1, ea, eb});
        }
        if (drift.empty() && it->second != text) drift.push_back({name, 0, "<bytes>", "<bytes differ>"});
    }
    return drift;
}

std::vector<DriftEntry> regenerate_oracles(const std::filesystem::path& fixture_dir, bool write) {
    const auto spec = load_fixture(fixture_dir);
    const auto fresh = compute_oracles(spec);
    if (write) {
        for (const auto& [name, text] : fresh) detail::write_text_file(fixture_dir / name, text);
        return {};
    }
    std::map<std::string, std::string> committed;
    for (const auto& name : oracle_files()) {
        const auto path = fixture_dir / name;
        if (std::filesystem::exists(path)) committed[name] = detail::read_text_file(path);
    }
    auto drift = diff_oracles(committed, fresh);
    if (!drift.empty()) {
        std::string msg = fmt::format("{} oracle entries differ", drift.size());
        for (std::size_t i = 0; i < std::min<std::size_t>(drift.size(), 20); ++i)
            msg += fmt::format("\n  {}:{}: committed '{}' regenerated '{}'", drift[i].file, drift[i].line,
                               drift[i].expected, drift[i].actual);
        throw OracleDriftError(msg);
    }
    return drift;
}

}  // namespace gridsched::fixtures
