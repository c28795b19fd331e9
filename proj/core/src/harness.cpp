#include "gridsched/harness.hpp"

#include <algorithm>
#include <chrono>
#include <sstream>

#include <fmt/format.h>

#include "gridsched/parallel.hpp"
#include "gridsched/random.hpp"
#include "gridsched/rt.hpp"
#include "json_util.hpp"

namespace gridsched {

namespace {

using OJson = nlohmann::ordered_json;

constexpr std::size_t kUcCacheLimit = 200000;
constexpr std::size_t kScenarioCacheLimit = 64;
constexpr std::size_t kReportCacheLimit = 100000;

[[noreturn]] void rethrow_with(const std::string& ctx) {
    try {
        throw;
    } catch (const InfeasibleError& e) {
        throw InfeasibleError(ctx + ": " + e.what());
    } catch (const NumericalError& e) {
        throw NumericalError(ctx + ": " + e.what());
    } catch (const MissingTopologyError& e) {
        throw MissingTopologyError(ctx + ": " + e.what());
    } catch (const SingularTopologyError& e) {
        throw SingularTopologyError(ctx + ": " + e.what());
    }
}

std::string topology_bits(const Topology& t) {
    std::string s(t.size(), '1');
    for (std::size_t l = 0; l < t.size(); ++l)
        if (!t.in_service(l)) s[l] = '0';
    return s;
}

std::string num(double v) { return fmt::format("{:.12g}", v); }

std::vector<std::string> split_line(const std::string& line) {
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

std::string month_header() {
    std::string h = "line_id";
    for (int m = 1; m <= 12; ++m) h += fmt::format(",{}", m);
    return h + "\n";
}

OJson report_to_json(const AssessmentReport& r, const ChanceThresholds& thr,
                     const std::optional<ce::BarrierParams>& barrier) {
    OJson j;
    j["mode"] = to_string(r.mode);
    j["seed"] = r.seed;
    j["schedule"] = r.schedule.key();
    j["expected_cost"] = r.metrics.expected_cost;
    if (barrier) j["penalized_cost"] = ce::penalized_cost(r.metrics, thr, *barrier);
    j["p_reliability_ok"] = r.metrics.p_reliability_ok;
    j["p_shed_ok"] = r.metrics.p_shed_ok;
    j["mean_reliability"] = r.metrics.mean_reliability();
    j["mean_shed_frac"] = r.metrics.mean_shed_frac();
    OJson sc = OJson::array();
    for (const auto& s : r.metrics.per_scenario) {
        OJson e;
        e["total_cost"] = s.total_cost;
        e["mean_reliability"] = s.mean_reliability;
        e["mean_shed_mw"] = s.mean_shed_mw;
        e["mean_shed_frac"] = s.mean_shed_frac;
        sc.push_back(e);
    }
    j["scenarios"] = sc;
    OJson months = OJson::array();
    for (const auto& m : r.months) {
        OJson e;
        e["month"] = m.month;
        e["cost"] = m.cost;
        e["da_cost"] = m.da_cost;
        e["reliability"] = m.reliability;
        e["shed_mw"] = m.shed_mw;
        months.push_back(e);
    }
    j["months"] = months;
    return j;
}

}  // namespace

GridCase load_experiment_case(const ExperimentConfig& cfg) {
    GridCase grid = load_case(cfg.case_path);
    if (cfg.modifications_path) grid = apply_modifications(grid, load_modifications(*cfg.modifications_path));
    if (cfg.voll) grid.voll = *cfg.voll;
    if (cfg.wind_curtail_price) grid.wind_curtail_price = *cfg.wind_curtail_price;
    validate(grid);
    for (std::size_t i = 0; i < cfg.outage_requirements.size(); ++i) {
        const int id = cfg.outage_requirements[i].line_id;
        if (std::none_of(grid.lines.begin(), grid.lines.end(), [&](const Line& l) { return l.id == id; }))
            throw ValidationError(fmt::format("outage_requirements[{}].line", i), fmt::format("unknown line {}", id));
    }
    return grid;
}

proxy::OutageSet proxy_outage_set(const ExperimentConfig& cfg) {
    proxy::OutageSet set;
    for (const auto& r : cfg.outage_requirements) set.line_ids.push_back(r.line_id);
    set.zones = cfg.proxy.zones;
    set.shared = cfg.proxy.shared;
    return set;
}

proxy::ProxyDataset build_proxy_dataset(const ExperimentConfig& cfg, const GridCase& grid,
                                        const ProcessParams& process) {
    proxy::DatasetSettings settings;
    settings.min_bucket = cfg.proxy.min_bucket;
    settings.max_combinations = cfg.proxy.max_combinations;
    settings.per_bus_features = cfg.proxy.per_bus_features;
    settings.months = cfg.sampler.months;
    settings.workers = cfg.workers;
    Rng rng = make_rng(derive_seed(cfg.master_seed, "proxy-build"));
    return proxy::generate_dataset(grid, proxy_outage_set(cfg), cfg.proxy.n_records, process, rng, settings);
}

proxy::ProxyReport run_proxy_eval(const Experiment& ex, const proxy::ProxyDataset& ds,
                                  const std::filesystem::path& out_dir) {
    const auto& cfg = ex.config();
    Rng rng = make_rng(derive_seed(cfg.master_seed, "proxy-eval"));
    const int months = cfg.sampler.months;
    const auto queries = proxy::sample_eval_queries(ex.grid(), ds, cfg.proxy.n_test, months, ex.process(), rng);
    auto report = proxy::evaluate_proxy(ex.grid(), ds, queries, months, cfg.workers, cfg.rt);
    if (!out_dir.empty()) {
        std::filesystem::create_directories(out_dir);
        detail::write_text_file(out_dir / "proxy_report.csv", report.to_csv());
    }
    return report;
}

Experiment::Experiment(ExperimentConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.validate();
    grid_ = load_experiment_case(cfg_);
    process_ = cfg_.process.resolve(grid_);
    if (cfg_.mode == AssessmentMode::Proxy)
        dataset_ = std::make_shared<const proxy::ProxyDataset>(proxy::load_dataset(*cfg_.proxy.dataset, grid_));
}

Experiment::Experiment(ExperimentConfig cfg, proxy::ProxyDataset dataset) : cfg_(std::move(cfg)) {
    if (!cfg_.proxy.dataset) cfg_.proxy.dataset = "<memory>";
    cfg_.validate();
    grid_ = load_experiment_case(cfg_);
    process_ = cfg_.process.resolve(grid_);
    if (dataset.case_hash != case_hash(grid_))
        throw ValidationError("proxy.dataset", "dataset was built for a different case");
    dataset_ = std::make_shared<const proxy::ProxyDataset>(std::move(dataset));
}

Topology Experiment::topology_for(const ce::OutageSchedule& schedule, int month) const {
    Topology t = Topology::all_in_service(grid_);
    for (int id : schedule.lines_out(month)) t.line_status[grid_.line_index(id)] = false;
    return t;
}

std::uint64_t Experiment::assessment_seed(std::size_t iteration) const {
    const auto root = derive_seed(cfg_.master_seed, "assess");
    return cfg_.fixed_scenarios ? root : derive_seed(root, static_cast<std::uint64_t>(iteration));
}

std::size_t Experiment::uc_solves() const {
    std::lock_guard lock(mu_);
    return uc_solves_;
}

std::shared_ptr<const ScenarioSample> Experiment::scenario(std::uint64_t seed) const {
    {
        std::lock_guard lock(mu_);
        if (auto it = scenarios_.find(seed); it != scenarios_.end()) return it->second;
    }
    Rng rng = make_rng(seed);
    auto sample = std::make_shared<const ScenarioSample>(sample_scenario(grid_, cfg_.sampler, process_, rng, 1));
    std::lock_guard lock(mu_);
    if (scenarios_.size() >= kScenarioCacheLimit) scenarios_.clear();
    return scenarios_.emplace(seed, sample).first->second;
}

UcSolution Experiment::day_ahead(const Topology& top, const DayAheadForecast& forecast,
                                 const InitialStatusList& initial, int month, const std::string& cache_key) const {
    if (cfg_.mode == AssessmentMode::Proxy) {
        proxy::UcQuery q{dataset_->outages.key_of(grid_, top), forecast, month};
        return proxy::nn_lookup(grid_, *dataset_, q).solution;
    }
    {
        std::lock_guard lock(mu_);
        if (auto it = uc_cache_.find(cache_key); it != uc_cache_.end()) return it->second;
    }
    UcSolution sol = solve_uc(grid_, top, forecast, initial);
    std::lock_guard lock(mu_);
    ++uc_solves_;
    if (uc_cache_.size() >= kUcCacheLimit) uc_cache_.clear();
    return uc_cache_.emplace(cache_key, std::move(sol)).first->second;
}

Experiment::MonthTotals Experiment::run_month(const ce::OutageSchedule& schedule, const MonthSample& ms,
                                              std::uint64_t scenario_seed, std::size_t scenario_index) const {
    MonthTotals tot;
    const Topology planned = topology_for(schedule, ms.month);
    const std::string top_key = topology_bits(planned);
    const double sw = scenario_weight(cfg_.sampler, ms.month);
    const double hw = hour_weight(cfg_.sampler);
    const DcFeasibilityChecker checker;
    const auto forced_root = derive_seed(scenario_seed, "forced");

    for (std::size_t w = 0; w < ms.windows.size(); ++w) {
        InitialStatusList initial = unconstrained_start(grid_);
        const auto& window = ms.windows[w];
        for (std::size_t d = 0; d < window.days.size(); ++d) {
            const auto& day = window.days[d];
            std::string ctx = fmt::format("scenario {}, month {}, window {}, day {}", scenario_index, ms.month, w,
                                          day.day_of_year);
            std::string key = fmt::format("{}/{}/{}/{}/{}", scenario_seed, ms.month, w, d, top_key);
            for (const auto& s : initial) key += fmt::format("/{}{}", s.on ? '+' : '-', s.hours);
            UcSolution uc;
            try {
                uc = day_ahead(planned, day.forecast, initial, ms.month, key);
            } catch (...) {
                rethrow_with(ctx);
            }
            tot.da_cost += uc.cost * sw;
            for (std::size_t h = 0; h < day.hour_windows.size(); ++h) {
                const auto& hwin = day.hour_windows[h];
                RtDecision prev;
                bool have_prev = false;
                for (std::size_t i = 0; i < hwin.hours.size(); ++i) {
                    const int hour = hwin.start_hour + static_cast<int>(i);
                    Topology top = planned;
                    if (process_.forced_outage_rate > 0.0) {
                        auto fs = derive_seed(forced_root, static_cast<std::uint64_t>(ms.month));
                        fs = derive_seed(derive_seed(fs, w), d);
                        fs = derive_seed(derive_seed(fs, h), i);
                        Rng frng = make_rng(fs);
                        top = sample_forced_outages(planned, process_.forced_outage_rate, frng);
                    }
                    RtDecision dec;
                    try {
                        dec = solve_rt(grid_, top, hwin.hours[i], uc, hour, have_prev ? &prev : nullptr, cfg_.rt);
                    } catch (...) {
                        rethrow_with(fmt::format("{}, hour window {}, hour {}", ctx, h, hour));
                    }
                    tot.cost += rt_operating_cost(dec) * sw * hw;
                    tot.reliability += state_reliability(grid_, top, hwin.hours[i], dec, checker);
                    tot.shed_mw += dec.shed_mw();
                    ++tot.hours;
                    prev = std::move(dec);
                    have_prev = true;
                }
            }
            initial = uc.final_status();
        }
    }
    return tot;
}

AssessmentReport Experiment::assess(const ce::OutageSchedule& schedule, std::uint64_t seed, int workers) const {
    const auto t0 = std::chrono::steady_clock::now();
    if (!ce::is_feasible(schedule, cfg_.outage_requirements) && schedule != ce::empty_schedule(cfg_.outage_requirements))
        throw ValidationError("schedule", fmt::format("schedule '{}' violates the outage requirements", schedule.key()));
    if (dataset_) {
        for (int id : schedule.line_ids)
            if (dataset_->outages.bit_of(id) < 0)
                throw ValidationError("schedule", fmt::format("line {} is not covered by the proxy dataset", id));
    }
    const auto memo_key = std::make_pair(schedule.key(), seed);
    {
        std::lock_guard lock(mu_);
        if (auto it = reports_.find(memo_key); it != reports_.end()) {
            AssessmentReport r = it->second;
            r.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            return r;
        }
    }

    const auto n_scen = static_cast<std::size_t>(cfg_.scenarios_per_assessment);
    const auto n_months = static_cast<std::size_t>(cfg_.sampler.months);
    std::vector<std::uint64_t> seeds(n_scen);
    for (std::size_t s = 0; s < n_scen; ++s) seeds[s] = derive_seed(seed, static_cast<std::uint64_t>(s));
    std::vector<std::shared_ptr<const ScenarioSample>> samples(n_scen);
    parallel_for(n_scen, workers, [&](std::size_t s) { samples[s] = scenario(seeds[s]); });

    std::vector<MonthTotals> slots(n_scen * n_months);
    parallel_for(slots.size(), workers, [&](std::size_t k) {
        const std::size_t s = k / n_months, m = k % n_months;
        slots[k] = run_month(schedule, samples[s]->months[m], seeds[s], s);
    });

    const double load_cap = grid_.total_peak_load();
    std::vector<ScenarioMetrics> per(n_scen);
    AssessmentReport rep;
    rep.months.resize(n_months);
    std::vector<std::size_t> month_hours(n_months, 0);
    for (std::size_t s = 0; s < n_scen; ++s) {
        double cost = 0.0, rel = 0.0, shed = 0.0;
        std::size_t hours = 0;
        for (std::size_t m = 0; m < n_months; ++m) {
            const auto& t = slots[s * n_months + m];
            cost += t.cost;
            rel += t.reliability;
            shed += t.shed_mw;
            hours += t.hours;
            auto& ms = rep.months[m];
            ms.cost += t.cost / static_cast<double>(n_scen);
            ms.da_cost += t.da_cost / static_cast<double>(n_scen);
            ms.reliability += t.reliability;
            ms.shed_mw += t.shed_mw;
            month_hours[m] += t.hours;
        }
        auto& sm = per[s];
        sm.total_cost = cost;
        sm.mean_reliability = hours ? rel / static_cast<double>(hours) : 1.0;
        sm.mean_shed_mw = hours ? shed / static_cast<double>(hours) : 0.0;
        sm.mean_shed_frac = load_cap > 0.0 ? sm.mean_shed_mw / load_cap : 0.0;
    }
    for (std::size_t m = 0; m < n_months; ++m) {
        auto& ms = rep.months[m];
        ms.month = static_cast<int>(m) + 1;
        const double h = static_cast<double>(std::max<std::size_t>(1, month_hours[m]));
        ms.reliability = month_hours[m] ? ms.reliability / h : 1.0;
        ms.shed_mw /= h;
    }
    rep.schedule = schedule;
    rep.metrics = aggregate_metrics(std::move(per), cfg_.thresholds, load_cap);
    rep.mode = cfg_.mode;
    rep.seed = seed;
    {
        std::lock_guard lock(mu_);
        if (reports_.size() >= kReportCacheLimit) reports_.clear();
        reports_.emplace(memo_key, rep);
    }
    rep.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return rep;
}

std::string write_schedule_csv(const ce::OutageSchedule& s) {
    std::string out = month_header();
    for (std::size_t r = 0; r < s.rows.size(); ++r) {
        out += std::to_string(s.line_ids[r]);
        for (auto v : s.rows[r]) out += v ? ",1" : ",0";
        out += "\n";
    }
    return out;
}

ce::OutageSchedule parse_schedule_csv(const std::string& text, const std::vector<ce::OutageRequirement>& reqs,
                                      const std::string& origin) {
    std::stringstream in(text);
    std::string line;
    if (!std::getline(in, line) || split_line(line).size() != 13)
        throw ParseError(origin + ": expected header line_id,1,...,12");
    ce::OutageSchedule s = ce::empty_schedule(reqs);
    std::vector<bool> seen(reqs.size(), false);
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        auto cells = split_line(line);
        if (cells.size() != 13) throw ParseError(fmt::format("{}:{}: expected 13 cells", origin, lineno));
        int id = 0;
        try {
            id = std::stoi(cells[0]);
        } catch (const std::logic_error&) {
            throw ParseError(fmt::format("{}:{}: bad line id", origin, lineno));
        }
        auto it = std::find(s.line_ids.begin(), s.line_ids.end(), id);
        if (it == s.line_ids.end())
            throw ValidationError(fmt::format("{}:{}", origin, lineno), fmt::format("line {} has no requirement", id));
        const auto r = static_cast<std::size_t>(it - s.line_ids.begin());
        if (seen[r]) throw ValidationError(fmt::format("{}:{}", origin, lineno), "duplicate row");
        seen[r] = true;
        for (int m = 0; m < 12; ++m) {
            const auto& c = cells[static_cast<std::size_t>(m) + 1];
            if (c != "0" && c != "1") throw ParseError(fmt::format("{}:{}: entries must be 0 or 1", origin, lineno));
            s.rows[r][static_cast<std::size_t>(m)] = c == "1" ? 1 : 0;
        }
    }
    for (std::size_t r = 0; r < reqs.size(); ++r)
        if (!seen[r]) throw ValidationError(origin, fmt::format("missing row for line {}", reqs[r].line_id));
    // The all-zero schedule is accepted as the no-outage baseline.
    if (!ce::is_feasible(s, reqs) && s != ce::empty_schedule(reqs))
        throw ValidationError(origin, "schedule violates the outage requirements");
    return s;
}

ce::OutageSchedule load_schedule_csv(const std::filesystem::path& path,
                                     const std::vector<ce::OutageRequirement>& reqs) {
    return parse_schedule_csv(detail::read_text_file(path), reqs, path.string());
}

std::string write_distribution_csv(const std::vector<int>& line_ids, const ce::CeDistribution& dist) {
    std::string out = month_header();
    for (std::size_t r = 0; r < dist.p.size(); ++r) {
        out += std::to_string(line_ids[r]);
        for (double v : dist.p[r]) out += "," + num(v);
        out += "\n";
    }
    return out;
}

std::string write_trace_csv(const std::vector<ce::TraceRow>& trace) {
    std::string out =
        "iteration,cost_q1,cost_median,cost_q3,reliability_q1,reliability_median,reliability_q3,"
        "shed_q1,shed_median,shed_q3,entropy,best_cost,best_ever_cost,best_ever,degenerate_rows\n";
    for (const auto& r : trace) {
        out += fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},\"{}\",{}\n", r.iteration, num(r.cost.q1),
                           num(r.cost.median), num(r.cost.q3), num(r.reliability.q1), num(r.reliability.median),
                           num(r.reliability.q3), num(r.shed.q1), num(r.shed.median), num(r.shed.q3), num(r.entropy),
                           num(r.best_cost), num(r.best_ever_cost), r.best_ever, r.degenerate_rows);
    }
    return out;
}

std::string report_json(const AssessmentReport& report, const ChanceThresholds& thr,
                        const std::optional<ce::BarrierParams>& barrier) {
    return report_to_json(report, thr, barrier).dump(2) + "\n";
}

OptimizeOutcome run_optimize(const Experiment& ex, const std::filesystem::path& out_dir) {
    const auto& cfg = ex.config();
    Rng rng = make_rng(derive_seed(cfg.master_seed, "ce"));
    ce::AssessFn fn = [&](const ce::OutageSchedule& s, std::size_t it) {
        return ex.assess(s, ex.assessment_seed(it), 1).metrics;
    };
    OptimizeOutcome out;
    std::string failure;
    try {
        out.result = ce::optimize(cfg.outage_requirements, cfg.thresholds, cfg.ce, fn, rng);
    } catch (const ce::MaxIterationsError& e) {
        out.result = e.partial();
        failure = e.what();
    }
    out.final_report = ex.assess(out.result.schedule, derive_seed(cfg.master_seed, "final"), cfg.workers);

    std::filesystem::create_directories(out_dir / "p_matrices");
    detail::write_text_file(out_dir / "best_schedule.csv", write_schedule_csv(out.result.schedule));
    detail::write_text_file(out_dir / "trace.csv", write_trace_csv(out.result.trace));
    std::vector<int> ids;
    for (const auto& r : cfg.outage_requirements) ids.push_back(r.line_id);
    for (std::size_t k = 0; k < out.result.p_history.size(); ++k)
        detail::write_text_file(out_dir / "p_matrices" / fmt::format("iter_{:03d}.csv", k),
                                write_distribution_csv(ids, out.result.p_history[k]));

    OJson j;
    j["converged"] = out.result.converged;
    j["iterations"] = out.result.trace.size();
    j["master_seed"] = cfg.master_seed;
    j["barrier"] = {{"kappa", out.result.barrier.kappa}, {"lambda", out.result.barrier.lambda}};
    j["schedule"] = out.result.schedule.key();
    j["best_ever"] = out.result.best_ever.key();
    j["best_ever_cost"] = out.result.best_ever_cost;
    if (!failure.empty()) j["error"] = failure;
    j["assessment"] = report_to_json(out.final_report, cfg.thresholds, out.result.barrier);
    detail::write_text_file(out_dir / "report.json", j.dump(2) + "\n");
    if (!failure.empty()) throw ce::MaxIterationsError(out.result);
    return out;
}

std::optional<ce::BarrierParams> read_report_barrier(const std::filesystem::path& report_path) {
    if (!std::filesystem::exists(report_path)) return std::nullopt;
    const auto j = detail::parse_json(detail::read_text_file(report_path), report_path.string());
    const auto& b = detail::require(j, "barrier", report_path.string());
    return ce::BarrierParams{detail::field<double>(b, "kappa", "barrier"), detail::field<double>(b, "lambda", "barrier")};
}

namespace {

std::string histogram_csv(const std::vector<CompareRow>& rows, double CompareRow::*metric, int bins) {
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (const auto& r : rows) {
        lo = std::min(lo, r.*metric);
        hi = std::max(hi, r.*metric);
    }
    std::vector<std::size_t> rnd(static_cast<std::size_t>(bins), 0), opt(static_cast<std::size_t>(bins), 0);
    const double width = hi > lo ? (hi - lo) / bins : 0.0;
    for (const auto& r : rows) {
        int b = width > 0.0 ? static_cast<int>((r.*metric - lo) / width) : 0;
        b = std::clamp(b, 0, bins - 1);
        (r.optimized ? opt : rnd)[static_cast<std::size_t>(b)]++;
    }
    std::string out = "bin_lo,bin_hi,random,optimized\n";
    if (rows.empty()) return out;
    for (int b = 0; b < bins; ++b)
        out += fmt::format("{},{},{},{}\n", num(lo + b * width), num(b + 1 == bins ? hi : lo + (b + 1) * width),
                           rnd[static_cast<std::size_t>(b)], opt[static_cast<std::size_t>(b)]);
    return out;
}

}  // namespace

CompareResult run_compare(const Experiment& ex, const ce::OutageSchedule& optimized, std::size_t n_random,
                          std::size_t n_seeds, const std::optional<ce::BarrierParams>& barrier,
                          const std::filesystem::path& out_dir) {
    const auto& cfg = ex.config();
    if (n_seeds < 1) throw ValidationError("n_seeds", "must be at least 1");
    std::vector<ce::OutageSchedule> schedules{optimized};
    Rng rng = make_rng(derive_seed(cfg.master_seed, "compare"));
    const auto uniform = ce::CeDistribution::initial(cfg.outage_requirements);
    for (std::size_t i = 0; i < n_random; ++i) schedules.push_back(ce::sample_schedule(uniform, cfg.outage_requirements, rng));
    std::vector<std::uint64_t> seeds{ex.assessment_seed(0)};
    for (std::size_t k = 1; k < n_seeds; ++k) seeds.push_back(derive_seed(derive_seed(cfg.master_seed, "compare-seed"), k));

    std::vector<ScheduleMetrics> metrics(schedules.size() * n_seeds);
    parallel_for(metrics.size(), cfg.workers, [&](std::size_t k) {
        metrics[k] = ex.assess(schedules[k / n_seeds], seeds[k % n_seeds], 1).metrics;
    });

    CompareResult res;
    if (cfg.ce.kappa) {
        res.barrier = ce::BarrierParams{*cfg.ce.kappa, 100.0 * *cfg.ce.kappa};
    } else if (barrier) {
        res.barrier = *barrier;
    } else {
        double mean = 0.0;
        for (const auto& m : metrics) mean += m.expected_cost;
        res.barrier = ce::BarrierParams::from_scale(mean / static_cast<double>(metrics.size()));
    }
    for (std::size_t k = 0; k < metrics.size(); ++k) {
        CompareRow row;
        row.schedule_id = k / n_seeds;
        row.optimized = row.schedule_id == 0;
        row.seed = seeds[k % n_seeds];
        row.schedule_key = schedules[row.schedule_id].key();
        row.expected_cost = metrics[k].expected_cost;
        row.penalized_cost = ce::penalized_cost(metrics[k], cfg.thresholds, res.barrier);
        row.mean_reliability = metrics[k].mean_reliability();
        row.mean_shed_frac = metrics[k].mean_shed_frac();
        row.p_reliability_ok = metrics[k].p_reliability_ok;
        row.p_shed_ok = metrics[k].p_shed_ok;
        res.rows.push_back(row);
    }

    std::filesystem::create_directories(out_dir);
    std::string all =
        "schedule_id,kind,seed,schedule,expected_cost,penalized_cost,mean_reliability,mean_shed_frac,"
        "p_reliability_ok,p_shed_ok\n";
    std::string scatter = "schedule_id,kind,seed,mean_reliability,mean_shed_frac\n";
    for (const auto& r : res.rows) {
        const char* kind = r.optimized ? "optimized" : "random";
        all += fmt::format("{},{},{},\"{}\",{},{},{},{},{},{}\n", r.schedule_id, kind, r.seed, r.schedule_key,
                           num(r.expected_cost), num(r.penalized_cost), num(r.mean_reliability),
                           num(r.mean_shed_frac), num(r.p_reliability_ok), num(r.p_shed_ok));
        scatter += fmt::format("{},{},{},{},{}\n", r.schedule_id, kind, r.seed, num(r.mean_reliability),
                               num(r.mean_shed_frac));
    }
    detail::write_text_file(out_dir / "compare.csv", all);
    detail::write_text_file(out_dir / "scatter.csv", scatter);
    detail::write_text_file(out_dir / "histogram_cost.csv", histogram_csv(res.rows, &CompareRow::penalized_cost, 10));
    detail::write_text_file(out_dir / "histogram_reliability.csv",
                            histogram_csv(res.rows, &CompareRow::mean_reliability, 10));
    detail::write_text_file(out_dir / "histogram_shed.csv", histogram_csv(res.rows, &CompareRow::mean_shed_frac, 10));
    return res;
}

}  // namespace gridsched
