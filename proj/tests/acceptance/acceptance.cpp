// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit on any failure.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "gridsched/ce.hpp"
#include "gridsched/config.hpp"
#include "gridsched/errors.hpp"
#include "gridsched/fixtures.hpp"
#include "gridsched/harness.hpp"
#include "gridsched/lp.hpp"
#include "gridsched/proxy.hpp"
#include "gridsched/reliability.hpp"
#include "gridsched/rt.hpp"
#include "gridsched/sampler.hpp"
#include "gridsched/uc.hpp"

namespace fs = std::filesystem;
using namespace gridsched;

namespace {

const fs::path kData = GRIDSCHED_DATA_DIR;

struct Outcome {
    bool pass = false;
    std::string detail;
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

bool rel_close(double a, double b, double tol) { return std::abs(a - b) <= tol * std::max(1.0, std::abs(b)); }

std::string read_file(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

fs::path temp_dir(const std::string& tag) {
    std::random_device rd;
    auto p = fs::temp_directory_path() / fmt::format("gridsched_acc_{}_{}", tag, rd());
    fs::create_directories(p);
    return p;
}

std::vector<std::vector<std::string>> read_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::stringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        std::vector<std::string> cells;
        std::string cell;
        bool quoted = false;
        for (char c : line) {
            if (c == '"') quoted = !quoted;
            else if (c == ',' && !quoted) {
                cells.push_back(cell);
                cell.clear();
            } else cell += c;
        }
        cells.push_back(cell);
        rows.push_back(std::move(cells));
    }
    return rows;
}

// Shared toy experiment and its enumeration (criteria 5, 6, 7, 8, 10).
struct Toy {
    ExperimentConfig cfg;
    std::unique_ptr<Experiment> ex;
    std::unique_ptr<fixtures::Enumeration> en;

    Experiment& experiment() {
        if (!ex) {
            cfg = load_config(kData / "configs/toy.json");
            ex = std::make_unique<Experiment>(cfg);
        }
        return *ex;
    }
    const fixtures::Enumeration& enumeration() {
        if (!en) en = std::make_unique<fixtures::Enumeration>(fixtures::enumerate_schedules(experiment()));
        return *en;
    }
};

Toy toy;

// ---------------------------------------------------------------- 1
Outcome milp_oracles() {
    const auto t0 = std::chrono::steady_clock::now();
    const auto spec = fixtures::load_fixture(kData / "fixtures/toy5");
    const auto mips = fixtures::random_milps(spec);
    int mismatches = 0, optimal = 0;
    for (const auto& m : mips) {
        const auto a = lp::solve_milp(m);
        const auto b = lp::brute_force_milp(m);
        if (a.status != b.status || (b.optimal() && !rel_close(a.objective, b.objective, 1e-6))) ++mismatches;
        optimal += b.optimal();
    }
    const auto cfg = load_config(spec.config);
    const auto grid = load_experiment_case(cfg);
    const auto insts = fixtures::uc_instances(spec, grid, cfg.process.resolve(grid));
    std::vector<std::string> uc_obj;
    int uc_mismatch = 0;
    for (const auto& inst : insts) {
        const auto prob = build_uc(grid, Topology::all_in_service(grid), inst.forecast, unconstrained_start(grid));
        const auto a = lp::solve_milp(prob.mip);
        const auto b = lp::brute_force_milp(prob.mip);
        if (a.status != b.status || (b.optimal() && !rel_close(a.objective, b.objective, 1e-6))) ++uc_mismatch;
        uc_obj.push_back(b.optimal() ? fmt::format("{:.12g}", b.objective) : "");
    }
    // Committed oracle objectives must agree with the live brute force.
    int oracle_drift = 0;
    const auto committed = read_csv(read_file(kData / "fixtures/toy5/milp_uc.csv"));
    for (std::size_t i = 0; i < insts.size(); ++i)
        if (i + 1 >= committed.size() || committed[i + 1].back() != uc_obj[i]) ++oracle_drift;
    const double secs = seconds_since(t0);
    const bool ok = mips.size() == 30 && insts.size() == 20 && mismatches == 0 && uc_mismatch == 0 &&
                    oracle_drift == 0 && secs < 120.0;
    return {ok, fmt::format("{} random MILPs ({} optimal), {} UC instances x {} h: {} + {} mismatches, {} oracle "
                            "drifts, {:.1f} s",
                            mips.size(), optimal, insts.size(), spec.uc_hours, mismatches, uc_mismatch, oracle_drift,
                            secs)};
}

// ---------------------------------------------------------------- 2
struct Violations {
    std::size_t count = 0;
    std::vector<std::string> first;
    void add(std::string msg) {
        if (first.size() < 5) first.push_back(std::move(msg));
        ++count;
    }
};

void check_rt(const GridCase& g, const Topology& top, const HourlyRealization& st, const UcSolution& uc,
              const RtDecision& r, const RtDecision* prev, Violations& v) {
    const auto dc = dc_matrices(g, top, IslandPolicy::Allow);
    const Eigen::VectorXd flow_inj = g.base_mva * (dc.b_bus * r.angles_rad);
    Eigen::VectorXd inj = -st.load + r.load_shed_mw - r.spill_mw;
    for (std::size_t k = 0; k < g.n_gens(); ++k)
        inj(static_cast<Eigen::Index>(g.bus_index(g.dispatchable_generators[k].bus))) +=
            r.dispatch_mw(static_cast<Eigen::Index>(k));
    for (std::size_t w = 0; w < g.n_wind(); ++w)
        inj(static_cast<Eigen::Index>(g.bus_index(g.wind_generators[w].bus))) +=
            st.wind(static_cast<Eigen::Index>(w)) - r.wind_curtail_mw(static_cast<Eigen::Index>(w));
    const double bal = (inj - flow_inj).cwiseAbs().maxCoeff();
    if (bal > 1e-6) v.add(fmt::format("rt h{} balance residual {:.3g}", r.hour, bal));
    const Eigen::VectorXd f = g.base_mva * (dc.b_f * r.angles_rad);
    for (std::size_t l = 0; l < g.n_lines(); ++l)
        if (std::abs(f(static_cast<Eigen::Index>(l))) > g.lines[l].flow_limit_mw + 1e-6)
            v.add(fmt::format("rt h{} line {} flow {:.3f}", r.hour, g.lines[l].id, f(static_cast<Eigen::Index>(l))));
    for (std::size_t k = 0; k < g.n_gens(); ++k) {
        const auto gi = static_cast<Eigen::Index>(k);
        const auto& gen = g.dispatchable_generators[k];
        const double p = r.dispatch_mw(gi);
        if (r.commitment(gi) != uc.commitment(gi, r.hour))
            v.add(fmt::format("rt h{} gen {} commitment differs from the day-ahead plan", r.hour, gen.id));
        if (r.commitment(gi) == 0 && p != 0.0) v.add(fmt::format("rt h{} gen {} off but dispatched", r.hour, gen.id));
        if (r.commitment(gi) == 1 && (p < gen.p_min_mw - 1e-6 || p > gen.p_max_mw + 1e-6))
            v.add(fmt::format("rt h{} gen {} output {:.3f} outside limits", r.hour, gen.id, p));
        const bool prev_on = prev ? prev->commitment(gi) == 1 : uc.commitment(gi, r.hour) == 1;
        const double prev_p = prev ? prev->dispatch_mw(gi) : uc.dispatch_mw(gi, r.hour);
        if (r.commitment(gi) == 1 && prev_on &&
            (p - prev_p > gen.ramp_up_mw_per_h + 1e-6 || prev_p - p > gen.ramp_down_mw_per_h + 1e-6))
            v.add(fmt::format("rt h{} gen {} ramp {:.3f}", r.hour, gen.id, p - prev_p));
    }
    for (Eigen::Index b = 0; b < r.load_shed_mw.size(); ++b)
        if (r.load_shed_mw(b) < -1e-9 || r.load_shed_mw(b) > st.load(b) + 1e-6)
            v.add(fmt::format("rt h{} shed out of range at bus {}", r.hour, b));
}

Outcome physical_invariants() {
    const auto cfg = load_config(kData / "configs/toy.json");
    const auto g = load_experiment_case(cfg);
    const auto proc = cfg.process.resolve(g);
    Violations v;
    std::size_t n_uc = 0, n_rt = 0;
    Rng top_rng = make_rng(derive_seed(4242, "topologies"));
    for (int sc = 0; sc < 10; ++sc) {
        Rng rng = make_rng(derive_seed(4242, static_cast<std::uint64_t>(sc)));
        const auto sample = sample_scenario(g, cfg.sampler, proc, rng);
        for (const auto& m : sample.months) {
            // Random planned outage of one candidate line per month, plus none.
            auto top = Topology::all_in_service(g);
            const int pick = uniform_int(top_rng, 0, static_cast<int>(cfg.outage_requirements.size()));
            if (pick < static_cast<int>(cfg.outage_requirements.size()))
                top.line_status[g.line_index(cfg.outage_requirements[static_cast<std::size_t>(pick)].line_id)] = false;
            for (const auto& w : m.windows) {
                InitialStatusList init = unconstrained_start(g);
                for (const auto& d : w.days) {
                    const auto uc = solve_uc(g, top, d.forecast, init);
                    ++n_uc;
                    for (const auto& msg : verify_uc(g, top, d.forecast, uc)) v.add("uc: " + msg);
                    if (std::abs(uc.cost - uc_cost(g, uc)) > 1e-6 * std::max(1.0, uc.cost)) v.add("uc cost mismatch");
                    init = uc.final_status();
                    for (const auto& hw : d.hour_windows) {
                        std::unique_ptr<RtDecision> prev;
                        for (std::size_t h = 0; h < hw.hours.size(); ++h) {
                            const int hour = hw.start_hour + static_cast<int>(h);
                            auto r = solve_rt(g, top, hw.hours[h], uc, hour, prev.get(), cfg.rt);
                            ++n_rt;
                            check_rt(g, top, hw.hours[h], uc, r, prev.get(), v);
                            prev = std::make_unique<RtDecision>(std::move(r));
                        }
                    }
                }
            }
        }
    }
    std::string detail = fmt::format("10 scenarios, {} UC and {} RT solutions, {} violations", n_uc, n_rt, v.count);
    for (const auto& f : v.first) detail += "; " + f;
    return {v.count == 0, detail};
}

// ---------------------------------------------------------------- 3
// Survival function of a chi-square variable with 3 degrees of freedom.
double chi2_sf_3(double x) {
    const double s = std::sqrt(x);
    return std::erfc(s / std::numbers::sqrt2) + std::sqrt(2.0 / std::numbers::pi) * s * std::exp(-x / 2.0);
}

Outcome stochastic_statistics() {
    const auto cfg = load_config(kData / "configs/toy.json");
    const auto g = load_experiment_case(cfg);
    auto proc = ProcessParams::defaults_for(g);
    proc.p_w_sigma = 0.15;
    proc.p_d_sigma = 0.02;
    const int n = 10000;

    // Forecast mean against daily_profile(h) * seasonal level, every element.
    const SeasonalFactor season{0.8, 0.9};
    Rng rng = make_rng(derive_seed(3, "forecast"));
    Eigen::MatrixXd sw = Eigen::MatrixXd::Zero(g.n_wind(), 24), sw2 = sw;
    Eigen::MatrixXd sl = Eigen::MatrixXd::Zero(g.n_buses(), 24), sl2 = sl;
    for (int i = 0; i < n; ++i) {
        const auto f = sample_day_ahead(g, 100, season, proc, rng);
        sw += f.wind;
        sw2 += f.wind.cwiseProduct(f.wind);
        sl += f.load;
        sl2 += f.load.cwiseProduct(f.load);
    }
    int mean_fail = 0, mean_checked = 0;
    double worst_z = 0.0;
    auto check = [&](const Eigen::MatrixXd& s, const Eigen::MatrixXd& s2, const Eigen::MatrixXd& profile, double level) {
        for (Eigen::Index r = 0; r < s.rows(); ++r)
            for (Eigen::Index c = 0; c < s.cols(); ++c) {
                const double expect = profile(r, c) * level;
                if (expect == 0.0) continue;
                const double m = s(r, c) / n;
                const double var = s2(r, c) / n - m * m;
                const double se = std::sqrt(var / n);
                const double z = std::abs(m - expect) / se;
                worst_z = std::max(worst_z, z);
                ++mean_checked;
                if (z > 3.0) ++mean_fail;
            }
    };
    check(sw, sw2, proc.daily_wind_profile_mw, season.wind_level);
    check(sl, sl2, proc.daily_load_profile_mw, season.load_level);

    // Walk error variance grows linearly in the step count with slope noise_sd^2.
    Rng wrng = make_rng(derive_seed(3, "walk"));
    proc.wind_walk_noise_frac = 0.02;
    DayAheadForecast f;
    f.wind = proc.daily_wind_profile_mw * 0.8;
    f.load = proc.daily_load_profile_mw * 0.9;
    const double noise_sd = proc.wind_walk_noise_frac * f.wind(0, 0);
    std::vector<double> var(24, 0.0);
    for (int i = 0; i < n; ++i) {
        auto st = HourlyRealization::start(g);
        for (int h = 0; h < 24; ++h) {
            st = step_hourly(g, f, h, st, proc, wrng);
            var[static_cast<std::size_t>(h)] += st.wind_delta(0) * st.wind_delta(0);
        }
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int h = 0; h < 24; ++h) {
        const double x = h + 1, y = var[static_cast<std::size_t>(h)] / n;
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double slope = (24 * sxy - sx * sy) / (24 * sxx - sx * sx);
    const double slope_ratio = slope / (noise_sd * noise_sd);

    // Training topology over the toy candidate lines: four equally likely keys.
    std::vector<std::size_t> lines;
    for (const auto& r : cfg.outage_requirements) lines.push_back(g.line_index(r.line_id));
    proxy::OutageSet set;
    for (const auto& r : cfg.outage_requirements) set.line_ids.push_back(r.line_id);
    Rng trng = make_rng(derive_seed(3, "topology"));
    std::vector<int> hits(4, 0);
    for (int i = 0; i < n; ++i) ++hits[set.key_of(g, sample_training_topology(g, lines, trng))];
    double chi2 = 0.0;
    for (int h : hits) chi2 += (h - n / 4.0) * (h - n / 4.0) / (n / 4.0);
    const double p = chi2_sf_3(chi2);

    const bool ok = mean_fail == 0 && std::abs(slope_ratio - 1.0) <= 0.10 && p > 0.001;
    return {ok, fmt::format("forecast means {}/{} within 3 SE (max |z| {:.2f}); walk variance slope ratio {:.4f}; "
                            "topology chi2 {:.3f} p={:.4f}",
                            mean_checked - mean_fail, mean_checked, worst_z, slope_ratio, chi2, p)};
}

// ---------------------------------------------------------------- 4
Outcome sampler_accounting() {
    const auto cfg = load_config(kData / "configs/default.json");
    const auto g = load_experiment_case(cfg);
    Rng rng = make_rng(derive_seed(cfg.master_seed, "sampler-check"));
    const auto s = sample_scenario(g, cfg.sampler, cfg.process.resolve(g), rng);
    // Constant hourly cost c: the weighted estimator must return 8760 c exactly.
    const double c = 1.0;
    double estimate = 0.0;
    for (const auto& m : s.months) {
        double month = 0.0;
        for (const auto& w : m.windows)
            for (const auto& d : w.days) {
                double day = 0.0;
                for (const auto& hw : d.hour_windows) day += c * static_cast<double>(hw.hours.size());
                month += hour_weight(cfg.sampler) * day;
            }
        estimate += scenario_weight(cfg.sampler, m.month) * month;
    }
    const bool ok = s.simulated_days() == 144 && s.simulated_hours() == 6912 && estimate == 8760.0 * c;
    return {ok, fmt::format("{} days, {} RT hours per scenario; constant-cost estimate {} (expected 8760)",
                            s.simulated_days(), s.simulated_hours(), estimate)};
}

// ---------------------------------------------------------------- 5 and 6
struct ProxyEval {
    proxy::ProxyReport report;
    AssessmentReport exact, approx;
};
std::unique_ptr<ProxyEval> proxy_eval;

Outcome proxy_correctness() {
    auto& ex = toy.experiment();
    const auto& g = ex.grid();
    const auto ds = proxy::load_dataset(kData / "fixtures/toy5/proxy_dataset.json", g);

    Rng rng = make_rng(derive_seed(5, "bucket-fuzz"));
    const auto keys = ds.outages.combinations(64);
    std::size_t crossings = 0;
    for (int i = 0; i < 10000; ++i) {
        const auto key = keys[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(keys.size()) - 1))];
        const auto q = proxy::sample_query(g, ds.outages, key, ex.config().sampler.months, ex.process(), rng);
        if (proxy::nn_lookup(g, ds, q).query.topology_key != key) ++crossings;
    }
    double self_max = 0.0;
    for (const auto& r : ds.records)
        self_max = std::max(self_max, proxy::distance(g, r.query, proxy::nn_lookup(g, ds, r.query).query));

    proxy_eval = std::make_unique<ProxyEval>();
    auto& pe = *proxy_eval;
    const auto out = temp_dir("proxy_eval");
    pe.report = run_proxy_eval(ex, ds, out);
    const bool csv_ok = fs::exists(out / "proxy_report.csv");
    fs::remove_all(out);

    // Same schedule and scenarios assessed in both modes on fresh experiments.
    const auto best = toy.enumeration().rows[toy.enumeration().best()].schedule;
    auto exact_cfg = ex.config();
    Experiment exact(exact_cfg);
    auto proxy_cfg = load_config(kData / "configs/toy_proxy.json");
    Experiment approx(proxy_cfg, ds);
    const auto seed = exact.assessment_seed(0);
    pe.exact = exact.assess(best, seed);
    pe.approx = approx.assess(best, seed);

    std::string band;
    int outside = 0;
    for (std::size_t i = 0; i < pe.exact.months.size(); ++i) {
        const int month = pe.exact.months[i].month;
        const auto* row = pe.report.find(month, "rt_cost");
        if (!row) {
            ++outside;
            continue;
        }
        const double gap = (pe.approx.months[i].cost - pe.exact.months[i].cost) / days_in_month(month);
        const double lo = row->gap_mean - 3.0 * row->gap_sd, hi = row->gap_mean + 3.0 * row->gap_sd;
        if (gap < lo || gap > hi) ++outside;
        band += fmt::format(" m{}: gap/day {:.1f} in [{:.1f}, {:.1f}] (report mean {:+.1f});", month, gap, lo, hi,
                            row->gap_mean);
    }
    const double total_gap = pe.approx.metrics.expected_cost - pe.exact.metrics.expected_cost;
    const bool ok = crossings == 0 && self_max == 0.0 && csv_ok && pe.report.rows.size() == 4u * 3u && outside == 0;
    return {ok, fmt::format("10000 lookups, {} bucket crossings; max self distance {}; report rows {};{} proxy minus "
                            "exact expected cost {:+.1f} ({})",
                            crossings, self_max, pe.report.rows.size(), band, total_gap,
                            total_gap >= 0 ? "proxy overestimates" : "proxy underestimates")};
}

Outcome proxy_speed() {
    if (!proxy_eval) return {false, "proxy evaluation did not run"};
    const double te = proxy_eval->exact.wall_time_s, tp = proxy_eval->approx.wall_time_s;
    return {tp < te, fmt::format("exact {:.3f} s, proxy {:.4f} s, speedup x{:.1f}", te, tp, te / tp)};
}

// ---------------------------------------------------------------- 7
std::unique_ptr<ce::CeResult> ce_run;

Outcome ce_matches_enumeration() {
    const auto t0 = std::chrono::steady_clock::now();
    auto& ex = toy.experiment();
    const auto& en = toy.enumeration();
    const auto best_key = en.rows[en.best()].schedule.key();
    const auto committed = read_csv(read_file(kData / "fixtures/toy5/enumeration.csv"));
    std::string committed_best;
    for (std::size_t i = 1; i < committed.size(); ++i)
        if (committed[i].size() > 2 && committed[i][1] == "1") committed_best = committed[i][2];

    int hits = 0;
    std::string got;
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        Rng rng = make_rng(derive_seed(seed, "ce-acceptance"));
        ce::AssessFn fn = [&](const ce::OutageSchedule& s, std::size_t it) {
            return ex.assess(s, ex.assessment_seed(it), 1).metrics;
        };
        ce::CeResult res;
        try {
            res = ce::optimize(ex.config().outage_requirements, ex.config().thresholds, ex.config().ce, fn, rng);
        } catch (const ce::MaxIterationsError& e) {
            res = e.partial();
        }
        if (res.converged && res.schedule.key() == best_key) ++hits;
        got += " " + res.schedule.key();
        if (!ce_run) ce_run = std::make_unique<ce::CeResult>(res);
    }
    const double secs = seconds_since(t0);
    const bool ok = hits >= 9 && best_key == committed_best && secs < 600.0;
    return {ok, fmt::format("enumeration best {} (committed {}), {}/10 seeds agree [{} ], {:.1f} s", best_key,
                            committed_best, hits, got, secs)};
}

// ---------------------------------------------------------------- 8
Outcome ce_mechanics() {
    // Elite mean, recomputed by hand.
    Rng rng = make_rng(derive_seed(8, "elite"));
    const std::vector<ce::OutageRequirement> reqs{{1, 2, {1, 2, 3, 4, 5, 6}}, {2, 1, {4, 5, 6, 7}}, {3, 3, {1, 3, 5, 7, 9}}};
    auto dist = ce::CeDistribution::initial(reqs);
    int elite_mismatch = 0;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<ce::OutageSchedule> samples;
        std::vector<double> costs;
        for (int k = 0; k < 75; ++k) {
            samples.push_back(ce::sample_schedule(dist, reqs, rng));
            costs.push_back(std::floor(uniform01(rng) * 20.0));  // ties on purpose
        }
        const auto next = ce::update_distribution(dist, samples, costs, 0.15);
        std::vector<std::size_t> order(costs.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return costs[a] < costs[b]; });
        order.resize(12);
        for (std::size_t l = 0; l < reqs.size(); ++l)
            for (std::size_t m = 0; m < 12; ++m) {
                double s = 0.0;
                for (auto e : order) s += samples[e].rows[l][m];
                if (next.p[l][m] != s / 12.0) ++elite_mismatch;
            }
        dist = next;
    }

    // Feasibility of sampled schedules under arbitrary distributions.
    int infeasible = 0;
    for (int i = 0; i < 10000; ++i) {
        ce::CeDistribution d = ce::CeDistribution::initial(reqs);
        for (auto& row : d.p)
            for (auto& v : row) v = uniform01(rng) < 0.25 ? 0.0 : uniform01(rng);
        if (!ce::is_feasible(ce::sample_schedule(d, reqs, rng), reqs)) ++infeasible;
    }

    // Converged run on the toy fixture: artifacts and the final distribution.
    auto& ex = toy.experiment();
    const auto out = temp_dir("optimize");
    const auto res = run_optimize(ex, out);
    const double eps = ex.config().ce.eps_entropy.value_or(0.01 * static_cast<double>(ex.config().outage_requirements.size()));
    const auto trace = read_csv(read_file(out / "trace.csv"));
    std::vector<std::string> need{"cost_q1",       "cost_median", "cost_q3", "reliability_q1", "reliability_median",
                                  "reliability_q3", "shed_q1",     "shed_median", "shed_q3", "entropy"};
    int missing = 0;
    for (const auto& col : need)
        if (trace.empty() || std::find(trace[0].begin(), trace[0].end(), col) == trace[0].end()) ++missing;
    const auto last = out / "p_matrices" / fmt::format("iter_{:03d}.csv", res.result.p_history.size() - 1);
    const auto pm = read_csv(read_file(last));
    double worst = 0.0;
    for (std::size_t r = 1; r < pm.size(); ++r)
        for (std::size_t c = 1; c < pm[r].size(); ++c) {
            const double v = std::stod(pm[r][c]);
            worst = std::max(worst, std::min(std::abs(v), std::abs(1.0 - v)));
        }
    fs::remove_all(out);
    const double final_entropy = res.result.trace.back().entropy;
    const bool ok = elite_mismatch == 0 && infeasible == 0 && res.result.converged && final_entropy < eps &&
                    missing == 0 && trace.size() == res.result.trace.size() + 1 && worst <= 0.01;
    return {ok, fmt::format("elite-mean mismatches {}; infeasible samples {}/10000; final entropy {:.2e} < {:.2e}; "
                            "trace rows {} missing columns {}; final p-matrix max distance from {{0,1}} {:.2e}",
                            elite_mismatch, infeasible, final_entropy, eps, trace.size() - 1, missing, worst)};
}

// ---------------------------------------------------------------- 9
Outcome default_config() {
    const auto path = kData / "configs/default.json";
    const auto c = load_config(path);
    const auto g = load_experiment_case(c);
    const auto p = c.process.resolve(g);
    std::vector<std::string> bad;
    auto expect = [&](const char* name, double got, double want) {
        if (got != want) bad.push_back(fmt::format("{}={}", name, got));
    };
    expect("r_min", c.thresholds.r_min, 0.8);
    expect("shed_max_frac", c.thresholds.shed_max_frac, 0.005);
    expect("alpha_r", c.thresholds.alpha_r, 0.05);
    expect("alpha_shed", c.thresholds.alpha_shed, 0.05);
    expect("voll", g.voll, 1000.0);
    expect("wind_curtail_price", g.wind_curtail_price, 100.0);
    expect("p_w_sigma", p.p_w_sigma, 0.15);
    expect("p_d_sigma", p.p_d_sigma, 0.02);
    expect("w_s", c.sampler.w_s, 3);
    expect("n_s", c.sampler.n_s, 4);
    expect("w_rt", c.sampler.w_rt, 24);
    expect("n_rt", c.sampler.n_rt, 2);
    expect("rho", c.ce.rho, 0.15);
    expect("n_samples", static_cast<double>(c.ce.n_samples), 75.0);
    // The file itself must spell the values exactly.
    const auto text = read_file(path);
    for (const char* lit : {"\"r_min\": 0.8", "\"shed_max_frac\": 0.005", "\"alpha_r\": 0.05", "\"alpha_shed\": 0.05",
                            "\"voll\": 1000.0", "\"wind_curtail_price\": 100.0", "\"p_w_sigma\": 0.15",
                            "\"p_d_sigma\": 0.02", "\"w_s\": 3", "\"n_s\": 4", "\"w_rt\": 24", "\"n_rt\": 2",
                            "\"rho\": 0.15", "\"n_samples\": 75"})
        if (text.find(lit) == std::string::npos) bad.push_back(fmt::format("literal {} missing", lit));
    std::string detail = bad.empty() ? "all 14 values exact" : "mismatches:";
    for (const auto& b : bad) detail += " " + b;
    return {bad.empty(), detail};
}

// ---------------------------------------------------------------- 10
Outcome compare_shape() {
    const auto t0 = std::chrono::steady_clock::now();
    auto& ex = toy.experiment();
    const auto& en = toy.enumeration();
    const auto optimized = ce_run && ce_run->converged ? ce_run->schedule : en.rows[en.best()].schedule;
    const auto out = temp_dir("compare");
    const auto res = run_compare(ex, optimized, 20, 1, std::nullopt, out);
    bool files = true;
    for (const char* f : {"compare.csv", "scatter.csv", "histogram_cost.csv", "histogram_reliability.csv",
                          "histogram_shed.csv"})
        files = files && fs::exists(out / f);
    fs::remove_all(out);
    const CompareRow* opt = nullptr;
    const CompareRow* min_random = nullptr;
    const CompareRow* max_rel = nullptr;
    for (const auto& r : res.rows) {
        if (r.optimized) {
            opt = &r;
            continue;
        }
        if (!min_random || r.penalized_cost < min_random->penalized_cost) min_random = &r;
        if (!max_rel || r.mean_reliability > max_rel->mean_reliability) max_rel = &r;
    }
    if (!opt || !min_random) return {false, "compare produced no rows"};
    const double secs = seconds_since(t0);
    const bool ok = files && res.rows.size() == 21 && opt->penalized_cost <= min_random->penalized_cost + 1e-9 &&
                    max_rel->mean_shed_frac >= opt->mean_shed_frac && secs < 1800.0;
    return {ok, fmt::format("optimized {} penalized {:.1f} vs best random {} {:.1f}; max-reliability random {} "
                            "(reliability {:.3f}) sheds {:.3e} vs optimized {:.3e} (reliability {:.3f}); {:.1f} s",
                            opt->schedule_key, opt->penalized_cost, min_random->schedule_key,
                            min_random->penalized_cost, max_rel->schedule_key, max_rel->mean_reliability,
                            max_rel->mean_shed_frac, opt->mean_shed_frac, opt->mean_reliability, secs)};
}

// ---------------------------------------------------------------- 11
std::map<std::string, std::string> snapshot(const fs::path& dir) {
    std::map<std::string, std::string> files;
    for (const auto& e : fs::recursive_directory_iterator(dir))
        if (e.is_regular_file()) files[fs::relative(e.path(), dir).string()] = read_file(e.path());
    return files;
}

Outcome cli_determinism() {
#ifdef GRIDSCHED_CLI
    const std::string cli = GRIDSCHED_CLI;
    const auto root = temp_dir("determinism");
    const auto config = (kData / "configs/toy.json").string();
    std::vector<std::map<std::string, std::string>> runs;
    std::string codes;
    for (int workers : {1, 1, 8}) {
        const auto out = root / fmt::format("run{}_w{}", runs.size(), workers);
        const auto cmd = fmt::format("\"{}\" optimize --config \"{}\" --out \"{}\" --workers {} > /dev/null", cli,
                                     config, out.string(), workers);
        const int rc = std::system(cmd.c_str());
        codes += fmt::format(" {}", rc);
        if (rc != 0) {
            fs::remove_all(root);
            return {false, fmt::format("optimize exited with {} at {} workers", rc, workers)};
        }
        runs.push_back(snapshot(out));
    }
    fs::remove_all(root);
    const bool same = runs[0] == runs[1] && runs[0] == runs[2];
    return {same && !runs[0].empty(),
            fmt::format("{} artifacts per run; runs at workers 1, 1, 8 {}", runs[0].size(),
                        same ? "byte-identical" : "differ")};
#else
    return {false, "command-line tool not built"};
#endif
}

}  // namespace

int main() {
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"MILP oracle equivalence", milp_oracles},
        {"UC/RT physical invariants", physical_invariants},
        {"stochastic process statistics", stochastic_statistics},
        {"sampler accounting", sampler_accounting},
        {"proxy correctness", proxy_correctness},
        {"proxy speedup direction", proxy_speed},
        {"CE matches enumeration", ce_matches_enumeration},
        {"CE mechanics", ce_mechanics},
        {"chance-constraint defaults", default_config},
        {"compare shape", compare_shape},
        {"end-to-end determinism", cli_determinism},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, fmt::format("exception: {}", e.what())};
        }
        if (!o.pass) ++failures;
        fmt::print("criterion {:2d} {}: {} ({:.1f} s) {}\n", i + 1, o.pass ? "PASS" : "FAIL", criteria[i].first,
                   seconds_since(t0), o.detail);
        std::fflush(stdout);
    }
    fmt::print("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failures), criteria.size());
    return failures == 0 ? 0 : 1;
}
