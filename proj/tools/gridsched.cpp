// gridsched command-line driver.
#include <cstdio>
#include <filesystem>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "gridsched/errors.hpp"
#include "gridsched/fixtures.hpp"
#include "gridsched/harness.hpp"
#include "gridsched/proxy.hpp"

namespace fs = std::filesystem;
using namespace gridsched;

namespace {

enum Exit { kOk = 0, kError = 1, kUsage = 2, kNotConverged = 3, kDrift = 4 };

ExperimentConfig config_with(const fs::path& path, int workers) {
    auto cfg = load_config(path);
    if (workers > 0) {
        cfg.workers = workers;
        cfg.ce.workers = workers;
    }
    return cfg;
}

void write_file(const fs::path& path, const std::string& text) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::FILE* f = std::fopen(path.string().c_str(), "wb");
    if (!f) throw Error(fmt::format("cannot write {}", path.string()));
    std::fwrite(text.data(), 1, text.size(), f);
    std::fclose(f);
}

void print_metrics(const AssessmentReport& r) {
    fmt::print("schedule        {}\n", r.schedule.key());
    fmt::print("mode            {}\n", to_string(r.mode));
    fmt::print("expected cost   {:.2f}\n", r.metrics.expected_cost);
    fmt::print("reliability     {:.4f} (P ok {:.3f})\n", r.metrics.mean_reliability(), r.metrics.p_reliability_ok);
    fmt::print("shed fraction   {:.6f} (P ok {:.3f})\n", r.metrics.mean_shed_frac(), r.metrics.p_shed_ok);
    fmt::print("wall time       {:.3f} s\n", r.wall_time_s);
    fmt::print("month        cost     da_cost  reliability   shed_mw\n");
    for (const auto& m : r.months)
        fmt::print("{:5d} {:11.1f} {:11.1f} {:12.4f} {:9.3f}\n", m.month, m.cost, m.da_cost, m.reliability, m.shed_mw);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Transmission maintenance scheduling under uncertainty"};
    app.require_subcommand(1);

    fs::path config, schedule, out, dataset, fixture, report;
    int workers = 0;
    std::optional<std::uint64_t> seed;
    std::size_t n_random = 20, n_seeds = 1;
    bool write = false;

    auto* assess = app.add_subcommand("assess", "Assess one outage schedule");
    assess->add_option("--config", config, "Experiment config")->required()->check(CLI::ExistingFile);
    assess->add_option("--schedule", schedule, "Schedule CSV (line_id,1..12)")->required()->check(CLI::ExistingFile);
    assess->add_option("--seed", seed, "Scenario seed (default: the iteration-0 assessment seed)");
    assess->add_option("--out", out, "Write the report as JSON to this file");
    assess->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

    auto* optimize = app.add_subcommand("optimize", "Run the cross-entropy search");
    optimize->add_option("--config", config, "Experiment config")->required()->check(CLI::ExistingFile);
    optimize->add_option("--out", out, "Output directory")->default_val("out");
    optimize->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

    auto* build = app.add_subcommand("proxy-build", "Generate a UC proxy dataset");
    build->add_option("--config", config, "Experiment config")->required()->check(CLI::ExistingFile);
    build->add_option("--out", out, "Output directory (proxy_dataset.json)")->required();
    build->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

    auto* eval = app.add_subcommand("proxy-eval", "Per-month exact-vs-proxy gap report");
    eval->add_option("--config", config, "Experiment config")->required()->check(CLI::ExistingFile);
    eval->add_option("--dataset", dataset, "Dataset file (default: the configured one)");
    eval->add_option("--out", out, "Output directory (proxy_report.csv)")->default_val("out");
    eval->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

    auto* compare = app.add_subcommand("compare", "Compare a schedule with random feasible schedules");
    compare->add_option("--config", config, "Experiment config")->required()->check(CLI::ExistingFile);
    compare->add_option("--schedule", schedule, "Optimized schedule CSV")->required()->check(CLI::ExistingFile);
    compare->add_option("--n-random", n_random, "Random schedules")->default_val(20);
    compare->add_option("--seeds", n_seeds, "Paired scenario seeds")->default_val(1)->check(CLI::PositiveNumber);
    compare->add_option("--report", report, "report.json from optimize (barrier source)");
    compare->add_option("--out", out, "Output directory")->default_val("out");
    compare->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber);

    auto* fx = app.add_subcommand("fixtures", "Fixture maintenance");
    fx->require_subcommand(1);
    auto* regen = fx->add_subcommand("regenerate", "Recompute oracles and compare with the committed files");
    regen->add_option("--fixture", fixture, "Fixture directory")->required()->check(CLI::ExistingDirectory);
    regen->add_flag("--write", write, "Overwrite the committed oracle files");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*assess) {
            Experiment ex(config_with(config, workers));
            const auto s = load_schedule_csv(schedule, ex.config().outage_requirements);
            const auto r = ex.assess(s, seed.value_or(ex.assessment_seed(0)), ex.config().workers);
            print_metrics(r);
            if (!out.empty()) {
                std::optional<ce::BarrierParams> barrier;
                if (ex.config().ce.kappa) barrier = ce::BarrierParams{*ex.config().ce.kappa, 100.0 * *ex.config().ce.kappa};
                write_file(out, report_json(r, ex.config().thresholds, barrier));
            }
        } else if (*optimize) {
            Experiment ex(config_with(config, workers));
            try {
                const auto res = run_optimize(ex, out);
                fmt::print("converged after {} iterations\n", res.result.trace.size());
                print_metrics(res.final_report);
            } catch (const ce::MaxIterationsError& e) {
                fmt::print(stderr, "gridsched: {}\nartifacts written to {}\n", e.what(), out.string());
                return kNotConverged;
            }
        } else if (*build) {
            const auto cfg = config_with(config, workers);
            const auto grid = load_experiment_case(cfg);
            const auto ds = build_proxy_dataset(cfg, grid, cfg.process.resolve(grid));
            proxy::save_dataset(ds, out / "proxy_dataset.json");
            fmt::print("{} records over {} topologies -> {}\n", ds.records.size(), ds.index.size(),
                       (out / "proxy_dataset.json").string());
        } else if (*eval) {
            auto cfg = config_with(config, workers);
            cfg.mode = AssessmentMode::Exact;
            Experiment ex(cfg);
            const fs::path path = dataset.empty() ? cfg.proxy.dataset.value_or(fs::path{}) : dataset;
            if (path.empty()) throw ValidationError("dataset", "no dataset given and none configured");
            const auto ds = proxy::load_dataset(path, ex.grid());
            const auto rep = run_proxy_eval(ex, ds, out);
            fmt::print("{}", rep.to_csv());
        } else if (*compare) {
            Experiment ex(config_with(config, workers));
            const auto s = load_schedule_csv(schedule, ex.config().outage_requirements);
            std::optional<ce::BarrierParams> barrier;
            if (!report.empty()) barrier = read_report_barrier(report);
            const auto res = run_compare(ex, s, n_random, n_seeds, barrier, out);
            fmt::print("{} rows, barrier kappa {:.6g}, written to {}\n", res.rows.size(), res.barrier.kappa,
                       out.string());
        } else if (*regen) {
            try {
                fixtures::regenerate_oracles(fixture, write);
                fmt::print("oracles in {} {}\n", fixture.string(), write ? "written" : "match");
            } catch (const OracleDriftError& e) {
                fmt::print(stderr, "gridsched: {}\n", e.what());
                return kDrift;
            }
        }
    } catch (const Error& e) {
        fmt::print(stderr, "gridsched: {}\n", e.what());
        return kError;
    } catch (const std::exception& e) {
        fmt::print(stderr, "gridsched: unexpected error: {}\n", e.what());
        return kError;
    }
    return kOk;
}
