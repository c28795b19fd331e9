#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "gridsched/ce.hpp"
#include "gridsched/config.hpp"
#include "gridsched/grid.hpp"
#include "gridsched/proxy.hpp"
#include "gridsched/reliability.hpp"
#include "gridsched/sampler.hpp"
#include "gridsched/uc.hpp"

namespace gridsched {

struct MonthSeries {
    int month = 0;
    double cost = 0.0;         // weighted real-time operating cost, mean over scenarios
    double da_cost = 0.0;      // weighted day-ahead UC cost, mean over scenarios
    double reliability = 0.0;  // mean over visited real-time hours and scenarios
    double shed_mw = 0.0;      // mean per visited real-time hour
};

struct AssessmentReport {
    ce::OutageSchedule schedule;
    ScheduleMetrics metrics;
    std::vector<MonthSeries> months;
    AssessmentMode mode = AssessmentMode::Exact;
    std::uint64_t seed = 0;
    double wall_time_s = 0.0;  // not part of any written artifact
};

/// Loaded case, resolved process and the caches shared by every assessment
/// of one experiment. Thread-safe for concurrent `assess` calls.
class Experiment {
public:
    explicit Experiment(ExperimentConfig cfg);
    /// Uses an in-memory dataset instead of the configured path.
    Experiment(ExperimentConfig cfg, proxy::ProxyDataset dataset);

    const ExperimentConfig& config() const { return cfg_; }
    const GridCase& grid() const { return grid_; }
    const ProcessParams& process() const { return process_; }
    const proxy::ProxyDataset* dataset() const { return dataset_.get(); }

    /// Planned topology of a month: every line scheduled out that month is removed.
    Topology topology_for(const ce::OutageSchedule& schedule, int month) const;

    /// Scenario seed root for a CE iteration; constant when scenarios are fixed.
    std::uint64_t assessment_seed(std::size_t iteration) const;

    /// Accepts any feasible schedule and the all-zero baseline.
    AssessmentReport assess(const ce::OutageSchedule& schedule, std::uint64_t seed, int workers = 1) const;

    /// Exact UC solves performed so far (cache misses).
    std::size_t uc_solves() const;

private:
    struct MonthTotals {
        double cost = 0.0, da_cost = 0.0, reliability = 0.0, shed_mw = 0.0;
        std::size_t hours = 0;
    };

    std::shared_ptr<const ScenarioSample> scenario(std::uint64_t seed) const;
    UcSolution day_ahead(const Topology& top, const DayAheadForecast& forecast, const InitialStatusList& initial,
                         int month, const std::string& cache_key) const;
    MonthTotals run_month(const ce::OutageSchedule& schedule, const MonthSample& month, std::uint64_t scenario_seed,
                          std::size_t scenario_index) const;

    ExperimentConfig cfg_;
    GridCase grid_;
    ProcessParams process_;
    std::shared_ptr<const proxy::ProxyDataset> dataset_;

    mutable std::mutex mu_;
    mutable std::map<std::uint64_t, std::shared_ptr<const ScenarioSample>> scenarios_;
    mutable std::map<std::string, UcSolution> uc_cache_;
    mutable std::map<std::pair<std::string, std::uint64_t>, AssessmentReport> reports_;
    mutable std::size_t uc_solves_ = 0;
};

/// Loads the case named by a config, applying modifications and price overrides.
GridCase load_experiment_case(const ExperimentConfig& cfg);

/// Outage candidates used for proxy keys: the required lines plus the
/// configured zoning.
proxy::OutageSet proxy_outage_set(const ExperimentConfig& cfg);

proxy::ProxyDataset build_proxy_dataset(const ExperimentConfig& cfg, const GridCase& grid, const ProcessParams& process);

/// Exact-vs-proxy gap report on fresh queries drawn from the config's
/// process; writes proxy_report.csv under `out_dir` when it is non-empty.
proxy::ProxyReport run_proxy_eval(const Experiment& ex, const proxy::ProxyDataset& ds,
                                  const std::filesystem::path& out_dir = {});

// Schedule and distribution files: header "line_id,1,...,12", one row per line.
std::string write_schedule_csv(const ce::OutageSchedule& s);
ce::OutageSchedule parse_schedule_csv(const std::string& text, const std::vector<ce::OutageRequirement>& reqs,
                                      const std::string& origin = "<string>");
ce::OutageSchedule load_schedule_csv(const std::filesystem::path& path, const std::vector<ce::OutageRequirement>& reqs);
std::string write_distribution_csv(const std::vector<int>& line_ids, const ce::CeDistribution& dist);
std::string write_trace_csv(const std::vector<ce::TraceRow>& trace);

std::string report_json(const AssessmentReport& report, const ChanceThresholds& thr,
                        const std::optional<ce::BarrierParams>& barrier);

struct OptimizeOutcome {
    ce::CeResult result;
    AssessmentReport final_report;
};

/// Runs the cross-entropy search and writes best_schedule.csv, trace.csv,
/// p_matrices/iter_NNN.csv and report.json under `out_dir`. Artifacts are
/// written even when the search hits its iteration cap.
OptimizeOutcome run_optimize(const Experiment& ex, const std::filesystem::path& out_dir);

struct CompareRow {
    std::size_t schedule_id = 0;  // 0 = optimized
    bool optimized = false;
    std::uint64_t seed = 0;
    std::string schedule_key;
    double expected_cost = 0.0;
    double penalized_cost = 0.0;
    double mean_reliability = 0.0;
    double mean_shed_frac = 0.0;
    double p_reliability_ok = 0.0;
    double p_shed_ok = 0.0;
};

struct CompareResult {
    ce::BarrierParams barrier;
    std::vector<CompareRow> rows;
};

/// Assesses the optimized schedule and `n_random` uniformly drawn feasible
/// schedules on the same `n_seeds` seeds; writes compare.csv, scatter.csv
/// and histogram_{cost,reliability,shed}.csv. The barrier comes from the
/// config, else from `barrier`, else from the mean expected cost of all rows.
CompareResult run_compare(const Experiment& ex, const ce::OutageSchedule& optimized, std::size_t n_random,
                          std::size_t n_seeds, const std::optional<ce::BarrierParams>& barrier,
                          const std::filesystem::path& out_dir);

/// Reads the barrier recorded in a report.json written by run_optimize.
std::optional<ce::BarrierParams> read_report_barrier(const std::filesystem::path& report_path);

}  // namespace gridsched
