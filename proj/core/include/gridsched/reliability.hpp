#pragma once

#include <vector>

#include <Eigen/Dense>

#include "gridsched/grid.hpp"
#include "gridsched/rt.hpp"
#include "gridsched/stochastic.hpp"

namespace gridsched {

struct Contingency {
    std::size_t line = 0;  // position in GridCase::lines
    int line_id = 0;
};

/// One single-line outage per in-service line, ordered by line id.
std::vector<Contingency> contingency_list(const GridCase& grid, const Topology& topology);

/// Decides whether an operating point survives a network change. The
/// injections (MW per bus) are held fixed; only angles may adjust.
class FeasibilityChecker {
public:
    virtual ~FeasibilityChecker() = default;
    virtual bool feasible(const GridCase& grid, const Topology& pre, const Topology& post,
                          const Eigen::VectorXd& injections_mw) const = 0;
};

/// Lossless DC check: a post-contingency island that strands load or
/// injection is infeasible; otherwise angles are solved per island and
/// every in-service flow must stay within its limit.
class DcFeasibilityChecker final : public FeasibilityChecker {
public:
    explicit DcFeasibilityChecker(double flow_tol_mw = 1e-6, double balance_tol_mw = 1e-6)
        : flow_tol_(flow_tol_mw), balance_tol_(balance_tol_mw) {}
    bool feasible(const GridCase& grid, const Topology& pre, const Topology& post,
                  const Eigen::VectorXd& injections_mw) const override;

    /// DC flows (MW) for fixed injections, one angle pinned per island.
    static Eigen::VectorXd flows(const GridCase& grid, const Topology& topology, const Eigen::VectorXd& injections_mw);

private:
    double flow_tol_;
    double balance_tol_;
};

/// Net nodal injection of a real-time operating point (MW per bus).
Eigen::VectorXd net_injections(const GridCase& grid, const HourlyRealization& state, const RtDecision& decision);

/// Fraction of contingencies the checker accepts; 1 when there are none.
double state_reliability(const GridCase& grid, const Topology& topology, const HourlyRealization& state,
                         const RtDecision& decision, const FeasibilityChecker& checker);

struct StateMetrics {
    double reliability = 1.0;
    double shed_mw = 0.0;
    double operating_cost = 0.0;
};

struct ChanceThresholds {
    double r_min = 0.8;
    double shed_max_frac = 0.005;
    double alpha_r = 0.05;
    double alpha_shed = 0.05;

    void validate() const;
};

struct ScenarioMetrics {
    double mean_reliability = 1.0;
    double mean_shed_mw = 0.0;    // per visited real-time hour
    double mean_shed_frac = 0.0;  // mean_shed_mw over total load capacity
    double total_cost = 0.0;      // weighted operating cost over the horizon
};

struct ChanceResult {
    double p_r = 0.0;
    double p_ls = 0.0;
    bool reliability_ok = false;
    bool shed_ok = false;
};

ChanceResult evaluate_chance(const std::vector<ScenarioMetrics>& per_scenario, const ChanceThresholds& thr,
                             double total_load_capacity_mw);

struct ScheduleMetrics {
    std::vector<ScenarioMetrics> per_scenario;
    double expected_cost = 0.0;
    double p_reliability_ok = 0.0;
    double p_shed_ok = 0.0;

    double mean_reliability() const;
    double mean_shed_frac() const;
};

ScheduleMetrics aggregate_metrics(std::vector<ScenarioMetrics> per_scenario, const ChanceThresholds& thr,
                                  double total_load_capacity_mw);

}  // namespace gridsched
