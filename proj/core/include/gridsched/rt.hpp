#pragma once

#include <Eigen/Dense>

#include "gridsched/grid.hpp"
#include "gridsched/stochastic.hpp"
#include "gridsched/uc.hpp"

namespace gridsched {

struct RtOptions {
    /// Let offline units with p_min within one hour's ramp start at their
    /// hot start-up cost. Turns the hourly problem into a small MILP.
    bool allow_emergency_commit = false;
};

struct RtDecision {
    int hour = 0;
    Eigen::VectorXi commitment;       // n_gen
    Eigen::VectorXd dispatch_mw;      // n_gen
    Eigen::VectorXd wind_curtail_mw;  // n_wind
    Eigen::VectorXd load_shed_mw;     // n_bus
    Eigen::VectorXd spill_mw;         // n_bus, forced over-generation (normally zero)
    Eigen::VectorXd angles_rad;       // n_bus
    double redispatch_cost = 0.0;
    double curtail_cost = 0.0;
    double shed_cost = 0.0;
    double spill_cost = 0.0;
    double startup_cost = 0.0;
    double total_cost = 0.0;

    double shed_mw() const { return load_shed_mw.sum(); }
    double curtail_mw() const { return wind_curtail_mw.sum(); }
};

/// Hourly redispatch against the UC baseline at `hour`. `prev` is the
/// decision of the previous hour in the same window, or null at a window
/// start, in which case ramps are anchored to the baseline dispatch.
RtDecision solve_rt(const GridCase& grid, const Topology& topology, const HourlyRealization& state,
                    const UcSolution& baseline, int hour, const RtDecision* prev, const RtOptions& options = {});

/// The operating-cost summand: everything except the shedding penalty.
double rt_operating_cost(const RtDecision& decision);

}  // namespace gridsched
