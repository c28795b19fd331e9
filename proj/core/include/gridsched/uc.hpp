#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gridsched/grid.hpp"
#include "gridsched/lp.hpp"
#include "gridsched/stochastic.hpp"

namespace gridsched {

/// Commitment history of one generator at the start of a horizon.
struct InitialStatus {
    static constexpr int kLongEnough = 10000;
    bool on = true;
    int hours = kLongEnough;  // consecutive hours in the current state

    static InitialStatus long_on() { return {true, kLongEnough}; }
    static InitialStatus long_off() { return {false, kLongEnough}; }
    bool operator==(const InitialStatus&) const = default;
};

using InitialStatusList = std::vector<InitialStatus>;

/// All generators on long enough that min up/down times do not bind.
InitialStatusList unconstrained_start(const GridCase& grid);

struct UcSolution {
    Eigen::MatrixXi commitment;       // n_gen x T
    Eigen::MatrixXd dispatch_mw;      // n_gen x T
    Eigen::MatrixXd wind_curtail_mw;  // n_wind x T
    Eigen::MatrixXd load_shed_mw;     // n_bus x T
    Eigen::MatrixXd angles_rad;       // n_bus x T
    double cost = 0.0;
    Topology topology;
    InitialStatusList initial;

    int hours() const { return static_cast<int>(commitment.cols()); }
    /// Commitment state after the last hour, used to chain the next day.
    InitialStatusList final_status() const;
};

/// Column positions of every UC decision variable (hour-major layout).
struct UcIndex {
    int hours = 0;
    std::vector<std::vector<std::size_t>> alpha, start, power;  // [g][t]
    std::vector<std::vector<std::vector<std::size_t>>> segment;  // [g][k][t]
    std::vector<std::vector<std::vector<std::size_t>>> cold;     // [g][j][t], steps j >= 1
    std::vector<std::vector<std::size_t>> curtail;               // [w][t]
    std::vector<std::vector<std::size_t>> shed, angle;           // [b][t]
};

struct UcProblem {
    lp::MixedIntegerProgram mip;
    UcIndex index;
};

/// Columns per hour: 3 per generator (commitment, start indicator, output),
/// one per cost block, one per cold-start step beyond the first, one per
/// wind farm, and two per bus (shedding, angle).
std::size_t uc_variable_count(const GridCase& grid, int hours);

UcProblem build_uc(const GridCase& grid, const Topology& topology, const DayAheadForecast& forecast,
                   const InitialStatusList& initial);

/// Solves the day-ahead UC. `cost` is recomputed from the returned
/// commitment and dispatch rather than read off the MILP.
UcSolution solve_uc(const GridCase& grid, const Topology& topology, const DayAheadForecast& forecast,
                    const InitialStatusList& initial, double gap_tol = 1e-6);

/// Converts a MILP solution vector into a UcSolution.
UcSolution extract_uc(const GridCase& grid, const Topology& topology, const InitialStatusList& initial,
                      const UcIndex& index, const std::vector<double>& values);

/// Objective of a commitment/dispatch pair evaluated from the case data.
double uc_cost(const GridCase& grid, const UcSolution& sol);

/// Cost of starting generator g at hour t given the commitment matrix and
/// the pre-horizon history.
double startup_cost_at(const DispatchableGenerator& gen, const Eigen::MatrixXi& commitment, std::size_t g, int t,
                       const InitialStatus& initial);

/// Independent constraint check rebuilt from the case. Returns one message
/// per violation; empty when the solution is feasible within `tol`.
std::vector<std::string> verify_uc(const GridCase& grid, const Topology& topology, const DayAheadForecast& forecast,
                                   const UcSolution& sol, double tol = 1e-6);

/// Splits an output level into cost-block loadings, cheapest block first.
std::vector<double> fill_segments(const DispatchableGenerator& gen, double p_mw);

}  // namespace gridsched
