#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <string>
#include <utility>
#include <vector>

namespace gridsched::lp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Relation { LessEqual, Equal, GreaterEqual };

struct Term {
    std::size_t var = 0;
    double coeff = 0.0;
};

struct Constraint {
    std::vector<Term> coeffs;
    Relation relation = Relation::LessEqual;
    double rhs = 0.0;
    std::string name;
};

/// minimize c'x subject to rows and simple bounds.
struct LinearProgram {
    std::vector<double> objective;
    std::vector<Constraint> constraints;
    std::vector<double> lower;
    std::vector<double> upper;
    std::vector<std::string> names;

    std::size_t n_vars() const { return objective.size(); }
    std::size_t n_constraints() const { return constraints.size(); }

    std::size_t add_variable(double lo, double hi, double cost, std::string name = {});
    std::size_t add_constraint(std::vector<Term> coeffs, Relation rel, double rhs, std::string name = {});

    /// Throws ValidationError on dimension mismatch, lo > hi or non-finite data.
    void validate() const;
    /// Row activity a_i'x for every constraint.
    std::vector<double> activities(const std::vector<double>& x) const;
    /// Largest bound or row violation of x (0 when feasible).
    double max_violation(const std::vector<double>& x) const;
    double evaluate(const std::vector<double>& x) const;
};

struct MixedIntegerProgram {
    LinearProgram lp;
    std::vector<std::size_t> binary_vars;

    void validate() const;
};

enum class Status { Optimal, Infeasible, Unbounded };

const char* to_string(Status s);

/// Simplex basis over the structural columns followed by one logical per
/// row. Nonbasic status: 0 at lower bound, 1 at upper bound, 2 free at zero.
struct Basis {
    std::vector<std::size_t> basic;
    std::vector<std::uint8_t> status;

    bool empty() const { return basic.empty(); }
};

struct Solution {
    Status status = Status::Infeasible;
    std::vector<double> values;
    double objective = 0.0;
    /// Row multipliers y with c - A'y = reduced_costs (LP solves only).
    std::vector<double> duals;
    std::vector<double> reduced_costs;
    std::size_t iterations = 0;
    std::size_t nodes = 0;
    /// Incumbent objective after each improvement (MILP solves only).
    std::vector<double> incumbent_history;
    /// Final basis of an optimal LP solve, reusable as a warm start.
    Basis basis;

    bool optimal() const { return status == Status::Optimal; }
};

struct BoundOverride {
    std::size_t var = 0;
    double lower = 0.0;
    double upper = 0.0;
};

/// Revised bounded simplex: dual simplex from a slack or warm basis, then
/// primal simplex for any remaining dual infeasibility. Throws
/// NumericalError when the iteration cap 50*(n_vars + n_constraints) + 1000
/// is exceeded.
Solution solve_lp(const LinearProgram& lp);
Solution solve_lp(const LinearProgram& lp, const std::vector<BoundOverride>& overrides,
                  const Basis* warm = nullptr);

/// Dual objective implied by (duals, reduced_costs) for an optimal solve;
/// equals the primal objective at optimality.
double dual_objective(const LinearProgram& lp, const Solution& sol);

/// Best-first branch and bound on the binaries, most-fractional branching.
Solution solve_milp(const MixedIntegerProgram& mip, double gap_tol = 1e-6);

/// Enumerates every binary assignment. Throws CapacityError above 20 binaries.
Solution brute_force_milp(const MixedIntegerProgram& mip);

/// Number of solve_milp calls made by this process so far.
std::size_t milp_solve_count();

/// CPLEX LP text format, for cross-checking with external solvers.
std::string write_lp_format(const LinearProgram& lp);
std::string write_lp_format(const MixedIntegerProgram& mip);

}  // namespace gridsched::lp
