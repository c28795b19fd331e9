#include <algorithm>
#include <atomic>
#include <cmath>
#include <queue>

#include <fmt/format.h>

#include "gridsched/errors.hpp"
#include "gridsched/lp.hpp"

namespace gridsched::lp {

namespace {

std::atomic<std::size_t> g_milp_calls{0};

constexpr double kIntTol = 1e-7;

struct Node {
    double bound = 0.0;
    int depth = 0;
    std::size_t id = 0;
    std::vector<BoundOverride> fixes;
    std::vector<double> values;
    Basis basis;
};

struct NodeOrder {
    bool operator()(const Node& a, const Node& b) const {
        if (a.bound != b.bound) return a.bound > b.bound;
        if (a.depth != b.depth) return a.depth < b.depth;
        return a.id > b.id;
    }
};

// Most fractional binary; ties go to the lowest index. Returns npos when integral.
std::size_t branching_var(const MixedIntegerProgram& mip, const std::vector<double>& x) {
    std::size_t pick = static_cast<std::size_t>(-1);
    double best = kIntTol;
    std::vector<std::size_t> order = mip.binary_vars;
    std::sort(order.begin(), order.end());
    for (std::size_t b : order) {
        const double frac = std::min(x[b], 1.0 - x[b]);
        if (frac > best) {
            best = frac;
            pick = b;
        }
    }
    return pick;
}

std::vector<BoundOverride> snap_all(const MixedIntegerProgram& mip, const std::vector<double>& x, bool round_up) {
    std::vector<BoundOverride> fixes;
    for (std::size_t b : mip.binary_vars) {
        const double v = round_up ? (x[b] > kIntTol ? 1.0 : 0.0) : std::round(x[b]);
        fixes.push_back({b, v, v});
    }
    return fixes;
}

}  // namespace

std::size_t milp_solve_count() { return g_milp_calls.load(); }

Solution solve_milp(const MixedIntegerProgram& mip, double gap_tol) {
    ++g_milp_calls;
    mip.validate();
    if (gap_tol < 0.0) throw ValidationError("gap_tol", "must be non-negative");
    if (mip.binary_vars.empty()) return solve_lp(mip.lp);

    Solution best;
    best.status = Status::Infeasible;
    double incumbent = kInf;
    std::vector<BoundOverride> incumbent_fixes;
    std::size_t lp_solves = 0;
    std::size_t iterations = 0;

    auto accept = [&](const Solution& s, std::vector<BoundOverride> fixes) {
        if (s.objective < incumbent) {
            incumbent = s.objective;
            best = s;
            incumbent_fixes = std::move(fixes);
            best.incumbent_history.clear();
            return true;
        }
        return false;
    };
    std::vector<double> history;
    auto prune_level = [&] { return incumbent - gap_tol * std::abs(incumbent) - 1e-9; };

    Solution root = solve_lp(mip.lp);
    ++lp_solves;
    iterations += root.iterations;
    if (!root.optimal()) {
        root.nodes = 1;
        return root;
    }
    if (branching_var(mip, root.values) == static_cast<std::size_t>(-1)) {
        accept(root, {});
        history.push_back(incumbent);
    } else {
        for (bool up : {true, false}) {
            auto fixes = snap_all(mip, root.values, up);
            Solution h = solve_lp(mip.lp, fixes, &root.basis);
            ++lp_solves;
            iterations += h.iterations;
            if (h.optimal() && accept(h, fixes)) history.push_back(incumbent);
        }
    }

    std::priority_queue<Node, std::vector<Node>, NodeOrder> open;
    std::size_t next_id = 0;
    open.push(Node{root.objective, 0, next_id++, {}, root.values, root.basis});
    while (!open.empty()) {
        Node node = open.top();
        open.pop();
        if (node.bound >= prune_level()) continue;
        const std::size_t b = branching_var(mip, node.values);
        if (b == static_cast<std::size_t>(-1)) continue;  // integral nodes are accepted when created
        for (double v : {0.0, 1.0}) {
            auto fixes = node.fixes;
            fixes.push_back({b, v, v});
            Solution child = solve_lp(mip.lp, fixes, &node.basis);
            ++lp_solves;
            iterations += child.iterations;
            if (!child.optimal() || child.objective >= prune_level()) continue;
            if (branching_var(mip, child.values) == static_cast<std::size_t>(-1)) {
                if (accept(child, fixes)) history.push_back(incumbent);
                continue;
            }
            open.push(Node{child.objective, node.depth + 1, next_id++, std::move(fixes), std::move(child.values),
                           std::move(child.basis)});
        }
    }
    if (!std::isfinite(incumbent)) {
        Solution none;
        none.status = Status::Infeasible;
        none.nodes = lp_solves;
        none.iterations = iterations;
        return none;
    }
    // Re-solve with every binary pinned to its rounded value for clean output.
    auto pinned = snap_all(mip, best.values, false);
    Solution clean = solve_lp(mip.lp, pinned, &best.basis);
    ++lp_solves;
    if (clean.optimal() && clean.objective <= incumbent + 1e-9 * std::max(1.0, std::abs(incumbent))) {
        best = clean;
    } else {
        for (const auto& f : pinned) best.values[f.var] = f.lower;
        best.objective = mip.lp.evaluate(best.values);
    }
    best.nodes = lp_solves;
    best.iterations = iterations;
    best.incumbent_history = std::move(history);
    return best;
}

Solution brute_force_milp(const MixedIntegerProgram& mip) {
    mip.validate();
    const std::size_t k = mip.binary_vars.size();
    if (k > 20) throw CapacityError(fmt::format("brute force over {} binaries exceeds the limit of 20", k));
    Solution best;
    best.status = Status::Infeasible;
    std::size_t solves = 0;
    bool unbounded = false;
    // Gray-code order changes one binary per step, so each solve can start
    // from the previous basis.
    Basis warm;
    for (std::size_t step = 0; step < (std::size_t{1} << k); ++step) {
        const std::size_t mask = step ^ (step >> 1);
        std::vector<BoundOverride> fixes;
        for (std::size_t i = 0; i < k; ++i) {
            const double v = (mask >> i) & 1U ? 1.0 : 0.0;
            fixes.push_back({mip.binary_vars[i], v, v});
        }
        Solution s = solve_lp(mip.lp, fixes, warm.empty() ? nullptr : &warm);
        ++solves;
        if (s.status == Status::Unbounded) unbounded = true;
        if (s.optimal()) warm = s.basis;
        if (s.optimal() && (!best.optimal() || s.objective < best.objective)) best = s;
    }
    if (!best.optimal() && unbounded) best.status = Status::Unbounded;
    best.nodes = solves;
    return best;
}

}  // namespace gridsched::lp
