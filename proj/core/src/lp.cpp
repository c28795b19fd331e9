#include "gridsched/lp.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#include <fmt/format.h>

#include "gridsched/errors.hpp"

namespace gridsched::lp {

std::size_t LinearProgram::add_variable(double lo, double hi, double cost, std::string name) {
    objective.push_back(cost);
    lower.push_back(lo);
    upper.push_back(hi);
    names.push_back(std::move(name));
    return objective.size() - 1;
}

std::size_t LinearProgram::add_constraint(std::vector<Term> coeffs, Relation rel, double rhs, std::string name) {
    constraints.push_back({std::move(coeffs), rel, rhs, std::move(name)});
    return constraints.size() - 1;
}

void LinearProgram::validate() const {
    const std::size_t n = objective.size();
    if (lower.size() != n || upper.size() != n)
        throw ValidationError("lp.bounds", fmt::format("{} variables but {}/{} bounds", n, lower.size(), upper.size()));
    if (!names.empty() && names.size() != n) throw ValidationError("lp.names", "size differs from variable count");
    for (std::size_t j = 0; j < n; ++j) {
        if (!std::isfinite(objective[j])) throw ValidationError(fmt::format("lp.objective[{}]", j), "not finite");
        if (std::isnan(lower[j]) || std::isnan(upper[j]) || lower[j] > upper[j])
            throw ValidationError(fmt::format("lp.bounds[{}]", j), "lower bound exceeds upper bound");
    }
    for (std::size_t i = 0; i < constraints.size(); ++i) {
        const auto& c = constraints[i];
        if (!std::isfinite(c.rhs)) throw ValidationError(fmt::format("lp.constraints[{}].rhs", i), "not finite");
        for (const auto& t : c.coeffs) {
            if (t.var >= n) throw ValidationError(fmt::format("lp.constraints[{}]", i), "variable index out of range");
            if (!std::isfinite(t.coeff)) throw ValidationError(fmt::format("lp.constraints[{}]", i), "coefficient not finite");
        }
    }
}

std::vector<double> LinearProgram::activities(const std::vector<double>& x) const {
    std::vector<double> act(constraints.size(), 0.0);
    for (std::size_t i = 0; i < constraints.size(); ++i)
        for (const auto& t : constraints[i].coeffs) act[i] += t.coeff * x[t.var];
    return act;
}

double LinearProgram::max_violation(const std::vector<double>& x) const {
    double worst = 0.0;
    for (std::size_t j = 0; j < objective.size(); ++j) {
        worst = std::max(worst, lower[j] - x[j]);
        worst = std::max(worst, x[j] - upper[j]);
    }
    const auto act = activities(x);
    for (std::size_t i = 0; i < constraints.size(); ++i) {
        const double r = constraints[i].rhs;
        switch (constraints[i].relation) {
            case Relation::LessEqual: worst = std::max(worst, act[i] - r); break;
            case Relation::GreaterEqual: worst = std::max(worst, r - act[i]); break;
            case Relation::Equal: worst = std::max(worst, std::abs(act[i] - r)); break;
        }
    }
    return worst;
}

double LinearProgram::evaluate(const std::vector<double>& x) const {
    double z = 0.0;
    for (std::size_t j = 0; j < objective.size(); ++j) z += objective[j] * x[j];
    return z;
}

void MixedIntegerProgram::validate() const {
    lp.validate();
    for (std::size_t b : binary_vars) {
        if (b >= lp.n_vars()) throw ValidationError("mip.binary_vars", fmt::format("index {} out of range", b));
        if (lp.lower[b] < 0.0 || lp.upper[b] > 1.0)
            throw ValidationError(fmt::format("mip.binary_vars[{}]", b), "bounds must lie within [0,1]");
    }
}

const char* to_string(Status s) {
    switch (s) {
        case Status::Optimal: return "optimal";
        case Status::Infeasible: return "infeasible";
        case Status::Unbounded: return "unbounded";
    }
    return "unknown";
}

namespace {

constexpr double kPivotTol = 1e-9;
constexpr double kPrimalTol = 1e-8;
constexpr double kDualTol = 1e-9;
constexpr int kDegenerateSwitch = 50;
constexpr std::size_t kRefactorEvery = 64;

enum : std::uint8_t { kAtLower = 0, kAtUpper = 1, kAtZero = 2 };

// Columns 0..n-1 are structurals, n..n+m-1 are logicals r_i with
// a_i'x - r_i = 0, so every row relation becomes a bound on r_i.
class Simplex {
public:
    Simplex(const LinearProgram& lp, const std::vector<BoundOverride>& overrides) : lp_(lp) {
        n_ = lp.n_vars();
        m_ = lp.n_constraints();
        total_ = n_ + m_;
        cap_ = 50 * total_ + 1000;
        lo_ = lp.lower;
        hi_ = lp.upper;
        for (const auto& o : overrides) {
            lo_[o.var] = std::max(lo_[o.var], o.lower);
            hi_[o.var] = std::min(hi_[o.var], o.upper);
        }
        lo_.resize(total_);
        hi_.resize(total_);
        for (std::size_t i = 0; i < m_; ++i) {
            const auto& c = lp.constraints[i];
            lo_[n_ + i] = c.relation == Relation::LessEqual ? -kInf : c.rhs;
            hi_[n_ + i] = c.relation == Relation::GreaterEqual ? kInf : c.rhs;
        }
        orig_lo_ = lo_;
        orig_hi_ = hi_;
        cost_.assign(total_, 0.0);
        double cmax = 1.0;
        for (std::size_t j = 0; j < n_; ++j) {
            cost_[j] = lp.objective[j];
            cmax = std::max(cmax, std::abs(cost_[j]));
        }
        dual_tol_ = kDualTol * cmax;
        // Column-major copy of the structural part.
        std::vector<std::size_t> counts(n_, 0);
        for (const auto& c : lp.constraints)
            for (const auto& t : c.coeffs) ++counts[t.var];
        col_start_.assign(n_ + 1, 0);
        for (std::size_t j = 0; j < n_; ++j) col_start_[j + 1] = col_start_[j] + counts[j];
        row_idx_.resize(col_start_[n_]);
        val_.resize(col_start_[n_]);
        std::vector<std::size_t> fill(col_start_.begin(), col_start_.end() - 1);
        for (std::size_t i = 0; i < m_; ++i) {
            for (const auto& t : lp.constraints[i].coeffs) {
                row_idx_[fill[t.var]] = i;
                val_[fill[t.var]++] = t.coeff;
            }
        }
    }

    Solution run(const Basis* warm) {
        Solution sol;
        for (std::size_t j = 0; j < n_; ++j) {
            if (lo_[j] > hi_[j] + kPrimalTol) {
                sol.status = Status::Infeasible;
                return sol;
            }
            if (lo_[j] > hi_[j]) hi_[j] = lo_[j];
        }
        if (warm && warm->basic.size() == m_ && warm->status.size() == total_) {
            basis_ = warm->basic;
            status_ = warm->status;
        } else {
            slack_basis();
        }
        place_nonbasics();
        if (!refactor()) {
            slack_basis();
            place_nonbasics();
            if (!refactor()) throw NumericalError("simplex: slack basis failed to factorize");
        }
        compute_primal();
        compute_duals();
        make_dual_feasible();

        for (int round = 0; round < 4; ++round) {
            if (!dual_simplex()) {
                sol.status = Status::Infeasible;
                sol.iterations = iterations_;
                return sol;
            }
            restore_costs();
            if (!primal_simplex()) {
                sol.status = Status::Unbounded;
                sol.iterations = iterations_;
                return sol;
            }
            compute_primal();
            compute_duals();
            if (!optimal_enough() && !etas_.empty()) {
                refactor_or_throw();
                compute_primal();
                compute_duals();
            }
            if (optimal_enough()) break;
            make_dual_feasible();
        }

        sol.status = Status::Optimal;
        sol.iterations = iterations_;
        sol.values.assign(x_.begin(), x_.begin() + static_cast<std::ptrdiff_t>(n_));
        for (std::size_t j = 0; j < n_; ++j) sol.values[j] = std::clamp(sol.values[j], lo_[j], hi_[j]);
        sol.objective = lp_.evaluate(sol.values);
        sol.reduced_costs.assign(d_.begin(), d_.begin() + static_cast<std::ptrdiff_t>(n_));
        sol.duals = y_;
        sol.basis.basic = basis_;
        sol.basis.status = status_;
        return sol;
    }

private:
    struct Eta {
        std::size_t p = 0;
        double pivot = 0.0;
        std::vector<std::pair<std::size_t, double>> col;  // off-pivot entries of B^{-1} a_q
    };

    bool optimal_enough() const {
        return max_primal_infeasibility() <= 1e-6 * std::max(1.0, scale()) && dual_feasible();
    }

    double scale() const {
        double s = 1.0;
        for (std::size_t i = 0; i < m_; ++i) s = std::max(s, std::abs(lp_.constraints[i].rhs));
        return s;
    }

    void slack_basis() {
        basis_.resize(m_);
        status_.assign(total_, kAtLower);
        for (std::size_t i = 0; i < m_; ++i) basis_[i] = n_ + i;
        for (std::size_t j = 0; j < n_; ++j) {
            const bool lo_ok = std::isfinite(lo_[j]), hi_ok = std::isfinite(hi_[j]);
            if (cost_[j] > 0.0)
                status_[j] = kAtLower;
            else if (cost_[j] < 0.0)
                status_[j] = kAtUpper;
            else
                status_[j] = lo_ok ? kAtLower : hi_ok ? kAtUpper : kAtZero;
        }
    }

    // Puts each nonbasic column at the bound its status names; a column with
    // no finite bound on that side sits at the other bound or at zero.
    void place_nonbasics() {
        x_.assign(total_, 0.0);
        pos_.assign(total_, -1);
        for (std::size_t i = 0; i < m_; ++i) pos_[basis_[i]] = static_cast<long>(i);
        for (std::size_t j = 0; j < total_; ++j) {
            if (pos_[j] >= 0) continue;
            set_nonbasic(j, status_[j]);
        }
    }

    void set_nonbasic(std::size_t j, std::uint8_t st) {
        const bool lo_ok = std::isfinite(lo_[j]), hi_ok = std::isfinite(hi_[j]);
        if (st == kAtLower && !lo_ok) st = hi_ok ? kAtUpper : kAtZero;
        if (st == kAtUpper && !hi_ok) st = lo_ok ? kAtLower : kAtZero;
        if (st == kAtZero && (lo_ok || hi_ok)) st = lo_ok ? kAtLower : kAtUpper;
        status_[j] = st;
        x_[j] = st == kAtLower ? lo_[j] : st == kAtUpper ? hi_[j] : 0.0;
    }

    void restore_costs() {
        if (!shifted_) return;
        for (std::size_t j = 0; j < n_; ++j) cost_[j] = lp_.objective[j];
        shifted_ = false;
        compute_duals();
    }

    void column(std::size_t j, Eigen::VectorXd& v) const {
        v.setZero(static_cast<Eigen::Index>(m_));
        if (j < n_) {
            for (std::size_t k = col_start_[j]; k < col_start_[j + 1]; ++k)
                v[static_cast<Eigen::Index>(row_idx_[k])] = val_[k];
        } else {
            v[static_cast<Eigen::Index>(j - n_)] = -1.0;
        }
    }

    double dot_column(std::size_t j, const Eigen::VectorXd& y) const {
        if (j >= n_) return -y[static_cast<Eigen::Index>(j - n_)];
        double s = 0.0;
        for (std::size_t k = col_start_[j]; k < col_start_[j + 1]; ++k)
            s += val_[k] * y[static_cast<Eigen::Index>(row_idx_[k])];
        return s;
    }

    bool refactor() {
        etas_.clear();
        if (m_ == 0) return true;
        std::vector<Eigen::Triplet<double>> trips;
        for (std::size_t i = 0; i < m_; ++i) {
            const std::size_t j = basis_[i];
            if (j < n_) {
                for (std::size_t k = col_start_[j]; k < col_start_[j + 1]; ++k)
                    trips.emplace_back(static_cast<int>(row_idx_[k]), static_cast<int>(i), val_[k]);
            } else {
                trips.emplace_back(static_cast<int>(j - n_), static_cast<int>(i), -1.0);
            }
        }
        Eigen::SparseMatrix<double> B(static_cast<Eigen::Index>(m_), static_cast<Eigen::Index>(m_));
        B.setFromTriplets(trips.begin(), trips.end());
        B.makeCompressed();
        lu_.analyzePattern(B);
        lu_.factorize(B);
        return lu_.info() == Eigen::Success;
    }

    void refactor_or_throw() {
        if (!refactor()) throw NumericalError("simplex: basis became singular");
    }

    void ftran(Eigen::VectorXd& v) const {
        if (m_ == 0) return;
        v = lu_.solve(v);
        for (const auto& e : etas_) {
            const double vp = v[static_cast<Eigen::Index>(e.p)];
            if (vp == 0.0) continue;
            const double t = vp / e.pivot;
            for (const auto& [i, a] : e.col) v[static_cast<Eigen::Index>(i)] -= a * t;
            v[static_cast<Eigen::Index>(e.p)] = t;
        }
    }

    void btran(Eigen::VectorXd& v) const {
        if (m_ == 0) return;
        for (auto it = etas_.rbegin(); it != etas_.rend(); ++it) {
            double s = v[static_cast<Eigen::Index>(it->p)];
            for (const auto& [i, a] : it->col) s -= a * v[static_cast<Eigen::Index>(i)];
            v[static_cast<Eigen::Index>(it->p)] = s / it->pivot;
        }
        v = lu_.transpose().solve(v);
    }

    void compute_primal() {
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m_));
        for (std::size_t j = 0; j < total_; ++j) {
            if (pos_[j] >= 0 || x_[j] == 0.0) continue;
            if (j < n_) {
                for (std::size_t k = col_start_[j]; k < col_start_[j + 1]; ++k)
                    rhs[static_cast<Eigen::Index>(row_idx_[k])] -= val_[k] * x_[j];
            } else {
                rhs[static_cast<Eigen::Index>(j - n_)] += x_[j];
            }
        }
        ftran(rhs);
        for (std::size_t i = 0; i < m_; ++i) x_[basis_[i]] = rhs[static_cast<Eigen::Index>(i)];
    }

    void compute_duals() {
        Eigen::VectorXd cb(static_cast<Eigen::Index>(m_));
        for (std::size_t i = 0; i < m_; ++i) cb[static_cast<Eigen::Index>(i)] = cost_[basis_[i]];
        btran(cb);
        y_.assign(cb.data(), cb.data() + m_);
        yv_ = cb;
        d_.assign(total_, 0.0);
        for (std::size_t j = 0; j < total_; ++j) {
            if (pos_[j] >= 0) continue;
            d_[j] = cost_[j] - dot_column(j, yv_);
        }
    }

    static double tol_at(double bound) { return kPrimalTol * std::max(1.0, std::abs(bound)); }
    bool can_increase(std::size_t j) const { return !std::isfinite(hi_[j]) || x_[j] < hi_[j] - tol_at(hi_[j]); }
    bool can_decrease(std::size_t j) const { return !std::isfinite(lo_[j]) || x_[j] > lo_[j] + tol_at(lo_[j]); }
    bool is_fixed(std::size_t j) const { return hi_[j] - lo_[j] <= 0.0; }

    bool dual_feasible() const {
        for (std::size_t j = 0; j < total_; ++j) {
            if (pos_[j] >= 0 || is_fixed(j)) continue;
            if (d_[j] < -dual_tol_ && can_increase(j)) return false;
            if (d_[j] > dual_tol_ && can_decrease(j)) return false;
        }
        return true;
    }

    // Moves every dual-infeasible nonbasic to the bound its reduced cost
    // prefers. Where that bound is infinite the cost is shifted instead;
    // true costs come back before the primal pass.
    void make_dual_feasible() {
        bool moved = false;
        for (std::size_t j = 0; j < total_; ++j) {
            if (pos_[j] >= 0 || is_fixed(j)) continue;
            const bool want_up = d_[j] < -dual_tol_ && can_increase(j);
            const bool want_down = d_[j] > dual_tol_ && can_decrease(j);
            if (!want_up && !want_down) continue;
            if (want_up && std::isfinite(hi_[j])) {
                set_nonbasic(j, kAtUpper);
                moved = true;
            } else if (want_down && std::isfinite(lo_[j])) {
                set_nonbasic(j, kAtLower);
                moved = true;
            } else {
                cost_[j] -= d_[j];
                d_[j] = 0.0;
                shifted_ = true;
            }
        }
        if (moved) compute_primal();
    }

    double infeasibility(std::size_t b) const {
        const double v = x_[b];
        if (std::isfinite(lo_[b]) && v < lo_[b] - tol_at(lo_[b])) return lo_[b] - v;
        if (std::isfinite(hi_[b]) && v > hi_[b] + tol_at(hi_[b])) return v - hi_[b];
        return 0.0;
    }

    double max_primal_infeasibility() const {
        double w = 0.0;
        for (std::size_t i = 0; i < m_; ++i) w = std::max(w, infeasibility(basis_[i]));
        return w;
    }

    void count_iteration() {
        if (++iterations_ > cap_)
            throw NumericalError(fmt::format("simplex exceeded {} iterations ({} vars, {} rows)", cap_, n_, m_));
    }

    void replace(std::size_t p, std::size_t q, const Eigen::VectorXd& alpha) {
        const std::size_t out = basis_[p];
        pos_[out] = -1;
        basis_[p] = q;
        pos_[q] = static_cast<long>(p);
        Eta e;
        e.p = p;
        e.pivot = alpha[static_cast<Eigen::Index>(p)];
        for (std::size_t i = 0; i < m_; ++i) {
            const double a = alpha[static_cast<Eigen::Index>(i)];
            if (i != p && a != 0.0) e.col.emplace_back(i, a);
        }
        etas_.push_back(std::move(e));
        if (etas_.size() >= kRefactorEvery) {
            refactor_or_throw();
            compute_primal();
        }
    }

    // Returns false when the problem is primal infeasible.
    bool dual_simplex() {
        int degenerate = 0;
        Eigen::VectorXd rho(static_cast<Eigen::Index>(m_)), alpha(static_cast<Eigen::Index>(m_));
        std::vector<double> arow(total_, 0.0);
        for (;;) {
            const bool bland = degenerate >= kDegenerateSwitch;
            long p = -1;
            double worst = 0.0;
            for (std::size_t i = 0; i < m_; ++i) {
                const double inf = infeasibility(basis_[i]);
                if (inf <= 0.0) continue;
                if (bland) {
                    if (p < 0 || basis_[i] < basis_[static_cast<std::size_t>(p)]) p = static_cast<long>(i);
                } else if (inf > worst) {
                    worst = inf;
                    p = static_cast<long>(i);
                }
            }
            if (p < 0) return true;
            count_iteration();
            const auto pr = static_cast<std::size_t>(p);
            const std::size_t b = basis_[pr];
            const bool increase = x_[b] < lo_[b];
            rho.setZero();
            rho[p] = 1.0;
            btran(rho);

            // Harris two-pass ratio test over the pivot row.
            double tmax = kInf;
            for (std::size_t j = 0; j < total_; ++j) {
                arow[j] = 0.0;
                if (pos_[j] >= 0 || is_fixed(j)) continue;
                const double a = dot_column(j, rho);
                arow[j] = a;
                if (std::abs(a) <= kPivotTol) continue;
                const bool up = increase ? a < 0.0 : a > 0.0;
                if (up ? !can_increase(j) : !can_decrease(j)) continue;
                const double dj = up ? d_[j] : -d_[j];
                tmax = std::min(tmax, (std::max(dj, 0.0) + dual_tol_) / std::abs(a));
            }
            if (!std::isfinite(tmax)) return false;
            long q = -1;
            double qmag = 0.0, qratio = kInf;
            for (std::size_t j = 0; j < total_; ++j) {
                const double a = arow[j];
                if (pos_[j] >= 0 || std::abs(a) <= kPivotTol || is_fixed(j)) continue;
                const bool up = increase ? a < 0.0 : a > 0.0;
                if (up ? !can_increase(j) : !can_decrease(j)) continue;
                const double ratio = std::max(up ? d_[j] : -d_[j], 0.0) / std::abs(a);
                if (ratio > tmax) continue;
                if (bland) {
                    if (ratio < qratio - 1e-15 || q < 0) {
                        qratio = ratio;
                        q = static_cast<long>(j);
                    }
                } else if (std::abs(a) > qmag) {
                    qmag = std::abs(a);
                    qratio = ratio;
                    q = static_cast<long>(j);
                }
            }
            if (q < 0) return false;
            const auto qc = static_cast<std::size_t>(q);
            column(qc, alpha);
            ftran(alpha);
            const double apq = alpha[p];
            if (std::abs(apq) <= kPivotTol) {
                refactor_or_throw();
                compute_primal();
                compute_duals();
                ++degenerate;
                continue;
            }
            const double target = increase ? lo_[b] : hi_[b];
            const double step = (x_[b] - target) / apq;
            x_[qc] += step;
            for (std::size_t i = 0; i < m_; ++i) {
                const double a = alpha[static_cast<Eigen::Index>(i)];
                if (a != 0.0) x_[basis_[i]] -= a * step;
            }
            x_[b] = target;
            const double theta = d_[qc] / arow[qc];
            for (std::size_t j = 0; j < total_; ++j) {
                if (pos_[j] >= 0 || arow[j] == 0.0) continue;
                d_[j] -= theta * arow[j];
            }
            d_[b] = -theta;
            d_[qc] = 0.0;
            status_[b] = increase ? kAtLower : kAtUpper;
            degenerate = std::abs(theta) > 1e-12 ? 0 : degenerate + 1;
            replace(pr, qc, alpha);
            if (etas_.empty()) compute_duals();
        }
    }

    // Returns false when the objective is unbounded below.
    bool primal_simplex() {
        int degenerate = 0;
        Eigen::VectorXd alpha(static_cast<Eigen::Index>(m_));
        compute_duals();
        for (;;) {
            const bool bland = degenerate >= kDegenerateSwitch;
            long q = -1;
            double dir = 0.0, best = 0.0;
            for (std::size_t j = 0; j < total_; ++j) {
                if (pos_[j] >= 0 || is_fixed(j)) continue;
                double jdir = 0.0;
                if (d_[j] < -dual_tol_ && can_increase(j)) jdir = 1.0;
                if (d_[j] > dual_tol_ && can_decrease(j)) jdir = -1.0;
                if (jdir == 0.0) continue;
                if (bland) {
                    q = static_cast<long>(j);
                    dir = jdir;
                    break;
                }
                if (std::abs(d_[j]) > best) {
                    best = std::abs(d_[j]);
                    q = static_cast<long>(j);
                    dir = jdir;
                }
            }
            if (q < 0) return true;
            count_iteration();
            const auto qc = static_cast<std::size_t>(q);
            column(qc, alpha);
            ftran(alpha);

            double tmax = kInf;
            for (std::size_t i = 0; i < m_; ++i) {
                const double a = alpha[static_cast<Eigen::Index>(i)];
                if (std::abs(a) <= kPivotTol) continue;
                const std::size_t b = basis_[i];
                const double rate = -a * dir;
                if (rate > 0.0 && std::isfinite(hi_[b]))
                    tmax = std::min(tmax, (hi_[b] + tol_at(hi_[b]) - x_[b]) / rate);
                if (rate < 0.0 && std::isfinite(lo_[b]))
                    tmax = std::min(tmax, (lo_[b] - tol_at(lo_[b]) - x_[b]) / rate);
            }
            long leave = -1;
            double mag = 0.0, step = kInf;
            for (std::size_t i = 0; i < m_; ++i) {
                const double a = alpha[static_cast<Eigen::Index>(i)];
                if (std::abs(a) <= kPivotTol) continue;
                const std::size_t b = basis_[i];
                const double rate = -a * dir;
                double t = kInf;
                if (rate > 0.0 && std::isfinite(hi_[b])) t = (hi_[b] - x_[b]) / rate;
                if (rate < 0.0 && std::isfinite(lo_[b])) t = (lo_[b] - x_[b]) / rate;
                if (!std::isfinite(t) || t > tmax) continue;
                const bool take = bland ? (leave < 0 || b < basis_[static_cast<std::size_t>(leave)]) : std::abs(a) > mag;
                if (take) {
                    mag = std::abs(a);
                    leave = static_cast<long>(i);
                    step = std::max(t, 0.0);
                }
            }
            const double range = dir > 0.0 ? hi_[qc] - x_[qc] : x_[qc] - lo_[qc];
            if (std::isfinite(range) && (leave < 0 || range <= step)) {
                apply_step(qc, dir, range, alpha);
                status_[qc] = dir > 0.0 ? kAtUpper : kAtLower;
                x_[qc] = dir > 0.0 ? hi_[qc] : lo_[qc];
                degenerate = range > 1e-12 ? 0 : degenerate + 1;
                continue;
            }
            if (leave < 0) return false;
            apply_step(qc, dir, step, alpha);
            const auto p = static_cast<std::size_t>(leave);
            const std::size_t out = basis_[p];
            const double rate = -alpha[leave] * dir;
            if (rate > 0.0) {
                x_[out] = hi_[out];
                status_[out] = kAtUpper;
            } else {
                x_[out] = lo_[out];
                status_[out] = kAtLower;
            }
            degenerate = step > 1e-12 ? 0 : degenerate + 1;
            replace(p, qc, alpha);
            compute_duals();
        }
    }

    void apply_step(std::size_t q, double dir, double t, const Eigen::VectorXd& alpha) {
        if (t == 0.0) return;
        x_[q] += dir * t;
        for (std::size_t i = 0; i < m_; ++i) {
            const double a = alpha[static_cast<Eigen::Index>(i)];
            if (a != 0.0) x_[basis_[i]] -= a * dir * t;
        }
    }

    const LinearProgram& lp_;
    std::size_t n_ = 0, m_ = 0, total_ = 0;
    std::size_t cap_ = 0, iterations_ = 0;
    double dual_tol_ = kDualTol;
    bool shifted_ = false;
    std::vector<double> lo_, hi_, orig_lo_, orig_hi_, cost_, x_, d_, y_;
    Eigen::VectorXd yv_;
    std::vector<std::uint8_t> status_;
    std::vector<long> pos_;
    std::vector<std::size_t> basis_;
    std::vector<std::size_t> col_start_, row_idx_;
    std::vector<double> val_;
    mutable Eigen::SparseLU<Eigen::SparseMatrix<double>, Eigen::NaturalOrdering<int>> lu_;
    std::vector<Eta> etas_;
};

}  // namespace

Solution solve_lp(const LinearProgram& lp) { return solve_lp(lp, {}); }

Solution solve_lp(const LinearProgram& lp, const std::vector<BoundOverride>& overrides, const Basis* warm) {
    lp.validate();
    Simplex s(lp, overrides);
    return s.run(warm);
}

double dual_objective(const LinearProgram& lp, const Solution& sol) {
    double z = 0.0;
    for (std::size_t i = 0; i < lp.n_constraints(); ++i) z += sol.duals[i] * lp.constraints[i].rhs;
    for (std::size_t j = 0; j < lp.n_vars(); ++j) {
        const double d = sol.reduced_costs[j];
        // Rounding residue on an infinite bound contributes nothing.
        if (d > 0.0 && std::isfinite(lp.lower[j])) z += d * lp.lower[j];
        if (d < 0.0 && std::isfinite(lp.upper[j])) z += d * lp.upper[j];
    }
    return z;
}

namespace {

std::string var_name(const LinearProgram& lp, std::size_t j) {
    return j < lp.names.size() && !lp.names[j].empty() ? lp.names[j] : fmt::format("x{}", j);
}

std::string format_terms(const LinearProgram& lp, const std::vector<std::pair<std::size_t, double>>& terms) {
    std::string out;
    bool first = true;
    for (const auto& [j, c] : terms) {
        if (c == 0.0) continue;
        if (first) {
            out += fmt::format("{} {}", c < 0 ? "-" : "", std::abs(c));
        } else {
            out += fmt::format(" {} {}", c < 0 ? "-" : "+", std::abs(c));
        }
        out += " " + var_name(lp, j);
        first = false;
    }
    return first ? "0 " + var_name(lp, 0) : out;
}

}  // namespace

std::string write_lp_format(const LinearProgram& lp) { return write_lp_format(MixedIntegerProgram{lp, {}}); }

std::string write_lp_format(const MixedIntegerProgram& mip) {
    const auto& lp = mip.lp;
    std::string out = "Minimize\n obj: ";
    std::vector<std::pair<std::size_t, double>> obj;
    for (std::size_t j = 0; j < lp.n_vars(); ++j) obj.emplace_back(j, lp.objective[j]);
    out += format_terms(lp, obj) + "\nSubject To\n";
    for (std::size_t i = 0; i < lp.n_constraints(); ++i) {
        const auto& c = lp.constraints[i];
        std::vector<std::pair<std::size_t, double>> terms;
        for (const auto& t : c.coeffs) terms.emplace_back(t.var, t.coeff);
        const char* rel = c.relation == Relation::LessEqual ? "<=" : c.relation == Relation::Equal ? "=" : ">=";
        const auto label = c.name.empty() ? fmt::format("c{}", i) : c.name;
        out += fmt::format(" {}: {} {} {}\n", label, format_terms(lp, terms), rel, c.rhs);
    }
    out += "Bounds\n";
    for (std::size_t j = 0; j < lp.n_vars(); ++j) {
        const double lo = lp.lower[j], hi = lp.upper[j];
        if (!std::isfinite(lo) && !std::isfinite(hi)) {
            out += fmt::format(" {} free\n", var_name(lp, j));
        } else {
            out += fmt::format(" {} <= {} <= {}\n", std::isfinite(lo) ? fmt::format("{}", lo) : "-inf", var_name(lp, j),
                               std::isfinite(hi) ? fmt::format("{}", hi) : "+inf");
        }
    }
    if (!mip.binary_vars.empty()) {
        out += "Binaries\n";
        for (std::size_t b : mip.binary_vars) out += " " + var_name(lp, b) + "\n";
    }
    out += "End\n";
    return out;
}

}  // namespace gridsched::lp
