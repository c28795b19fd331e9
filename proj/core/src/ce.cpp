#include "gridsched/ce.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/format.h>

#include "gridsched/parallel.hpp"

namespace gridsched::ce {

void OutageRequirement::validate() const {
    const auto path = fmt::format("outage_requirements[line {}]", line_id);
    if (count < 1 || count > 2) throw ValidationError(path + ".count", "must be 1 or 2");
    if (allowed_months.empty()) throw ValidationError(path + ".allowed_months", "must be non-empty");
    for (std::size_t i = 0; i < allowed_months.size(); ++i) {
        const int m = allowed_months[i];
        if (m < 1 || m > 12) throw ValidationError(path + ".allowed_months", fmt::format("month {} outside 1..12", m));
        if (i > 0 && m <= allowed_months[i - 1])
            throw ValidationError(path + ".allowed_months", "months must be strictly increasing");
    }
    if (static_cast<std::size_t>(count) > allowed_months.size())
        throw ValidationError(path + ".count", "exceeds the number of allowed months");
}

std::vector<int> OutageSchedule::lines_out(int month) const {
    std::vector<int> out;
    for (std::size_t l = 0; l < rows.size(); ++l)
        if (out_in(l, month)) out.push_back(line_ids[l]);
    return out;
}

std::string OutageSchedule::key() const {
    std::string k;
    for (std::size_t l = 0; l < rows.size(); ++l) {
        if (l > 0) k += ';';
        k += fmt::format("{}:", line_ids[l]);
        bool first = true;
        for (int m = 1; m <= 12; ++m) {
            if (!out_in(l, m)) continue;
            if (!first) k += ',';
            k += std::to_string(m);
            first = false;
        }
    }
    return k;
}

OutageSchedule empty_schedule(const std::vector<OutageRequirement>& reqs) {
    OutageSchedule s;
    for (const auto& r : reqs) {
        s.line_ids.push_back(r.line_id);
        s.rows.push_back(Row{});
    }
    return s;
}

bool is_feasible(const OutageSchedule& s, const std::vector<OutageRequirement>& reqs) {
    if (s.rows.size() != reqs.size()) return false;
    for (std::size_t l = 0; l < reqs.size(); ++l) {
        if (s.line_ids[l] != reqs[l].line_id) return false;
        int n = 0;
        for (int m = 1; m <= 12; ++m) {
            if (!s.out_in(l, m)) continue;
            ++n;
            const auto& allowed = reqs[l].allowed_months;
            if (!std::binary_search(allowed.begin(), allowed.end(), m)) return false;
        }
        if (n != reqs[l].count) return false;
    }
    return true;
}

CeDistribution CeDistribution::initial(const std::vector<OutageRequirement>& reqs) {
    CeDistribution d;
    std::array<double, 12> half;
    half.fill(0.5);
    d.p.assign(reqs.size(), half);
    return d;
}

std::vector<std::vector<int>> month_combinations(const std::vector<int>& allowed, int count) {
    std::vector<std::vector<int>> out;
    const auto n = allowed.size();
    const auto k = static_cast<std::size_t>(std::max(count, 0));
    if (k == 0 || k > n) return out;
    // Lexicographic index combinations.
    std::vector<std::size_t> idx(k);
    for (std::size_t i = 0; i < k; ++i) idx[i] = i;
    while (true) {
        std::vector<int> combo;
        for (auto i : idx) combo.push_back(allowed[i]);
        out.push_back(std::move(combo));
        std::size_t pos = k;
        while (pos > 0 && idx[pos - 1] == n - k + pos - 1) --pos;
        if (pos == 0) break;
        ++idx[pos - 1];
        for (std::size_t i = pos; i < k; ++i) idx[i] = idx[i - 1] + 1;
    }
    return out;
}

namespace {

double combo_weight(const std::array<double, 12>& p, const std::vector<int>& combo) {
    double w = 1.0;
    for (int m : combo) w *= p[static_cast<std::size_t>(m - 1)];
    return w;
}

}  // namespace

OutageSchedule sample_schedule(const CeDistribution& dist, const std::vector<OutageRequirement>& reqs, Rng& rng,
                               std::vector<std::size_t>* degenerate_rows) {
    if (dist.p.size() != reqs.size()) throw ValidationError("distribution", "row count differs from requirements");
    OutageSchedule s = empty_schedule(reqs);
    for (std::size_t l = 0; l < reqs.size(); ++l) {
        const auto combos = month_combinations(reqs[l].allowed_months, reqs[l].count);
        std::vector<double> w;
        double total = 0.0;
        for (const auto& c : combos) {
            w.push_back(combo_weight(dist.p[l], c));
            total += w.back();
        }
        if (!(total > 0.0)) {
            if (degenerate_rows) degenerate_rows->push_back(l);
            std::fill(w.begin(), w.end(), 1.0);
            total = static_cast<double>(w.size());
        }
        const double u = uniform01(rng) * total;
        std::size_t pick = combos.size() - 1;
        double acc = 0.0;
        for (std::size_t k = 0; k < combos.size(); ++k) {
            acc += w[k];
            if (u < acc && w[k] > 0.0) {
                pick = k;
                break;
            }
        }
        while (w[pick] <= 0.0 && pick > 0) --pick;
        for (int m : combos[pick]) s.rows[l][static_cast<std::size_t>(m - 1)] = 1;
    }
    return s;
}

BarrierParams BarrierParams::from_scale(double cost_scale) {
    BarrierParams b;
    b.kappa = 10.0 * std::max(1.0, std::abs(cost_scale));
    b.lambda = 100.0 * b.kappa;
    return b;
}

double penalized_cost(const ScheduleMetrics& metrics, const ChanceThresholds& thr, const BarrierParams& barrier) {
    const double vr = std::max(0.0, (1.0 - thr.alpha_r) - metrics.p_reliability_ok);
    const double vs = std::max(0.0, (1.0 - thr.alpha_shed) - metrics.p_shed_ok);
    return metrics.expected_cost + barrier(vr) + barrier(vs);
}

std::size_t elite_size(std::size_t n, double rho) {
    const auto k = static_cast<std::size_t>(std::ceil(rho * static_cast<double>(n) - 1e-9));
    return std::clamp<std::size_t>(k, 1, n);
}

namespace {

std::vector<std::size_t> elite_indices(const std::vector<double>& costs, double rho) {
    std::vector<std::size_t> order(costs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });
    order.resize(elite_size(costs.size(), rho));
    return order;
}

}  // namespace

CeDistribution update_distribution(const CeDistribution& dist, const std::vector<OutageSchedule>& samples,
                                   const std::vector<double>& costs, double rho, double smoothing) {
    if (samples.size() != costs.size() || samples.empty())
        throw ValidationError("samples", "need one cost per sample and at least one sample");
    const auto elite = elite_indices(costs, rho);
    CeDistribution next = dist;
    for (std::size_t l = 0; l < dist.p.size(); ++l) {
        for (std::size_t m = 0; m < 12; ++m) {
            double sum = 0.0;
            for (std::size_t e : elite) sum += samples[e].rows[l][m];
            const double mean = sum / static_cast<double>(elite.size());
            next.p[l][m] = smoothing == 1.0 ? mean : smoothing * mean + (1.0 - smoothing) * dist.p[l][m];
        }
    }
    return next;
}

double entropy(const CeDistribution& dist) {
    double h = 0.0;
    for (const auto& row : dist.p) {
        for (double p : row) {
            if (p > 0.0) h -= p * std::log(p);
            if (p < 1.0) h -= (1.0 - p) * std::log(1.0 - p);
        }
    }
    return h;
}

OutageSchedule argmax_schedule(const CeDistribution& dist, const std::vector<OutageRequirement>& reqs) {
    OutageSchedule s = empty_schedule(reqs);
    for (std::size_t l = 0; l < reqs.size(); ++l) {
        const auto combos = month_combinations(reqs[l].allowed_months, reqs[l].count);
        std::size_t best = 0;
        double best_w = -1.0;
        for (std::size_t k = 0; k < combos.size(); ++k) {
            const double w = combo_weight(dist.p[l], combos[k]);
            if (w > best_w) {
                best_w = w;
                best = k;
            }
        }
        for (int m : combos[best]) s.rows[l][static_cast<std::size_t>(m - 1)] = 1;
    }
    return s;
}

void CeParams::validate() const {
    if (n_samples < 1) throw ValidationError("ce.n_samples", "must be positive");
    if (!(rho > 0.0 && rho <= 1.0)) throw ValidationError("ce.rho", "must lie in (0,1]");
    if (max_iters < 1) throw ValidationError("ce.max_iters", "must be positive");
    if (!(smoothing > 0.0 && smoothing <= 1.0)) throw ValidationError("ce.smoothing", "must lie in (0,1]");
    if (eps_entropy && !(*eps_entropy > 0.0)) throw ValidationError("ce.eps_entropy", "must be positive");
    if (kappa && !(*kappa >= 0.0)) throw ValidationError("ce.kappa", "must be non-negative");
    if (workers < 1) throw ValidationError("ce.workers", "must be at least 1");
}

Quartiles quartiles(std::vector<double> v) {
    Quartiles q;
    if (v.empty()) return q;
    std::sort(v.begin(), v.end());
    auto at = [&](double frac) {
        const double pos = frac * static_cast<double>(v.size() - 1);
        const auto lo = static_cast<std::size_t>(std::floor(pos));
        const auto hi = std::min(lo + 1, v.size() - 1);
        return v[lo] + (pos - static_cast<double>(lo)) * (v[hi] - v[lo]);
    };
    q.q1 = at(0.25);
    q.median = at(0.5);
    q.q3 = at(0.75);
    return q;
}

MaxIterationsError::MaxIterationsError(CeResult partial)
    : Error(fmt::format("cross-entropy search did not converge within {} iterations", partial.trace.size())),
      partial_(std::move(partial)) {}

CeResult optimize(const std::vector<OutageRequirement>& reqs, const ChanceThresholds& thr, const CeParams& params,
                  const AssessFn& assess, Rng& rng) {
    params.validate();
    thr.validate();
    if (reqs.empty()) throw ValidationError("outage_requirements", "must be non-empty");
    for (const auto& r : reqs) r.validate();
    const double eps = params.eps_entropy.value_or(0.01 * static_cast<double>(reqs.size()));

    CeResult result;
    CeDistribution dist = CeDistribution::initial(reqs);
    result.p_history.push_back(dist);
    bool barrier_set = params.kappa.has_value();
    if (barrier_set) result.barrier = BarrierParams{*params.kappa, 100.0 * *params.kappa};
    result.best_ever_cost = std::numeric_limits<double>::infinity();

    for (std::size_t it = 0; it < params.max_iters; ++it) {
        std::vector<OutageSchedule> samples;
        std::vector<std::size_t> degenerate;
        for (std::size_t k = 0; k < params.n_samples; ++k) samples.push_back(sample_schedule(dist, reqs, rng, &degenerate));
        std::vector<ScheduleMetrics> metrics(samples.size());
        parallel_for(samples.size(), params.workers, [&](std::size_t k) { metrics[k] = assess(samples[k], it); });
        if (!barrier_set) {
            double mean = 0.0;
            for (const auto& m : metrics) mean += m.expected_cost;
            mean /= static_cast<double>(metrics.size());
            result.barrier = BarrierParams::from_scale(mean);
            barrier_set = true;
        }
        std::vector<double> costs;
        for (const auto& m : metrics) costs.push_back(penalized_cost(m, thr, result.barrier));

        const auto elite = elite_indices(costs, params.rho);
        TraceRow row;
        row.iteration = it;
        row.degenerate_rows = degenerate.size();
        std::vector<double> ec, er, es;
        for (std::size_t e : elite) {
            ec.push_back(costs[e]);
            er.push_back(metrics[e].mean_reliability());
            es.push_back(metrics[e].mean_shed_frac());
        }
        row.cost = quartiles(ec);
        row.reliability = quartiles(er);
        row.shed = quartiles(es);
        row.best_cost = costs[elite.front()];
        if (row.best_cost < result.best_ever_cost) {
            result.best_ever_cost = row.best_cost;
            result.best_ever = samples[elite.front()];
        }
        row.best_ever_cost = result.best_ever_cost;
        row.best_ever = result.best_ever.key();

        dist = update_distribution(dist, samples, costs, params.rho, params.smoothing);
        result.p_history.push_back(dist);
        row.entropy = entropy(dist);
        result.trace.push_back(row);
        if (row.entropy < eps) {
            result.converged = true;
            result.schedule = argmax_schedule(dist, reqs);
            return result;
        }
    }
    result.schedule = argmax_schedule(dist, reqs);
    throw MaxIterationsError(std::move(result));
}

}  // namespace gridsched::ce
