#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "gridsched/errors.hpp"
#include "gridsched/random.hpp"
#include "gridsched/reliability.hpp"

namespace gridsched::ce {

struct OutageRequirement {
    int line_id = 0;
    int count = 1;
    std::vector<int> allowed_months;  // ascending, within 1..12

    void validate() const;
};

using Row = std::array<std::uint8_t, 12>;

/// |L| x 12 assignment matrix; row order follows the requirement list.
struct OutageSchedule {
    std::vector<int> line_ids;
    std::vector<Row> rows;

    bool out_in(std::size_t row, int month) const { return rows[row][static_cast<std::size_t>(month - 1)] != 0; }
    /// Line ids on outage during a month.
    std::vector<int> lines_out(int month) const;
    /// Compact text key ("line:month,month;...") for caches and logs.
    std::string key() const;
    bool operator==(const OutageSchedule&) const = default;
};

/// Schedule with no outages at all.
OutageSchedule empty_schedule(const std::vector<OutageRequirement>& reqs);

/// True when every row has exactly its required count inside its allowed months.
bool is_feasible(const OutageSchedule& s, const std::vector<OutageRequirement>& reqs);

struct CeDistribution {
    std::vector<std::array<double, 12>> p;

    static CeDistribution initial(const std::vector<OutageRequirement>& reqs);
};

/// Month combinations of `count` elements from `allowed`, lexicographic.
std::vector<std::vector<int>> month_combinations(const std::vector<int>& allowed, int count);

/// Draws one combination per row with probability proportional to the
/// product of its entries. Rows whose weights are all zero fall back to a
/// uniform draw; their indices are appended to `degenerate_rows` if given.
OutageSchedule sample_schedule(const CeDistribution& dist, const std::vector<OutageRequirement>& reqs, Rng& rng,
                               std::vector<std::size_t>* degenerate_rows = nullptr);

struct BarrierParams {
    double kappa = 0.0;
    double lambda = 0.0;

    /// kappa = 10 * max(1, |cost_scale|), lambda = 100 * kappa.
    static BarrierParams from_scale(double cost_scale);
    double operator()(double violation) const { return kappa * violation + lambda * violation * violation; }
};

double penalized_cost(const ScheduleMetrics& metrics, const ChanceThresholds& thr, const BarrierParams& barrier);

std::size_t elite_size(std::size_t n, double rho);

/// Elite = the ceil(rho*N) cheapest samples (ties by sample index); the new
/// distribution is their mean, blended with the old one by `smoothing`
/// (1 = raw elite mean).
CeDistribution update_distribution(const CeDistribution& dist, const std::vector<OutageSchedule>& samples,
                                   const std::vector<double>& costs, double rho, double smoothing = 1.0);

/// Sum of binary entropies of all entries, in nats.
double entropy(const CeDistribution& dist);

/// Per-row most likely combination.
OutageSchedule argmax_schedule(const CeDistribution& dist, const std::vector<OutageRequirement>& reqs);

struct CeParams {
    std::size_t n_samples = 75;
    double rho = 0.15;
    std::optional<double> eps_entropy;  // default 0.01 * |L|
    std::size_t max_iters = 50;
    double smoothing = 1.0;
    std::optional<double> kappa;  // barrier slope; default from the first iteration's mean cost
    int workers = 1;

    void validate() const;
};

struct Quartiles {
    double q1 = 0.0, median = 0.0, q3 = 0.0;
};

Quartiles quartiles(std::vector<double> values);

struct TraceRow {
    std::size_t iteration = 0;
    Quartiles cost, reliability, shed;  // over the elite set; shed as fraction of capacity
    double entropy = 0.0;
    double best_cost = 0.0;       // best penalized cost this iteration
    double best_ever_cost = 0.0;  // best penalized cost so far
    std::string best_ever;        // schedule key
    std::size_t degenerate_rows = 0;
};

struct CeResult {
    OutageSchedule schedule;
    OutageSchedule best_ever;
    double best_ever_cost = 0.0;
    std::vector<TraceRow> trace;
    std::vector<CeDistribution> p_history;  // distribution after each iteration, p_history[0] = initial
    BarrierParams barrier;
    bool converged = false;
};

class MaxIterationsError : public Error {
public:
    explicit MaxIterationsError(CeResult partial);
    const CeResult& partial() const noexcept { return partial_; }

private:
    CeResult partial_;
};

/// Assessment of one candidate at an iteration. Candidates in the same
/// iteration must be assessed on the same scenarios.
using AssessFn = std::function<ScheduleMetrics(const OutageSchedule&, std::size_t iteration)>;

CeResult optimize(const std::vector<OutageRequirement>& reqs, const ChanceThresholds& thr, const CeParams& params,
                  const AssessFn& assess, Rng& rng);

}  // namespace gridsched::ce
