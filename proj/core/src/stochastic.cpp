#include "gridsched/stochastic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <fmt/format.h>

#include "gridsched/errors.hpp"

namespace gridsched {

namespace {

constexpr std::array<int, 12> kMonthDays{31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};

// Hourly demand as a fraction of daily peak: IEEE RTS-79 winter weekday and
// summer weekday shapes.
constexpr std::array<double, 24> kWinterWeekday{0.67, 0.63, 0.60, 0.59, 0.59, 0.60, 0.74, 0.86,
                                                0.95, 0.96, 0.96, 0.95, 0.95, 0.95, 0.93, 0.94,
                                                0.99, 1.00, 1.00, 0.96, 0.91, 0.83, 0.73, 0.63};
constexpr std::array<double, 24> kSummerWeekday{0.64, 0.60, 0.58, 0.56, 0.56, 0.58, 0.64, 0.76,
                                                0.87, 0.95, 0.99, 1.00, 0.99, 1.00, 1.00, 0.97,
                                                0.96, 0.96, 0.93, 0.92, 0.92, 0.93, 0.87, 0.72};
// Mean wind output as a fraction of capacity in the windiest month; stronger
// overnight, weakest early afternoon.
constexpr std::array<double, 24> kWindDaily{0.62, 0.64, 0.65, 0.66, 0.66, 0.65, 0.62, 0.57,
                                            0.52, 0.48, 0.45, 0.43, 0.42, 0.42, 0.43, 0.45,
                                            0.48, 0.52, 0.55, 0.57, 0.59, 0.60, 0.61, 0.62};
// Monthly means of the RTS-79 weekly peak-load table, relative to the annual peak.
constexpr std::array<double, 12> kMonthlyLoad{0.8685, 0.8398, 0.7246, 0.7560, 0.8508, 0.8860,
                                              0.8130, 0.7506, 0.7260, 0.7528, 0.9010, 0.9515};
// Monthly wind relative to the windiest month (spring peak, late-summer lull).
constexpr std::array<double, 12> kMonthlyWind{0.93, 0.96, 1.00, 0.98, 0.86, 0.74,
                                              0.63, 0.60, 0.69, 0.80, 0.89, 0.92};

double clamp(double v, double lo, double hi) { return std::min(std::max(v, lo), hi); }

void check_month(int month) {
    if (month < 1 || month > 12) throw ValidationError("month", fmt::format("{} is outside 1..12", month));
}

}  // namespace

int days_in_month(int month) {
    check_month(month);
    return kMonthDays[static_cast<std::size_t>(month - 1)];
}

int first_day_of_month(int month) {
    check_month(month);
    int day = 1;
    for (int m = 1; m < month; ++m) day += kMonthDays[static_cast<std::size_t>(m - 1)];
    return day;
}

int month_of_day(int day_of_year) {
    if (day_of_year < 1 || day_of_year > kDaysPerYear)
        throw ValidationError("day_of_year", fmt::format("{} is outside 1..365", day_of_year));
    int month = 1;
    int remaining = day_of_year;
    while (remaining > kMonthDays[static_cast<std::size_t>(month - 1)]) {
        remaining -= kMonthDays[static_cast<std::size_t>(month - 1)];
        ++month;
    }
    return month;
}

HourlyRealization HourlyRealization::start(const GridCase& grid) {
    HourlyRealization r;
    r.wind = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.n_wind()));
    r.load = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(grid.n_buses()));
    r.wind_delta = r.wind;
    r.load_delta = r.load;
    return r;
}

std::array<double, 24> builtin_load_shape(int profile_id) {
    return profile_id == 1 ? kSummerWeekday : kWinterWeekday;
}
std::array<double, 24> builtin_wind_shape() { return kWindDaily; }
std::array<double, 12> builtin_monthly_load_profile() { return kMonthlyLoad; }
std::array<double, 12> builtin_monthly_wind_profile() { return kMonthlyWind; }

ProcessParams ProcessParams::defaults_for(const GridCase& grid) {
    ProcessParams p;
    p.monthly_load_profile = kMonthlyLoad;
    p.monthly_wind_profile = kMonthlyWind;
    const auto nb = static_cast<Eigen::Index>(grid.n_buses());
    const auto nw = static_cast<Eigen::Index>(grid.n_wind());
    p.daily_load_profile_mw.resize(nb, kHoursPerDay);
    for (Eigen::Index b = 0; b < nb; ++b) {
        const auto& bus = grid.buses[static_cast<std::size_t>(b)];
        const auto shape = builtin_load_shape(bus.load_profile_id);
        for (int h = 0; h < kHoursPerDay; ++h) p.daily_load_profile_mw(b, h) = bus.peak_load_mw * shape[h];
    }
    p.daily_wind_profile_mw.resize(nw, kHoursPerDay);
    for (Eigen::Index w = 0; w < nw; ++w) {
        const double cap = grid.wind_generators[static_cast<std::size_t>(w)].capacity_mw;
        for (int h = 0; h < kHoursPerDay; ++h) p.daily_wind_profile_mw(w, h) = cap * kWindDaily[h];
    }
    return p;
}

void ProcessParams::validate(const GridCase& grid) const {
    auto fraction = [](double v, const char* name) {
        if (!(v >= 0.0 && v <= 1.0)) throw ValidationError(fmt::format("process.{}", name), "must lie in [0,1]");
    };
    fraction(p_w_sigma, "p_w_sigma");
    fraction(p_d_sigma, "p_d_sigma");
    fraction(wind_walk_noise_frac, "wind_walk_noise_frac");
    fraction(load_walk_noise_frac, "load_walk_noise_frac");
    fraction(forced_outage_rate, "forced_outage_rate");
    for (std::size_t m = 0; m < 12; ++m) {
        if (!(monthly_wind_profile[m] >= 0.0 && monthly_wind_profile[m] <= 1.0))
            throw ValidationError(fmt::format("process.monthly_wind_profile[{}]", m), "must lie in [0,1]");
        if (!(monthly_load_profile[m] >= 0.0 && monthly_load_profile[m] <= 1.0))
            throw ValidationError(fmt::format("process.monthly_load_profile[{}]", m), "must lie in [0,1]");
    }
    if (daily_wind_profile_mw.rows() != static_cast<Eigen::Index>(grid.n_wind()) ||
        daily_wind_profile_mw.cols() != kHoursPerDay)
        throw ValidationError("process.daily_wind_profile_MW", "must be n_wind x 24");
    if (daily_load_profile_mw.rows() != static_cast<Eigen::Index>(grid.n_buses()) ||
        daily_load_profile_mw.cols() != kHoursPerDay)
        throw ValidationError("process.daily_load_profile_MW", "must be n_bus x 24");
    if ((daily_wind_profile_mw.array() < 0.0).any() || (daily_load_profile_mw.array() < 0.0).any())
        throw ValidationError("process.daily_profile", "profiles must be non-negative");
    if (!(seasonal_ar_coeff >= 0.0 && seasonal_ar_coeff < 1.0))
        throw ValidationError("process.seasonal_ar_coeff", "must lie in [0,1)");
    if (!(seasonal_noise_sd >= 0.0)) throw ValidationError("process.seasonal_noise_sd", "must be non-negative");
}

SeasonalFactor seasonal_mean(int month, const ProcessParams& params) {
    check_month(month);
    const auto m = static_cast<std::size_t>(month - 1);
    return {params.monthly_wind_profile[m], params.monthly_load_profile[m]};
}

SeasonalFactor seasonal_step(const SeasonalFactor& prev, int month, const ProcessParams& params, Rng& rng) {
    const int prev_month = month == 1 ? 12 : month - 1;
    const auto mean = seasonal_mean(month, params);
    const auto prev_mean = seasonal_mean(prev_month, params);
    SeasonalFactor next;
    double wind_noise = 0.0;
    double load_noise = 0.0;
    if (params.seasonal_noise_sd > 0.0) {
        wind_noise = params.seasonal_noise_sd * standard_normal(rng);
        load_noise = params.seasonal_noise_sd * standard_normal(rng);
    }
    next.wind_level =
        std::max(0.0, mean.wind_level + params.seasonal_ar_coeff * (prev.wind_level - prev_mean.wind_level) + wind_noise);
    next.load_level =
        std::max(0.0, mean.load_level + params.seasonal_ar_coeff * (prev.load_level - prev_mean.load_level) + load_noise);
    return next;
}

DayAheadForecast sample_day_ahead(const GridCase& grid, int day_of_year, const SeasonalFactor& season,
                                  const ProcessParams& params, Rng& rng) {
    (void)month_of_day(day_of_year);  // range check
    const auto nw = static_cast<Eigen::Index>(grid.n_wind());
    const auto nb = static_cast<Eigen::Index>(grid.n_buses());
    DayAheadForecast f;
    f.wind.resize(nw, kHoursPerDay);
    f.load.resize(nb, kHoursPerDay);
    for (Eigen::Index w = 0; w < nw; ++w) {
        const double cap = grid.wind_generators[static_cast<std::size_t>(w)].capacity_mw;
        for (int h = 0; h < kHoursPerDay; ++h) {
            const double mean = params.daily_wind_profile_mw(w, h) * season.wind_level;
            const double sd = params.p_w_sigma * mean;
            const double draw = sd > 0.0 ? mean + sd * standard_normal(rng) : mean;
            f.wind(w, h) = clamp(draw, 0.0, cap);
        }
    }
    for (Eigen::Index b = 0; b < nb; ++b) {
        for (int h = 0; h < kHoursPerDay; ++h) {
            const double mean = params.daily_load_profile_mw(b, h) * season.load_level;
            const double sd = params.p_d_sigma * mean;
            const double draw = sd > 0.0 ? mean + sd * standard_normal(rng) : mean;
            f.load(b, h) = std::max(0.0, draw);
        }
    }
    return f;
}

WalkStep step_walk(const Eigen::VectorXd& forecast, const Eigen::VectorXd& prev_delta,
                   const Eigen::VectorXd& noise_sd, std::span<const Bounds> bounds, Rng& rng) {
    if (prev_delta.size() != forecast.size() || noise_sd.size() != forecast.size() ||
        bounds.size() != static_cast<std::size_t>(forecast.size()))
        throw ValidationError("step_walk", "dimension mismatch");
    WalkStep out;
    out.delta = prev_delta;
    out.value.resize(forecast.size());
    for (Eigen::Index i = 0; i < forecast.size(); ++i) {
        if (noise_sd(i) > 0.0) out.delta(i) += noise_sd(i) * standard_normal(rng);
        const auto& b = bounds[static_cast<std::size_t>(i)];
        out.value(i) = clamp(forecast(i) + out.delta(i), b.lo, b.hi);
    }
    return out;
}

HourlyRealization step_hourly(const GridCase& grid, const DayAheadForecast& forecast, int hour,
                              const HourlyRealization& prev, const ProcessParams& params, Rng& rng) {
    if (hour < 0 || hour >= forecast.hours()) throw ValidationError("hour", fmt::format("{} outside the day", hour));
    const auto nw = static_cast<std::size_t>(grid.n_wind());
    const auto nb = static_cast<std::size_t>(grid.n_buses());
    std::vector<Bounds> wind_bounds(nw);
    for (std::size_t w = 0; w < nw; ++w) wind_bounds[w] = {0.0, grid.wind_generators[w].capacity_mw};
    std::vector<Bounds> load_bounds(nb, Bounds{0.0, std::numeric_limits<double>::infinity()});

    const Eigen::VectorXd wind_sd = params.wind_walk_noise_frac * forecast.wind.col(0);
    const Eigen::VectorXd load_sd = params.load_walk_noise_frac * forecast.load.col(0);
    auto wind = step_walk(forecast.wind.col(hour), prev.wind_delta, wind_sd, wind_bounds, rng);
    auto load = step_walk(forecast.load.col(hour), prev.load_delta, load_sd, load_bounds, rng);
    HourlyRealization r;
    r.wind = std::move(wind.value);
    r.wind_delta = std::move(wind.delta);
    r.load = std::move(load.value);
    r.load_delta = std::move(load.delta);
    return r;
}

Topology sample_training_topology(const GridCase& grid, std::span<const std::size_t> outage_lines, Rng& rng) {
    if (outage_lines.empty()) throw ValidationError("outage_lines", "must be non-empty");
    Topology top = Topology::all_in_service(grid);
    std::bernoulli_distribution coin(0.5);
    for (std::size_t line : outage_lines) {
        if (line >= grid.n_lines()) throw ValidationError("outage_lines", fmt::format("line position {} out of range", line));
        top.line_status[line] = !coin(rng);
    }
    return top;
}

Topology sample_forced_outages(const Topology& base, double rate, Rng& rng) {
    if (rate <= 0.0) return base;
    Topology top = base;
    std::bernoulli_distribution fail(rate);
    for (std::size_t l = 0; l < top.size(); ++l) {
        if (top.line_status[l] && fail(rng)) top.line_status[l] = false;
    }
    return top;
}

}  // namespace gridsched
