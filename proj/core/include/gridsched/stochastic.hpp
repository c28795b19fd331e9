#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "gridsched/grid.hpp"
#include "gridsched/random.hpp"

namespace gridsched {

inline constexpr int kHoursPerDay = 24;
inline constexpr int kDaysPerYear = 365;

/// Calendar helpers over a non-leap year. Months are 1..12, days 1..365.
int days_in_month(int month);
int first_day_of_month(int month);
int month_of_day(int day_of_year);

/// Monthly wind and demand intensity. In the noiseless limit it equals the
/// monthly profile pair, and forecast means scale linearly with it.
struct SeasonalFactor {
    double wind_level = 0.0;
    double load_level = 0.0;
    bool operator==(const SeasonalFactor&) const = default;
};

struct DayAheadForecast {
    Eigen::MatrixXd wind;  // n_wind x 24, MW
    Eigen::MatrixXd load;  // n_bus  x 24, MW
    int hours() const { return static_cast<int>(load.cols()); }
};

struct HourlyRealization {
    Eigen::VectorXd wind;        // n_wind, MW
    Eigen::VectorXd load;        // n_bus, MW
    Eigen::VectorXd wind_delta;  // accumulated forecast error
    Eigen::VectorXd load_delta;

    /// Zero-error state preceding the first hour of a walk.
    static HourlyRealization start(const GridCase& grid);
};

struct ProcessParams {
    double p_w_sigma = 0.15;
    double p_d_sigma = 0.02;
    double wind_walk_noise_frac = 0.005;
    double load_walk_noise_frac = 0.001;
    std::array<double, 12> monthly_wind_profile{};
    std::array<double, 12> monthly_load_profile{};
    Eigen::MatrixXd daily_wind_profile_mw;  // n_wind x 24
    Eigen::MatrixXd daily_load_profile_mw;  // n_bus x 24
    double seasonal_ar_coeff = 0.5;
    double seasonal_noise_sd = 0.03;
    /// Per-line per-hour forced outage probability during assessment.
    double forced_outage_rate = 0.0;

    /// Built-in hourly/monthly shapes scaled by the case's peaks and capacities.
    static ProcessParams defaults_for(const GridCase& grid);

    /// Throws ValidationError when a field is out of range or mis-sized.
    void validate(const GridCase& grid) const;
};

/// Normalized 24-hour demand shape for a bus's `load_profile_id`.
std::array<double, 24> builtin_load_shape(int profile_id);
std::array<double, 24> builtin_wind_shape();
std::array<double, 12> builtin_monthly_load_profile();
std::array<double, 12> builtin_monthly_wind_profile();

/// Noise-free seasonal factor of a month.
SeasonalFactor seasonal_mean(int month, const ProcessParams& params);

/// AR(1) draw around the monthly profile, truncated at zero.
SeasonalFactor seasonal_step(const SeasonalFactor& prev, int month, const ProcessParams& params, Rng& rng);

/// Day-ahead forecast: independent clamped normals around
/// daily_profile(h) * seasonal level, with sd = p_sigma * mean.
DayAheadForecast sample_day_ahead(const GridCase& grid, int day_of_year, const SeasonalFactor& season,
                                  const ProcessParams& params, Rng& rng);

struct Bounds {
    double lo = 0.0;
    double hi = 0.0;
};

struct WalkStep {
    Eigen::VectorXd value;
    Eigen::VectorXd delta;
};

/// One biased-random-walk step: delta' = delta + N(0, noise_sd), value =
/// clamp(forecast + delta'). Elements with zero noise consume no draws.
WalkStep step_walk(const Eigen::VectorXd& forecast, const Eigen::VectorXd& prev_delta,
                   const Eigen::VectorXd& noise_sd, std::span<const Bounds> bounds, Rng& rng);

/// Advances wind and load realizations to `hour` of the forecast day. Noise
/// sd is the walk fraction times the forecast at hour 0 of the day.
HourlyRealization step_hourly(const GridCase& grid, const DayAheadForecast& forecast, int hour,
                              const HourlyRealization& prev, const ProcessParams& params, Rng& rng);

/// Listed lines (positions) drop out independently with probability 1/2.
Topology sample_training_topology(const GridCase& grid, std::span<const std::size_t> outage_lines, Rng& rng);

/// Applies independent per-line forced outages to an existing topology.
/// A zero rate returns `base` untouched without consuming draws.
Topology sample_forced_outages(const Topology& base, double rate, Rng& rng);

}  // namespace gridsched
