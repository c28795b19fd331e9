#pragma once

#include <string>
#include <vector>

#include "gridsched/stochastic.hpp"

namespace gridsched {

struct SamplerParams {
    int w_s = 3;    // days per short-term window
    int n_s = 4;    // windows per month
    int w_rt = 24;  // hours per real-time window
    int n_rt = 2;   // real-time windows per day
    int months = 12;

    void validate() const;
};

struct HourWindow {
    int start_hour = 0;
    std::vector<HourlyRealization> hours;  // w_rt consecutive hours
};

struct SampledDay {
    int day_of_year = 0;
    DayAheadForecast forecast;
    std::vector<HourWindow> hour_windows;  // n_rt replicas
};

struct DayWindow {
    int start_day = 0;  // day of year
    std::vector<SampledDay> days;  // w_s consecutive days
};

struct MonthSample {
    int month = 0;
    SeasonalFactor season;
    std::vector<DayWindow> windows;  // n_s, ordered by start day
};

struct ScenarioSample {
    std::vector<MonthSample> months;

    std::size_t simulated_days() const;
    std::size_t simulated_hours() const;
};

/// Hierarchical draw: seasonal chain, then day windows per month, then hour
/// windows per day. The walk restarts from zero error at each hour window.
ScenarioSample sample_scenario(const GridCase& grid, const SamplerParams& params, const ProcessParams& process,
                               Rng& rng, int workers = 1);

/// Day-window start days (day of year) for one month: n_s non-overlapping
/// runs of w_s days placed uniformly at random, sorted ascending.
std::vector<int> sample_window_starts(int month, int w_s, int n_s, Rng& rng);

/// Factor that scales a month's summed window costs to a monthly total.
double scenario_weight(const SamplerParams& params, int month);

/// Factor that scales the summed hour-window costs of a day to a daily total.
double hour_weight(const SamplerParams& params);

/// Structured dump for replay and debugging.
std::string dump_scenario(const ScenarioSample& sample);

}  // namespace gridsched
