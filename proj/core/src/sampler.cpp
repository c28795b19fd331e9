#include "gridsched/sampler.hpp"

#include <algorithm>
#include <numeric>

#include <fmt/format.h>

#include "gridsched/errors.hpp"
#include "gridsched/parallel.hpp"
#include "json_util.hpp"

namespace gridsched {

void SamplerParams::validate() const {
    if (w_s < 1) throw ValidationError("sampler.w_s", "must be positive");
    if (n_s < 1) throw ValidationError("sampler.n_s", "must be positive");
    if (w_rt < 1 || w_rt > kHoursPerDay) throw ValidationError("sampler.w_rt", "must lie in 1..24");
    if (n_rt < 1) throw ValidationError("sampler.n_rt", "must be positive");
    if (months < 1 || months > 12) throw ValidationError("sampler.months", "must lie in 1..12");
}

std::size_t ScenarioSample::simulated_days() const {
    std::size_t n = 0;
    for (const auto& m : months)
        for (const auto& w : m.windows) n += w.days.size();
    return n;
}

std::size_t ScenarioSample::simulated_hours() const {
    std::size_t n = 0;
    for (const auto& m : months)
        for (const auto& w : m.windows)
            for (const auto& d : w.days)
                for (const auto& hw : d.hour_windows) n += hw.hours.size();
    return n;
}

std::vector<int> sample_window_starts(int month, int w_s, int n_s, Rng& rng) {
    const int days = days_in_month(month);
    if (n_s * w_s > days)
        throw InfeasibleWindowError(
            fmt::format("month {}: {} windows of {} days need {} days but the month has {}", month, n_s, w_s,
                        n_s * w_s, days));
    // Each placement of n_s disjoint runs corresponds to one n_s-subset of
    // {0, ..., free + n_s - 1}; pick the subset uniformly.
    const int free = days - n_s * w_s;
    std::vector<int> slots(static_cast<std::size_t>(free + n_s));
    std::iota(slots.begin(), slots.end(), 0);
    for (int i = 0; i < n_s; ++i) {
        const int j = uniform_int(rng, i, static_cast<int>(slots.size()) - 1);
        std::swap(slots[static_cast<std::size_t>(i)], slots[static_cast<std::size_t>(j)]);
    }
    std::vector<int> chosen(slots.begin(), slots.begin() + n_s);
    std::sort(chosen.begin(), chosen.end());
    const int first = first_day_of_month(month);
    std::vector<int> starts;
    for (int i = 0; i < n_s; ++i) starts.push_back(first + chosen[static_cast<std::size_t>(i)] + i * (w_s - 1));
    return starts;
}

namespace {

MonthSample sample_month(const GridCase& grid, int month, const SeasonalFactor& season, const SamplerParams& params,
                         const ProcessParams& process, Rng& rng) {
    MonthSample out;
    out.month = month;
    out.season = season;
    for (int start : sample_window_starts(month, params.w_s, params.n_s, rng)) {
        DayWindow window;
        window.start_day = start;
        for (int d = 0; d < params.w_s; ++d) {
            SampledDay day;
            day.day_of_year = start + d;
            day.forecast = sample_day_ahead(grid, day.day_of_year, season, process, rng);
            for (int r = 0; r < params.n_rt; ++r) {
                HourWindow hw;
                hw.start_hour = params.w_rt < kHoursPerDay ? uniform_int(rng, 0, kHoursPerDay - params.w_rt) : 0;
                auto state = HourlyRealization::start(grid);
                for (int h = 0; h < params.w_rt; ++h) {
                    state = step_hourly(grid, day.forecast, hw.start_hour + h, state, process, rng);
                    hw.hours.push_back(state);
                }
                day.hour_windows.push_back(std::move(hw));
            }
            window.days.push_back(std::move(day));
        }
        out.windows.push_back(std::move(window));
    }
    return out;
}

}  // namespace

ScenarioSample sample_scenario(const GridCase& grid, const SamplerParams& params, const ProcessParams& process,
                               Rng& rng, int workers) {
    params.validate();
    process.validate(grid);
    for (int m = 1; m <= params.months; ++m) {
        if (params.n_s * params.w_s > days_in_month(m))
            throw InfeasibleWindowError(fmt::format("month {}: n_s*w_s = {} exceeds {} days", m,
                                                    params.n_s * params.w_s, days_in_month(m)));
    }
    std::vector<SeasonalFactor> chain;
    std::vector<std::uint64_t> month_seeds;
    SeasonalFactor prev = seasonal_mean(12, process);
    for (int m = 1; m <= params.months; ++m) {
        prev = seasonal_step(prev, m, process, rng);
        chain.push_back(prev);
        month_seeds.push_back(rng());
    }
    ScenarioSample sample;
    sample.months.resize(chain.size());
    parallel_for(chain.size(), workers, [&](std::size_t i) {
        Rng month_rng = make_rng(month_seeds[i]);
        sample.months[i] = sample_month(grid, static_cast<int>(i) + 1, chain[i], params, process, month_rng);
    });
    return sample;
}

double scenario_weight(const SamplerParams& params, int month) {
    return static_cast<double>(days_in_month(month)) / static_cast<double>(params.n_s * params.w_s);
}

double hour_weight(const SamplerParams& params) {
    return static_cast<double>(kHoursPerDay) / static_cast<double>(params.n_rt * params.w_rt);
}

namespace {

detail::Json matrix_json(const Eigen::MatrixXd& m) {
    detail::Json rows = detail::Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        detail::Json row = detail::Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

detail::Json vector_json(const Eigen::VectorXd& v) {
    return detail::Json(std::vector<double>(v.data(), v.data() + v.size()));
}

}  // namespace

std::string dump_scenario(const ScenarioSample& sample) {
    using detail::Json;
    Json months = Json::array();
    for (const auto& m : sample.months) {
        Json windows = Json::array();
        for (const auto& w : m.windows) {
            Json days = Json::array();
            for (const auto& d : w.days) {
                Json hws = Json::array();
                for (const auto& hw : d.hour_windows) {
                    Json hours = Json::array();
                    for (const auto& h : hw.hours) {
                        hours.push_back({{"wind", vector_json(h.wind)},
                                         {"load", vector_json(h.load)},
                                         {"wind_delta", vector_json(h.wind_delta)},
                                         {"load_delta", vector_json(h.load_delta)}});
                    }
                    hws.push_back({{"start_hour", hw.start_hour}, {"hours", std::move(hours)}});
                }
                days.push_back({{"day_of_year", d.day_of_year},
                                {"forecast", {{"wind", matrix_json(d.forecast.wind)}, {"load", matrix_json(d.forecast.load)}}},
                                {"hour_windows", std::move(hws)}});
            }
            windows.push_back({{"start_day", w.start_day}, {"days", std::move(days)}});
        }
        months.push_back({{"month", m.month},
                          {"season", {{"wind_level", m.season.wind_level}, {"load_level", m.season.load_level}}},
                          {"windows", std::move(windows)}});
    }
    return Json{{"months", std::move(months)}}.dump(1) + "\n";
}

}  // namespace gridsched
