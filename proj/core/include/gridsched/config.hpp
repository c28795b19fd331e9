#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gridsched/ce.hpp"
#include "gridsched/reliability.hpp"
#include "gridsched/rt.hpp"
#include "gridsched/sampler.hpp"
#include "gridsched/stochastic.hpp"

namespace gridsched {

enum class AssessmentMode { Exact, Proxy };

const char* to_string(AssessmentMode m);

/// Process settings as written in a config; profiles left unset fall back
/// to the built-in shapes scaled to the case.
struct ProcessConfig {
    double p_w_sigma = 0.15;
    double p_d_sigma = 0.02;
    double wind_walk_noise_frac = 0.005;
    double load_walk_noise_frac = 0.001;
    double seasonal_ar_coeff = 0.5;
    double seasonal_noise_sd = 0.03;
    double forced_outage_rate = 0.0;
    std::optional<std::array<double, 12>> monthly_wind_profile;
    std::optional<std::array<double, 12>> monthly_load_profile;
    std::optional<std::filesystem::path> daily_wind_profile_csv;
    std::optional<std::filesystem::path> daily_load_profile_csv;

    ProcessParams resolve(const GridCase& grid) const;
};

struct ProxyConfig {
    std::optional<std::filesystem::path> dataset;
    std::size_t n_records = 5000;
    std::size_t min_bucket = 10;
    std::size_t max_combinations = 4096;
    bool per_bus_features = false;
    std::vector<std::vector<int>> zones;
    std::vector<int> shared;
    std::size_t n_test = 200;
};

struct ExperimentConfig {
    std::filesystem::path case_path;
    std::optional<std::filesystem::path> modifications_path;
    std::optional<double> voll;
    std::optional<double> wind_curtail_price;
    std::vector<ce::OutageRequirement> outage_requirements;
    SamplerParams sampler;
    ProcessConfig process;
    ChanceThresholds thresholds;
    ce::CeParams ce;
    AssessmentMode mode = AssessmentMode::Exact;
    ProxyConfig proxy;
    RtOptions rt;
    int scenarios_per_assessment = 3;
    /// Reuse the same scenario seeds at every CE iteration.
    bool fixed_scenarios = false;
    std::uint64_t master_seed = 1;
    int workers = 1;

    void validate() const;
};

/// Parses a config; relative paths resolve against `base_dir`.
ExperimentConfig parse_config(const std::string& text, const std::filesystem::path& base_dir,
                              const std::string& origin = "<string>");
ExperimentConfig load_config(const std::filesystem::path& path);

/// Matrix CSV with header "id,<col>,..." and one row per element id.
Eigen::MatrixXd load_profile_csv(const std::filesystem::path& path, const std::vector<int>& ids, int cols);

}  // namespace gridsched
