#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "gridsched/ce.hpp"
#include "gridsched/harness.hpp"
#include "gridsched/lp.hpp"
#include "gridsched/random.hpp"
#include "gridsched/stochastic.hpp"

namespace gridsched::fixtures {

/// Contents of a fixture directory's fixture.json.
struct FixtureSpec {
    std::filesystem::path dir;
    std::filesystem::path config;  // experiment config the fixture is built on
    std::size_t random_milps = 30;
    int max_binaries = 10;
    std::size_t uc_instances = 20;
    int uc_hours = 6;
    std::uint64_t seed = 1;
};

FixtureSpec load_fixture(const std::filesystem::path& dir);

/// Small feasible MILP with 2..max_binaries binaries and a few bounded
/// continuous columns.
lp::MixedIntegerProgram random_milp(Rng& rng, int max_binaries);
std::vector<lp::MixedIntegerProgram> random_milps(const FixtureSpec& spec);

struct UcInstance {
    int month = 1;
    int day_of_year = 1;
    DayAheadForecast forecast;  // truncated to the instance length
};

std::vector<UcInstance> uc_instances(const FixtureSpec& spec, const GridCase& grid, const ProcessParams& process);

/// Every schedule satisfying the requirements, rows varying fastest last.
std::vector<ce::OutageSchedule> all_schedules(const std::vector<ce::OutageRequirement>& reqs);

struct EnumerationRow {
    ce::OutageSchedule schedule;
    ScheduleMetrics metrics;
    double penalized_cost = 0.0;
};

struct Enumeration {
    ce::BarrierParams barrier;
    std::uint64_t seed = 0;
    std::vector<EnumerationRow> rows;  // enumeration order

    /// Index of the lowest penalized cost (first on ties).
    std::size_t best() const;
};

/// Assesses every feasible schedule on the scenarios of CE iteration 0.
/// The barrier is the configured one, else derived from the mean expected cost.
Enumeration enumerate_schedules(const Experiment& ex);

std::string enumeration_csv(const Enumeration& e);

/// Oracle files keyed by file name: milp_random.csv, milp_uc.csv, enumeration.csv.
std::map<std::string, std::string> compute_oracles(const FixtureSpec& spec);

struct DriftEntry {
    std::string file;
    std::size_t line = 0;  // 1-based, 0 = whole file
    std::string expected;
    std::string actual;
};

/// Recomputes every oracle and compares it with the committed files.
/// With `write`, committed files are replaced instead. Throws
/// OracleDriftError listing the differing entries when not writing.
std::vector<DriftEntry> regenerate_oracles(const std::filesystem::path& fixture_dir, bool write = false);

/// Line-by-line comparison of two file sets.
std::vector<DriftEntry> diff_oracles(const std::map<std::string, std::string>& committed,
                                     const std::map<std::string, std::string>& fresh);

}  // namespace gridsched::fixtures
