#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "gridsched/grid.hpp"
#include "gridsched/random.hpp"
#include "gridsched/rt.hpp"
#include "gridsched/stochastic.hpp"
#include "gridsched/uc.hpp"

namespace gridsched::proxy {

using TopologyKey = std::uint64_t;

inline constexpr int kMetricVersion = 1;

/// Outage candidates and, optionally, a zonal split. With zones, the
/// combination set is every subset of one zone's lines joined with every
/// subset of the shared lines, instead of every subset of all lines.
struct OutageSet {
    std::vector<int> line_ids;
    std::vector<std::vector<int>> zones;  // line ids per zone; empty = no zoning
    std::vector<int> shared;              // interconnection line ids (zonal mode)

    void validate(const GridCase& grid) const;
    /// Bit position of a line id, or -1.
    int bit_of(int line_id) const;
    TopologyKey key_of(const GridCase& grid, const Topology& topology) const;
    Topology topology_of(const GridCase& grid, TopologyKey key) const;
    /// Every key the dataset must cover, ascending. Throws CapacityError
    /// above `limit` keys.
    std::vector<TopologyKey> combinations(std::size_t limit) const;
};

struct UcQuery {
    TopologyKey topology_key = 0;
    DayAheadForecast forecast;
    int month = 1;
};

struct ProxyRecord {
    UcQuery query;
    UcSolution solution;
};

struct DatasetSettings {
    std::size_t min_bucket = 10;
    std::size_t max_combinations = 4096;
    bool per_bus_features = false;
    int months = 12;
    int workers = 1;
};

struct ProxyDataset {
    std::string case_hash;
    OutageSet outages;
    bool per_bus_features = false;
    std::vector<ProxyRecord> records;
    std::map<TopologyKey, std::vector<std::size_t>> index;

    void rebuild_index();
    std::size_t bucket_size(TopologyKey key) const;
};

/// Capacity-normalized Euclidean distance between two queries' forecasts,
/// over system totals per hour, or per element when `per_bus` is set.
double distance(const GridCase& grid, const UcQuery& a, const UcQuery& b, bool per_bus = false);

/// Draws a query: uniform month, seasonal level around that month's
/// profile, a uniform day in the month, and a day-ahead forecast.
UcQuery sample_query(const GridCase& grid, const OutageSet& outages, TopologyKey key, int months,
                     const ProcessParams& process, Rng& rng);

ProxyDataset generate_dataset(const GridCase& grid, const OutageSet& outages, std::size_t n_records,
                              const ProcessParams& process, Rng& rng, const DatasetSettings& settings = {});

/// Nearest record inside the query's exact topology bucket; ties go to the
/// lowest record index. Throws MissingTopologyError for an empty bucket.
const ProxyRecord& nn_lookup(const GridCase& grid, const ProxyDataset& ds, const UcQuery& q);

std::string write_dataset(const ProxyDataset& ds);
ProxyDataset parse_dataset(const std::string& text, const GridCase& grid, const std::string& origin = "<string>");
void save_dataset(const ProxyDataset& ds, const std::filesystem::path& path);
/// Refuses a dataset built for a different case (hash mismatch).
ProxyDataset load_dataset(const std::filesystem::path& path, const GridCase& grid);

struct EvalQuery {
    UcQuery query;
    std::vector<HourlyRealization> hours;  // realized walk over the forecast day
};

struct GapRow {
    int month = 0;
    std::string metric;
    std::size_t n = 0;
    double exact_mean = 0.0;
    double proxy_mean = 0.0;
    double gap_mean = 0.0;  // proxy minus exact
    double gap_sd = 0.0;
    double abs_gap_mean = 0.0;
};

struct ProxyReport {
    std::vector<GapRow> rows;  // one per (month, metric)
    std::string to_csv() const;
    const GapRow* find(int month, const std::string& metric) const;
};

inline const std::vector<std::string>& report_metrics() {
    static const std::vector<std::string> m{"da_cost", "shed", "rt_cost", "reliability"};
    return m;
}

/// Draws fresh test queries with realized walks.
std::vector<EvalQuery> sample_eval_queries(const GridCase& grid, const ProxyDataset& ds, std::size_t n_test, int months,
                                           const ProcessParams& process, Rng& rng);

/// Exact-vs-proxy gaps per month for day-ahead cost, shedding, real-time
/// operating cost and reliability.
ProxyReport evaluate_proxy(const GridCase& grid, const ProxyDataset& ds, const std::vector<EvalQuery>& queries,
                           int months, int workers = 1, const RtOptions& rt = {});
ProxyReport evaluate_proxy(const GridCase& grid, const ProxyDataset& ds, std::size_t n_test, const ProcessParams& process,
                           Rng& rng, int months = 12, int workers = 1);

}  // namespace gridsched::proxy
