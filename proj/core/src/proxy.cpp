#include "gridsched/proxy.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <fmt/format.h>

#include "gridsched/errors.hpp"
#include "gridsched/parallel.hpp"
#include "gridsched/reliability.hpp"
#include "json_util.hpp"

namespace gridsched::proxy {

using detail::Json;

void OutageSet::validate(const GridCase& grid) const {
    if (line_ids.empty()) throw ValidationError("outage_lines", "must be non-empty");
    if (line_ids.size() > 63) throw CapacityError("more than 63 outage candidate lines");
    std::set<int> seen;
    for (int id : line_ids) {
        (void)grid.line_index(id);
        if (!seen.insert(id).second) throw ValidationError("outage_lines", fmt::format("line {} listed twice", id));
    }
    for (const auto& z : zones)
        for (int id : z)
            if (!seen.count(id)) throw ValidationError("zones", fmt::format("line {} is not an outage candidate", id));
    for (int id : shared)
        if (!seen.count(id)) throw ValidationError("shared", fmt::format("line {} is not an outage candidate", id));
}

int OutageSet::bit_of(int line_id) const {
    for (std::size_t i = 0; i < line_ids.size(); ++i)
        if (line_ids[i] == line_id) return static_cast<int>(i);
    return -1;
}

TopologyKey OutageSet::key_of(const GridCase& grid, const Topology& topology) const {
    TopologyKey key = 0;
    for (std::size_t i = 0; i < line_ids.size(); ++i) {
        if (!topology.in_service(grid.line_index(line_ids[i]))) key |= TopologyKey{1} << i;
    }
    return key;
}

Topology OutageSet::topology_of(const GridCase& grid, TopologyKey key) const {
    Topology top = Topology::all_in_service(grid);
    for (std::size_t i = 0; i < line_ids.size(); ++i) {
        if ((key >> i) & 1U) top.line_status[grid.line_index(line_ids[i])] = false;
    }
    return top;
}

namespace {

std::vector<TopologyKey> subsets(TopologyKey mask) {
    std::vector<TopologyKey> out;
    TopologyKey s = mask;
    for (;;) {
        out.push_back(s);
        if (s == 0) break;
        s = (s - 1) & mask;
    }
    return out;
}

}  // namespace

std::vector<TopologyKey> OutageSet::combinations(std::size_t limit) const {
    auto mask_of = [&](const std::vector<int>& ids) {
        TopologyKey m = 0;
        for (int id : ids) m |= TopologyKey{1} << bit_of(id);
        return m;
    };
    std::set<TopologyKey> keys;
    auto bounded_insert = [&](TopologyKey mask) {
        const auto bits = static_cast<std::size_t>(__builtin_popcountll(mask));
        if (bits >= 40 || (std::size_t{1} << bits) > limit)
            throw CapacityError(fmt::format("outage combination set of 2^{} exceeds the limit {}", bits, limit));
        for (auto s : subsets(mask)) keys.insert(s);
        if (keys.size() > limit)
            throw CapacityError(fmt::format("outage combination set exceeds the limit {}", limit));
    };
    if (zones.empty()) {
        bounded_insert(mask_of(line_ids));
    } else {
        const TopologyKey common = mask_of(shared);
        for (const auto& z : zones) bounded_insert(mask_of(z) | common);
    }
    return {keys.begin(), keys.end()};
}

void ProxyDataset::rebuild_index() {
    index.clear();
    for (std::size_t i = 0; i < records.size(); ++i) index[records[i].query.topology_key].push_back(i);
}

std::size_t ProxyDataset::bucket_size(TopologyKey key) const {
    auto it = index.find(key);
    return it == index.end() ? 0 : it->second.size();
}

namespace {

std::vector<double> features(const GridCase& grid, const UcQuery& q, bool per_bus) {
    std::vector<double> f;
    const auto& w = q.forecast.wind;
    const auto& d = q.forecast.load;
    if (per_bus) {
        for (Eigen::Index i = 0; i < w.rows(); ++i) {
            const double cap = grid.wind_generators[static_cast<std::size_t>(i)].capacity_mw;
            for (Eigen::Index h = 0; h < w.cols(); ++h) f.push_back(cap > 0.0 ? w(i, h) / cap : w(i, h));
        }
        for (Eigen::Index b = 0; b < d.rows(); ++b) {
            const double peak = grid.buses[static_cast<std::size_t>(b)].peak_load_mw;
            for (Eigen::Index h = 0; h < d.cols(); ++h) f.push_back(peak > 0.0 ? d(b, h) / peak : d(b, h));
        }
        return f;
    }
    const double wcap = grid.total_wind_capacity() > 0.0 ? grid.total_wind_capacity() : 1.0;
    const double peak = grid.total_peak_load() > 0.0 ? grid.total_peak_load() : 1.0;
    for (Eigen::Index h = 0; h < w.cols(); ++h) f.push_back(w.col(h).sum() / wcap);
    for (Eigen::Index h = 0; h < d.cols(); ++h) f.push_back(d.col(h).sum() / peak);
    return f;
}

}  // namespace

double distance(const GridCase& grid, const UcQuery& a, const UcQuery& b, bool per_bus) {
    if (a.forecast.wind.rows() != b.forecast.wind.rows() || a.forecast.wind.cols() != b.forecast.wind.cols() ||
        a.forecast.load.rows() != b.forecast.load.rows() || a.forecast.load.cols() != b.forecast.load.cols())
        throw ValidationError("query", "forecast dimensions differ");
    const auto fa = features(grid, a, per_bus);
    const auto fb = features(grid, b, per_bus);
    double s = 0.0;
    for (std::size_t i = 0; i < fa.size(); ++i) s += (fa[i] - fb[i]) * (fa[i] - fb[i]);
    return std::sqrt(s);
}

UcQuery sample_query(const GridCase& grid, const OutageSet& outages, TopologyKey key, int months,
                     const ProcessParams& process, Rng& rng) {
    (void)outages;
    UcQuery q;
    q.topology_key = key;
    q.month = uniform_int(rng, 1, months);
    const int prev = q.month == 1 ? 12 : q.month - 1;
    const auto season = seasonal_step(seasonal_mean(prev, process), q.month, process, rng);
    const int day = first_day_of_month(q.month) + uniform_int(rng, 0, days_in_month(q.month) - 1);
    q.forecast = sample_day_ahead(grid, day, season, process, rng);
    return q;
}

ProxyDataset generate_dataset(const GridCase& grid, const OutageSet& outages, std::size_t n_records,
                              const ProcessParams& process, Rng& rng, const DatasetSettings& settings) {
    outages.validate(grid);
    const auto keys = outages.combinations(settings.max_combinations);
    if (n_records < keys.size() * settings.min_bucket)
        throw ValidationError("n_records", fmt::format("{} records cannot give {} buckets at least {} each", n_records,
                                                       keys.size(), settings.min_bucket));
    std::vector<std::size_t> positions;
    for (int id : outages.line_ids) positions.push_back(grid.line_index(id));

    // Topology per record: uniform over the combination set.
    std::vector<TopologyKey> assigned(n_records);
    for (auto& k : assigned) {
        if (outages.zones.empty()) {
            k = outages.key_of(grid, sample_training_topology(grid, positions, rng));
        } else {
            k = keys[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(keys.size()) - 1))];
        }
    }
    // Top up thin buckets by moving the latest records out of the fullest.
    std::map<TopologyKey, std::vector<std::size_t>> members;
    for (auto k : keys) members[k];
    for (std::size_t i = 0; i < n_records; ++i) members[assigned[i]].push_back(i);
    for (auto k : keys) {
        while (members[k].size() < settings.min_bucket) {
            auto donor = std::max_element(members.begin(), members.end(), [](const auto& a, const auto& b) {
                return a.second.size() < b.second.size();
            });
            const std::size_t rec = donor->second.back();
            donor->second.pop_back();
            assigned[rec] = k;
            members[k].push_back(rec);
        }
    }
    std::vector<std::uint64_t> seeds(n_records);
    for (auto& s : seeds) s = rng();

    ProxyDataset ds;
    ds.case_hash = case_hash(grid);
    ds.outages = outages;
    ds.per_bus_features = settings.per_bus_features;
    ds.records.resize(n_records);
    parallel_for(n_records, settings.workers, [&](std::size_t i) {
        Rng r = make_rng(seeds[i]);
        auto q = sample_query(grid, outages, assigned[i], settings.months, process, r);
        const auto top = outages.topology_of(grid, q.topology_key);
        auto sol = solve_uc(grid, top, q.forecast, unconstrained_start(grid));
        ds.records[i] = ProxyRecord{std::move(q), std::move(sol)};
    });
    ds.rebuild_index();
    return ds;
}

const ProxyRecord& nn_lookup(const GridCase& grid, const ProxyDataset& ds, const UcQuery& q) {
    auto it = ds.index.find(q.topology_key);
    if (it == ds.index.end() || it->second.empty())
        throw MissingTopologyError(fmt::format("no dataset records for topology key {:#x}", q.topology_key));
    std::size_t best = it->second.front();
    double best_d = distance(grid, q, ds.records[best].query, ds.per_bus_features);
    for (std::size_t i : it->second) {
        const double d = distance(grid, q, ds.records[i].query, ds.per_bus_features);
        if (d < best_d || (d == best_d && i < best)) {
            best_d = d;
            best = i;
        }
    }
    return ds.records[best];
}

namespace {

Json matrix_to_json(const Eigen::MatrixXd& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json imatrix_to_json(const Eigen::MatrixXi& m) {
    Json rows = Json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

template <class M>
M matrix_from_json(const Json& j, Eigen::Index rows, const std::string& path) {
    if (!j.is_array() || static_cast<Eigen::Index>(j.size()) != rows)
        throw ParseError(fmt::format("{}: expected {} rows", path, rows));
    const Eigen::Index cols = rows > 0 ? static_cast<Eigen::Index>(j[0].size()) : 0;
    M m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols)
            throw ParseError(fmt::format("{}[{}]: ragged row", path, r));
        for (Eigen::Index c = 0; c < cols; ++c)
            m(r, c) = detail::get_as<typename M::Scalar>(row[static_cast<std::size_t>(c)], path);
    }
    return m;
}

}  // namespace

std::string write_dataset(const ProxyDataset& ds) {
    Json header = {{"case_hash", ds.case_hash},
                   {"metric_version", kMetricVersion},
                   {"per_bus_features", ds.per_bus_features},
                   {"outage_lines", ds.outages.line_ids},
                   {"zones", ds.outages.zones},
                   {"shared", ds.outages.shared}};
    Json records = Json::array();
    for (const auto& r : ds.records) {
        const auto& s = r.solution;
        Json initial = Json::array();
        for (const auto& st : s.initial) initial.push_back({{"on", st.on}, {"hours", st.hours}});
        std::vector<int> status;
        for (bool b : s.topology.line_status) status.push_back(b ? 1 : 0);
        records.push_back({{"query",
                            {{"topology_key", r.query.topology_key},
                             {"month", r.query.month},
                             {"wind", matrix_to_json(r.query.forecast.wind)},
                             {"load", matrix_to_json(r.query.forecast.load)}}},
                           {"solution",
                            {{"commitment", imatrix_to_json(s.commitment)},
                             {"dispatch_MW", matrix_to_json(s.dispatch_mw)},
                             {"wind_curtail_MW", matrix_to_json(s.wind_curtail_mw)},
                             {"load_shed_MW", matrix_to_json(s.load_shed_mw)},
                             {"angles_rad", matrix_to_json(s.angles_rad)},
                             {"cost", s.cost},
                             {"line_status", status},
                             {"initial", initial}}}});
    }
    return Json{{"header", header}, {"records", records}}.dump() + "\n";
}

ProxyDataset parse_dataset(const std::string& text, const GridCase& grid, const std::string& origin) {
    const auto doc = detail::parse_json(text, origin);
    const auto& header = detail::require(doc, "header", origin);
    ProxyDataset ds;
    ds.case_hash = detail::field<std::string>(header, "case_hash", "header");
    if (ds.case_hash != case_hash(grid))
        throw ValidationError("header.case_hash",
                              fmt::format("dataset built for case {} but the loaded case hashes to {}", ds.case_hash,
                                          case_hash(grid)));
    const int version = detail::field<int>(header, "metric_version", "header");
    if (version != kMetricVersion)
        throw ValidationError("header.metric_version", fmt::format("unsupported version {}", version));
    ds.per_bus_features = detail::field_or<bool>(header, "per_bus_features", false, "header");
    ds.outages.line_ids = detail::field<std::vector<int>>(header, "outage_lines", "header");
    ds.outages.zones = detail::field_or<std::vector<std::vector<int>>>(header, "zones", {}, "header");
    ds.outages.shared = detail::field_or<std::vector<int>>(header, "shared", {}, "header");
    const auto& recs = detail::require_array(doc, "records", origin);
    const auto G = static_cast<Eigen::Index>(grid.n_gens());
    const auto W = static_cast<Eigen::Index>(grid.n_wind());
    const auto B = static_cast<Eigen::Index>(grid.n_buses());
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const auto p = fmt::format("records[{}]", i);
        const auto& q = detail::require(recs[i], "query", p);
        const auto& s = detail::require(recs[i], "solution", p);
        ProxyRecord r;
        r.query.topology_key = detail::field<TopologyKey>(q, "topology_key", p + ".query");
        r.query.month = detail::field<int>(q, "month", p + ".query");
        r.query.forecast.wind = matrix_from_json<Eigen::MatrixXd>(detail::require(q, "wind", p), W, p + ".query.wind");
        r.query.forecast.load = matrix_from_json<Eigen::MatrixXd>(detail::require(q, "load", p), B, p + ".query.load");
        auto& u = r.solution;
        u.commitment = matrix_from_json<Eigen::MatrixXi>(detail::require(s, "commitment", p), G, p + ".commitment");
        u.dispatch_mw = matrix_from_json<Eigen::MatrixXd>(detail::require(s, "dispatch_MW", p), G, p + ".dispatch_MW");
        u.wind_curtail_mw =
            matrix_from_json<Eigen::MatrixXd>(detail::require(s, "wind_curtail_MW", p), W, p + ".wind_curtail_MW");
        u.load_shed_mw = matrix_from_json<Eigen::MatrixXd>(detail::require(s, "load_shed_MW", p), B, p + ".load_shed_MW");
        u.angles_rad = matrix_from_json<Eigen::MatrixXd>(detail::require(s, "angles_rad", p), B, p + ".angles_rad");
        u.cost = detail::field<double>(s, "cost", p);
        for (int v : detail::field<std::vector<int>>(s, "line_status", p)) u.topology.line_status.push_back(v != 0);
        for (const auto& st : detail::require_array(s, "initial", p))
            u.initial.push_back({detail::field<bool>(st, "on", p), detail::field<int>(st, "hours", p)});
        ds.records.push_back(std::move(r));
    }
    ds.rebuild_index();
    return ds;
}

void save_dataset(const ProxyDataset& ds, const std::filesystem::path& path) {
    detail::write_text_file(path, write_dataset(ds));
}

ProxyDataset load_dataset(const std::filesystem::path& path, const GridCase& grid) {
    return parse_dataset(detail::read_text_file(path), grid, path.string());
}

std::vector<EvalQuery> sample_eval_queries(const GridCase& grid, const ProxyDataset& ds, std::size_t n_test, int months,
                                           const ProcessParams& process, Rng& rng) {
    const auto keys = ds.outages.combinations(std::size_t{1} << 20);
    std::vector<std::size_t> positions;
    for (int id : ds.outages.line_ids) positions.push_back(grid.line_index(id));
    std::vector<EvalQuery> out;
    for (std::size_t i = 0; i < n_test; ++i) {
        TopologyKey key;
        if (ds.outages.zones.empty()) {
            key = ds.outages.key_of(grid, sample_training_topology(grid, positions, rng));
        } else {
            key = keys[static_cast<std::size_t>(uniform_int(rng, 0, static_cast<int>(keys.size()) - 1))];
        }
        EvalQuery e;
        e.query = sample_query(grid, ds.outages, key, months, process, rng);
        auto state = HourlyRealization::start(grid);
        for (int h = 0; h < e.query.forecast.hours(); ++h) {
            state = step_hourly(grid, e.query.forecast, h, state, process, rng);
            e.hours.push_back(state);
        }
        out.push_back(std::move(e));
    }
    return out;
}

namespace {

struct DayOutcome {
    double da_cost = 0.0;
    double shed = 0.0;
    double rt_cost = 0.0;
    double reliability = 0.0;

    double metric(const std::string& name) const {
        if (name == "da_cost") return da_cost;
        if (name == "shed") return shed;
        if (name == "rt_cost") return rt_cost;
        return reliability;
    }
};

DayOutcome run_day(const GridCase& grid, const Topology& top, const UcSolution& baseline, const EvalQuery& e,
                   const RtOptions& rt) {
    DayOutcome out;
    out.da_cost = baseline.cost;
    DcFeasibilityChecker checker;
    RtDecision prev;
    for (std::size_t h = 0; h < e.hours.size(); ++h) {
        auto d = solve_rt(grid, top, e.hours[h], baseline, static_cast<int>(h), h == 0 ? nullptr : &prev, rt);
        out.shed += d.shed_mw();
        out.rt_cost += rt_operating_cost(d);
        out.reliability += state_reliability(grid, top, e.hours[h], d, checker);
        prev = std::move(d);
    }
    if (!e.hours.empty()) out.reliability /= static_cast<double>(e.hours.size());
    return out;
}

}  // namespace

ProxyReport evaluate_proxy(const GridCase& grid, const ProxyDataset& ds, const std::vector<EvalQuery>& queries,
                           int months, int workers, const RtOptions& rt) {
    std::vector<DayOutcome> exact(queries.size()), approx(queries.size());
    parallel_for(queries.size(), workers, [&](std::size_t i) {
        const auto& e = queries[i];
        const auto top = ds.outages.topology_of(grid, e.query.topology_key);
        const auto uc = solve_uc(grid, top, e.query.forecast, unconstrained_start(grid));
        exact[i] = run_day(grid, top, uc, e, rt);
        const auto& rec = nn_lookup(grid, ds, e.query);
        approx[i] = run_day(grid, top, rec.solution, e, rt);
    });
    ProxyReport report;
    for (int m = 1; m <= months; ++m) {
        for (const auto& metric : report_metrics()) {
            GapRow row;
            row.month = m;
            row.metric = metric;
            std::vector<double> gaps;
            for (std::size_t i = 0; i < queries.size(); ++i) {
                if (queries[i].query.month != m) continue;
                const double x = exact[i].metric(metric), y = approx[i].metric(metric);
                row.exact_mean += x;
                row.proxy_mean += y;
                gaps.push_back(y - x);
                row.abs_gap_mean += std::abs(y - x);
            }
            row.n = gaps.size();
            if (row.n > 0) {
                const double n = static_cast<double>(row.n);
                row.exact_mean /= n;
                row.proxy_mean /= n;
                row.abs_gap_mean /= n;
                for (double g : gaps) row.gap_mean += g;
                row.gap_mean /= n;
                if (row.n > 1) {
                    double ss = 0.0;
                    for (double g : gaps) ss += (g - row.gap_mean) * (g - row.gap_mean);
                    row.gap_sd = std::sqrt(ss / (n - 1.0));
                }
            }
            report.rows.push_back(row);
        }
    }
    return report;
}

ProxyReport evaluate_proxy(const GridCase& grid, const ProxyDataset& ds, std::size_t n_test, const ProcessParams& process,
                           Rng& rng, int months, int workers) {
    const auto queries = sample_eval_queries(grid, ds, n_test, months, process, rng);
    return evaluate_proxy(grid, ds, queries, months, workers);
}

std::string ProxyReport::to_csv() const {
    std::string out = "month,metric,n,exact_mean,proxy_mean,gap_mean,gap_sd,abs_gap_mean\n";
    for (const auto& r : rows) {
        out += fmt::format("{},{},{},{},{},{},{},{}\n", r.month, r.metric, r.n, r.exact_mean, r.proxy_mean, r.gap_mean,
                           r.gap_sd, r.abs_gap_mean);
    }
    return out;
}

const GapRow* ProxyReport::find(int month, const std::string& metric) const {
    for (const auto& r : rows)
        if (r.month == month && r.metric == metric) return &r;
    return nullptr;
}

}  // namespace gridsched::proxy
