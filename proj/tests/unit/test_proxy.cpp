#include <limits>

#include "gridsched/errors.hpp"
#include "gridsched/harness.hpp"
#include "gridsched/proxy.hpp"
#include "test_util.hpp"

using namespace gridsched;
using namespace gridsched::proxy;

namespace {

GridCase toy() { return load_case(testutil::data("cases/toy5.case")); }

const ProxyDataset& committed() {
    static const ProxyDataset ds = load_dataset(testutil::data("fixtures/toy5/proxy_dataset.json"), toy());
    return ds;
}

}  // namespace

TEST(Proxy, KeysRoundTrip) {
    const auto g = toy();
    OutageSet s;
    s.line_ids = {2, 4};
    for (TopologyKey k = 0; k < 4; ++k) EXPECT_EQ(s.key_of(g, s.topology_of(g, k)), k);
    auto t = Topology::all_in_service(g);
    t.line_status[g.line_index(4)] = false;
    EXPECT_EQ(s.key_of(g, t), 2u);
    EXPECT_EQ(s.bit_of(4), 1);
    EXPECT_EQ(s.bit_of(6), -1);
    EXPECT_EQ(s.combinations(16), (std::vector<TopologyKey>{0, 1, 2, 3}));
}

TEST(Proxy, ZonalCombinations) {
    const auto g = toy();
    OutageSet s;
    s.line_ids = {1, 2, 3, 4};
    s.zones = {{1, 2}, {3}};
    s.shared = {4};
    EXPECT_NO_THROW(s.validate(g));
    // Zone A: 4 subsets x 2, zone B: 2 x 2, the 2 shared-only keys counted once.
    EXPECT_EQ(s.combinations(100).size(), 10u);
    EXPECT_THROW(s.combinations(5), CapacityError);
    OutageSet bad = s;
    bad.line_ids.push_back(42);
    EXPECT_THROW(bad.validate(g), ValidationError);
}

TEST(Proxy, CommittedDatasetCoversEveryBucket) {
    const auto& ds = committed();
    EXPECT_EQ(ds.records.size(), 400u);
    EXPECT_EQ(ds.index.size(), 4u);
    for (const auto& [key, members] : ds.index) {
        EXPECT_GE(members.size(), 10u);
        for (auto i : members) EXPECT_EQ(ds.records[i].query.topology_key, key);
    }
}

TEST(Proxy, SelfLookupHasZeroDistance) {
    const auto g = toy();
    const auto& ds = committed();
    for (std::size_t i = 0; i < ds.records.size(); i += 7) {
        const auto& q = ds.records[i].query;
        const auto& hit = nn_lookup(g, ds, q);
        EXPECT_DOUBLE_EQ(distance(g, q, hit.query, ds.per_bus_features), 0.0);
        EXPECT_EQ(hit.query.topology_key, q.topology_key);
    }
}

TEST(Proxy, LookupMatchesLinearScan) {
    const auto g = toy();
    const auto& ds = committed();
    const auto proc = ProcessParams::defaults_for(g);
    Rng rng = make_rng(12);
    for (int n = 0; n < 200; ++n) {
        const auto key = static_cast<TopologyKey>(uniform_int(rng, 0, 3));
        const auto q = sample_query(g, ds.outages, key, 3, proc, rng);
        std::size_t best = 0;
        double bd = std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < ds.records.size(); ++i) {
            if (ds.records[i].query.topology_key != key) continue;
            const double d = distance(g, q, ds.records[i].query);
            if (d < bd) {
                bd = d;
                best = i;
            }
        }
        EXPECT_EQ(&nn_lookup(g, ds, q), &ds.records[best]);
    }
}

TEST(Proxy, MissingBucket) {
    const auto g = toy();
    auto ds = committed();
    ds.records.erase(std::remove_if(ds.records.begin(), ds.records.end(),
                                    [](const ProxyRecord& r) { return r.query.topology_key == 3; }),
                     ds.records.end());
    ds.rebuild_index();
    UcQuery q = ds.records.front().query;
    q.topology_key = 3;
    EXPECT_THROW(nn_lookup(g, ds, q), MissingTopologyError);
}

TEST(Proxy, DistanceProperties) {
    const auto g = toy();
    const auto& ds = committed();
    const auto& a = ds.records[0].query;
    const auto& b = ds.records[1].query;
    const auto& c = ds.records[2].query;
    EXPECT_DOUBLE_EQ(distance(g, a, b), distance(g, b, a));
    EXPECT_LE(distance(g, a, c), distance(g, a, b) + distance(g, b, c) + 1e-12);
    EXPECT_GE(distance(g, a, b, true), 0.0);
}

TEST(Proxy, SerializationRoundTrip) {
    const auto g = toy();
    const auto& ds = committed();
    const auto text = write_dataset(ds);
    const auto again = parse_dataset(text, g);
    EXPECT_EQ(write_dataset(again), text);
    EXPECT_EQ(again.records.size(), ds.records.size());
    auto other = g;
    other.lines[0].flow_limit_mw += 1.0;
    EXPECT_THROW(parse_dataset(text, other), ValidationError);
}

TEST(Proxy, GenerateSmallDataset) {
    const auto g = toy();
    OutageSet s;
    s.line_ids = {2};
    DatasetSettings settings;
    settings.min_bucket = 2;
    settings.months = 2;
    Rng rng = make_rng(3);
    const auto ds = generate_dataset(g, s, 5, ProcessParams::defaults_for(g), rng, settings);
    ASSERT_EQ(ds.records.size(), 5u);
    EXPECT_EQ(ds.case_hash, case_hash(g));
    EXPECT_GE(ds.bucket_size(0), 2u);
    EXPECT_GE(ds.bucket_size(1), 2u);
    for (const auto& r : ds.records) {
        EXPECT_LE(r.query.month, 2);
        const auto top = s.topology_of(g, r.query.topology_key);
        EXPECT_EQ(r.solution.topology, top);
        EXPECT_TRUE(verify_uc(g, top, r.query.forecast, r.solution).empty());
    }
    Rng again = make_rng(3);
    EXPECT_EQ(write_dataset(generate_dataset(g, s, 5, ProcessParams::defaults_for(g), again, settings)),
              write_dataset(ds));
    Rng r2 = make_rng(3);
    EXPECT_THROW(generate_dataset(g, s, 3, ProcessParams::defaults_for(g), r2, settings), ValidationError);
}

TEST(Proxy, ReportCsvHasEveryMetric) {
    ProxyReport rep;
    for (int m = 1; m <= 2; ++m)
        for (const auto& k : report_metrics()) rep.rows.push_back({m, k, 3, 1.0, 2.0, 1.0, 0.0, 1.0});
    const auto csv = rep.to_csv();
    EXPECT_NE(csv.find("rt_cost"), std::string::npos);
    ASSERT_NE(rep.find(2, "shed"), nullptr);
    EXPECT_EQ(rep.find(3, "shed"), nullptr);
}
