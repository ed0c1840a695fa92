#include "tripcast/online_cluster.hpp"

#include "brute_dbscan.hpp"

#include <gtest/gtest.h>

#include <limits>
#include <random>

#include <nlohmann/json.hpp>

using namespace tripcast;
using nlohmann::json;

namespace {

const GeoPoint kO{ 57.7089, 11.9746 };

GeoPoint east(double m)
{
    return offset_by_meters(kO, m, 0.0);
}

ClusterParams params(int m = 2, double r = 0.5)
{
    ClusterParams p;
    p.min_pts = m;
    p.radii_fraction = r;
    return p;
}

ClusterLabel L(int v)
{
    return ClusterLabel{ v };
}

json v2_state(const ClusterParams& p, const std::vector<std::tuple<GeoPoint, int, double, int>>& centroids)
{
    json cs = json::array();
    for (const auto& [c, count, radius, label] : centroids) {
        cs.push_back({ { "lat", c.lat }, { "lon", c.lon }, { "count", count }, { "radius_m", radius }, { "label", label } });
    }
    return { { "variant", "v2" }, { "params", params_to_json(p) }, { "centroids", cs } };
}

} // namespace

TEST(OnlineV1, SecondNearbyPointCreatesCluster)
{
    OnlineClusterV1 c(params());
    const auto first = c.observe(kO, 0.0);
    EXPECT_TRUE(first.label.is_outlier());
    EXPECT_TRUE(first.events.empty());

    const auto second = c.observe(east(10.0), 1.0);
    EXPECT_EQ(second.label, L(0));
    ASSERT_EQ(second.events.size(), 1u);
    EXPECT_EQ(std::get<NewCluster>(second.events[0]).label, L(0));
    ASSERT_EQ(c.centroids().size(), 1u);
    EXPECT_EQ(c.centroids()[0].count, 2);
    EXPECT_TRUE(c.pending().empty());
}

TEST(OnlineV1, PointInsideCentroidIsAbsorbed)
{
    OnlineClusterV1 c(params());
    c.observe(kO, 0.0);
    c.observe(east(10.0), 1.0);
    const auto obs = c.observe(east(-30.0), 2.0);
    EXPECT_EQ(obs.label, L(0));
    EXPECT_TRUE(obs.events.empty());
    EXPECT_EQ(c.centroids()[0].count, 3);
}

TEST(OnlineV1, BridgingPointMergesClusters)
{
    OnlineClusterV1 c(params());
    c.observe(kO, 0.0);
    c.observe(east(10.0), 1.0);
    c.observe(east(290.0), 2.0);
    const auto b = c.observe(east(300.0), 3.0);
    EXPECT_EQ(b.label, L(1));
    ASSERT_EQ(c.live_labels().size(), 2u);

    const auto bridge = c.observe(east(145.0), 4.0);
    EXPECT_EQ(bridge.label, L(0));
    ASSERT_EQ(bridge.events.size(), 1u);
    const auto& merge = std::get<Merge>(bridge.events[0]);
    EXPECT_EQ(merge.sources, (std::vector<ClusterLabel>{ L(0), L(1) }));
    EXPECT_EQ(merge.survivor, L(0));
    EXPECT_EQ(c.live_labels(), (std::set<ClusterLabel>{ L(0) }));
    for (const auto& centroid : c.centroids()) {
        EXPECT_EQ(centroid.label, L(0));
    }

    // Retired labels are not reused.
    c.observe(east(3000.0), 5.0);
    const auto fresh = c.observe(east(3010.0), 6.0);
    EXPECT_EQ(fresh.label, L(2));
}

TEST(OnlineV1, DistancesAndClassify)
{
    OnlineClusterV1 c(params());
    c.observe(kO, 0.0);
    c.observe(east(10.0), 1.0);
    const auto d = c.distances_to_clusters(east(130.0));
    EXPECT_NEAR(d.at(L(0)), 80.0, 0.01);
    EXPECT_EQ(c.distances_to_clusters(kO).at(L(0)), 0.0);
    EXPECT_EQ(c.classify(east(140.0)), L(0));
    EXPECT_TRUE(c.classify(east(160.0)).is_outlier());
}

TEST(OnlineV2, GrowsRadiusThenAbsorbs)
{
    OnlineClusterV2 c(params());
    c.observe(kO, 0.0);
    const auto second = c.observe(east(60.0), 1.0);
    EXPECT_EQ(second.label, L(0));
    ASSERT_EQ(second.events.size(), 1u);
    ASSERT_EQ(c.centroids().size(), 1u);
    EXPECT_NEAR(c.centroids()[0].radius_m, 60.0, 1e-6);
    EXPECT_EQ(c.centroids()[0].count, 2);

    const auto third = c.observe(offset_by_meters(c.centroids()[0].center, 0.0, 30.0), 2.0);
    EXPECT_EQ(third.label, L(0));
    EXPECT_TRUE(third.events.empty());
    EXPECT_EQ(c.centroids()[0].count, 3);
}

TEST(OnlineV2, BoundaryIsNotAbsorbed)
{
    const auto p = params(10);
    const GeoPoint q = east(50.0);
    const double r = haversine_distance(kO, q);
    auto c = OnlineClusterV2::from_snapshot(v2_state(p, { { kO, 1, r, 0 } }));
    const auto on_edge = c.observe(q, 0.0);
    EXPECT_TRUE(on_edge.label.is_outlier());
    EXPECT_EQ(c.pending().size(), 1u);
    const auto inside = c.observe(east(49.0), 1.0);
    EXPECT_EQ(inside.label, L(0));
}

TEST(OnlineV2, MergeCoversBothDiscs)
{
    const auto p = params();
    const GeoPoint a = kO;
    const GeoPoint b = east(150.0);
    auto c = OnlineClusterV2::from_snapshot(v2_state(p, { { a, 3, 20.0, 0 }, { b, 3, 30.0, 1 } }));
    const GeoPoint bridge = east(75.0);
    const auto obs = c.observe(bridge, 0.0);
    EXPECT_EQ(obs.label, L(0));
    ASSERT_EQ(obs.events.size(), 1u);
    EXPECT_EQ(std::get<Merge>(obs.events[0]).survivor, L(0));
    ASSERT_EQ(c.centroids().size(), 1u);
    const auto& m = c.centroids()[0];
    EXPECT_EQ(m.count, 7);
    EXPECT_LE(haversine_distance(m.center, a) + 20.0, m.radius_m + 1e-6);
    EXPECT_LE(haversine_distance(m.center, b) + 30.0, m.radius_m + 1e-6);
    EXPECT_LE(haversine_distance(m.center, bridge), m.radius_m + 1e-6);
}

TEST(OnlineV2, DistanceToCentroidEdge)
{
    auto c = OnlineClusterV2::from_snapshot(v2_state(params(), { { kO, 4, 30.0, 0 } }));
    EXPECT_NEAR(c.distances_to_clusters(east(130.0)).at(L(0)), 100.0, 1e-6);
    EXPECT_EQ(c.distances_to_clusters(east(10.0)).at(L(0)), 0.0);
}

TEST(OnlineClustererTest, RejectsDecreasingTimeAndBadPoints)
{
    for (auto variant : { ClusterVariant::V1, ClusterVariant::V2 }) {
        auto c = make_online_clusterer(variant, params());
        c->observe(kO, 10.0);
        const auto before = c->snapshot();
        EXPECT_THROW(c->observe(east(5.0), 9.0), std::invalid_argument);
        EXPECT_THROW(c->observe({ 100.0, 0.0 }, 11.0), std::invalid_argument);
        EXPECT_EQ(c->snapshot(), before);
    }
}

TEST(OnlineClustererTest, ExpiryRemovesOnlyPendingPoints)
{
    auto p = params(3);
    p.expire_s = 100.0;
    OnlineClusterV1 c(p);
    c.observe(kO, 0.0);
    c.observe(east(5.0), 1.0);
    c.observe(east(8.0), 2.0); // cluster formed
    c.observe(east(5000.0), 3.0);
    ASSERT_EQ(c.pending().size(), 1u);
    c.observe(east(20000.0), 500.0);
    ASSERT_EQ(c.pending().size(), 1u);
    EXPECT_EQ(c.pending()[0].t, 500.0);
    EXPECT_EQ(c.centroids().size(), 1u);
}

TEST(OnlineClustererTest, SnapshotRoundTrip)
{
    std::mt19937_64 rng(4);
    std::normal_distribution<double> noise(0.0, 30.0);
    for (auto variant : { ClusterVariant::V1, ClusterVariant::V2 }) {
        auto c = make_online_clusterer(variant, params());
        for (int i = 0; i < 60; ++i) {
            const double cx = 400.0 * (i % 3);
            c->observe(offset_by_meters(kO, cx + noise(rng), noise(rng)), i);
        }
        const auto snap = c->snapshot();
        auto restored = online_clusterer_from_snapshot(snap);
        EXPECT_EQ(restored->snapshot(), snap);
        const auto a = c->observe(east(20.0), 100.0);
        const auto b = restored->observe(east(20.0), 100.0);
        EXPECT_EQ(a.label, b.label);
        EXPECT_EQ(a.events, b.events);
    }
}

TEST(OnlineClustererTest, StreamInvariants)
{
    std::mt19937_64 rng(8);
    std::uniform_int_distribution<int> site(0, 5);
    std::normal_distribution<double> noise(0.0, 40.0);
    for (auto variant : { ClusterVariant::V1, ClusterVariant::V2 }) {
        auto c = make_online_clusterer(variant, params());
        for (int i = 0; i < 400; ++i) {
            const int s = site(rng);
            const auto before = c->live_labels().size();
            const auto obs = c->observe(offset_by_meters(kO, 250.0 * s + noise(rng), noise(rng)), i * 60.0);
            if (!obs.label.is_outlier()) {
                EXPECT_TRUE(c->live_labels().contains(obs.label));
            }
            std::size_t expected = before;
            for (const auto& e : obs.events) {
                if (std::holds_alternative<NewCluster>(e)) {
                    ++expected;
                } else {
                    const auto& m = std::get<Merge>(e);
                    EXPECT_GE(m.sources.size(), 2u);
                    EXPECT_EQ(m.survivor, m.sources.front());
                    expected -= m.sources.size() - 1;
                }
            }
            EXPECT_EQ(c->live_labels().size(), expected);
            if (variant == ClusterVariant::V2) {
                EXPECT_EQ(c->centroid_count(), c->live_labels().size());
            }
        }
    }
}

TEST(OnlineV1, TinyRadiusMatchesDbscan)
{
    std::mt19937_64 rng(12);
    std::normal_distribution<double> noise(0.0, 15.0);
    auto p = params(3, 1e-9);
    p.expire_s = std::numeric_limits<double>::infinity();
    for (int trial = 0; trial < 5; ++trial) {
        OnlineClusterV1 c(p);
        std::vector<GeoPoint> pts;
        for (int i = 0; i < 120; ++i) {
            const int s = static_cast<int>(rng() % 4);
            pts.push_back(offset_by_meters(kO, 500.0 * s + noise(rng), noise(rng)));
            c.observe(pts.back(), i);
        }
        std::vector<int> online;
        for (const auto& q : pts) {
            online.push_back(c.classify(q).value());
        }
        EXPECT_TRUE(tripcast::testing::same_partition(
            online, tripcast::testing::values(offline_dbscan(pts, p))));
    }
}
