#include "tripcast/clustering.hpp"

#include "brute_dbscan.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace tripcast;
using tripcast::testing::brute_force_dbscan;
using tripcast::testing::same_partition;
using tripcast::testing::values;

namespace {

const GeoPoint kCenter{ 57.7089, 11.9746 };

ClusterParams params(double eps = 100.0, int m = 2)
{
    ClusterParams p;
    p.epsilon_m = eps;
    p.min_pts = m;
    return p;
}

std::vector<GeoPoint> disc(std::mt19937_64& rng, const GeoPoint& c, double radius, int n)
{
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    std::vector<GeoPoint> out;
    while (static_cast<int>(out.size()) < n) {
        const double x = u(rng);
        const double y = u(rng);
        if (x * x + y * y <= 1.0) {
            out.push_back(offset_by_meters(c, x * radius, y * radius));
        }
    }
    return out;
}

ClusterLabel L(int v)
{
    return ClusterLabel{ v };
}

} // namespace

TEST(ClusterLabelTest, OutlierAndOrdering)
{
    EXPECT_TRUE(ClusterLabel::outlier().is_outlier());
    EXPECT_EQ(ClusterLabel::outlier().value(), -1);
    EXPECT_LT(ClusterLabel::outlier(), L(0));
    EXPECT_THROW(ClusterLabel{ -2 }, std::invalid_argument);
}

TEST(ClusterLabelTest, ResolveThroughMerges)
{
    const std::vector<ClusterEvent> events{ NewCluster{ L(3) }, Merge{ { L(1), L(2) }, L(1) },
                                            Merge{ { L(0), L(1) }, L(0) } };
    EXPECT_EQ(resolve_label(L(2), events), L(0));
    EXPECT_EQ(resolve_label(L(3), events), L(3));
    EXPECT_EQ(resolve_label(ClusterLabel::outlier(), events), ClusterLabel::outlier());
}

TEST(OfflineDbscan, ThreeClosePointsOneCluster)
{
    const std::vector<GeoPoint> pts{ kCenter, offset_by_meters(kCenter, 10.0, 0.0), offset_by_meters(kCenter, 5.0, 8.66) };
    EXPECT_EQ(values(offline_dbscan(pts, params())), (std::vector<int>{ 0, 0, 0 }));
}

TEST(OfflineDbscan, IsolatedPointIsOutlier)
{
    const std::vector<GeoPoint> pts{ kCenter };
    EXPECT_EQ(values(offline_dbscan(pts, params())), (std::vector<int>{ -1 }));
    EXPECT_TRUE(offline_dbscan({}, params()).empty());
}

TEST(OfflineDbscan, StrictEpsilon)
{
    // Exactly epsilon apart: not neighbors.
    const std::vector<GeoPoint> pts{ kCenter, offset_by_meters(kCenter, 100.0, 0.0) };
    const double d = haversine_distance(pts[0], pts[1]);
    const auto labels = offline_dbscan(pts, params(d));
    EXPECT_EQ(values(labels), (std::vector<int>{ -1, -1 }));
    EXPECT_EQ(values(offline_dbscan(pts, params(d * (1 + 1e-9)))), (std::vector<int>{ 0, 0 }));
}

TEST(OfflineDbscan, TwoDiscsMatchMembership)
{
    std::mt19937_64 rng(17);
    auto a = disc(rng, kCenter, 40.0, 30);
    const auto b = disc(rng, offset_by_meters(kCenter, 1000.0, 0.0), 40.0, 30);
    a.insert(a.end(), b.begin(), b.end());
    const auto labels = offline_dbscan(a, params());
    for (int i = 0; i < 60; ++i) {
        EXPECT_EQ(labels[i].value(), i < 30 ? 0 : 1);
    }
}

TEST(OfflineDbscan, BorderTieGoesToFirstCoreNeighbor)
{
    // m=4: the middle point has only three neighbors but touches a core on each side.
    const GeoPoint mid = kCenter;
    const std::vector<GeoPoint> pts{
        offset_by_meters(mid, -90.0, 0.0),  offset_by_meters(mid, -150.0, 0.0), offset_by_meters(mid, -160.0, 0.0),
        offset_by_meters(mid, -170.0, 0.0), offset_by_meters(mid, 90.0, 0.0),   offset_by_meters(mid, 150.0, 0.0),
        offset_by_meters(mid, 160.0, 0.0),  offset_by_meters(mid, 170.0, 0.0),  mid,
    };
    const auto labels = offline_dbscan(pts, params(100.0, 4));
    EXPECT_EQ(values(labels), (std::vector<int>{ 0, 0, 0, 0, 1, 1, 1, 1, 0 }));

    std::vector<GeoPoint> swapped(pts.begin() + 4, pts.begin() + 8);
    swapped.insert(swapped.end(), pts.begin(), pts.begin() + 4);
    swapped.push_back(mid);
    EXPECT_EQ(values(offline_dbscan(swapped, params(100.0, 4))), (std::vector<int>{ 0, 0, 0, 0, 1, 1, 1, 1, 0 }));
}

TEST(OfflineDbscan, MatchesBruteForceOracle)
{
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 20; ++trial) {
        std::uniform_int_distribution<int> count(1, 150);
        std::uniform_int_distribution<int> mpts(2, 4);
        const auto pts = disc(rng, kCenter, 800.0, count(rng));
        const int m = mpts(rng);
        const auto got = values(offline_dbscan(pts, params(100.0, m)));
        EXPECT_TRUE(same_partition(got, brute_force_dbscan(pts, 100.0, m))) << "trial " << trial;
    }
}

TEST(OfflineClusteringTest, ClassifyAndDistances)
{
    const std::vector<GeoPoint> pts{ kCenter, offset_by_meters(kCenter, 20.0, 0.0), offset_by_meters(kCenter, 3000.0, 0.0) };
    const OfflineClustering c(pts, params());
    EXPECT_EQ(c.live_labels(), (std::set<ClusterLabel>{ L(0) }));
    EXPECT_EQ(c.classify(offset_by_meters(kCenter, 50.0, 0.0)), L(0));
    EXPECT_EQ(c.classify(offset_by_meters(kCenter, 500.0, 0.0)), ClusterLabel::outlier());
    const auto d = c.distances_to_clusters(offset_by_meters(kCenter, 95.0, 0.0));
    ASSERT_EQ(d.size(), 1u);
    EXPECT_NEAR(d.at(L(0)), 75.0, 0.01);
}

TEST(SourceLabel, NearestWithinReachAndMargin)
{
    const auto p = params();
    EXPECT_EQ(assign_source_label({ { L(0), 50.0 }, { L(1), 200.0 } }, p), L(0));
    EXPECT_EQ(assign_source_label({ { L(0), 100.0 }, { L(1), 150.0 } }, p), ClusterLabel::outlier());
    EXPECT_EQ(assign_source_label({ { L(0), 80.0 } }, p), L(0));
    EXPECT_EQ(assign_source_label({ { L(0), 600.0 } }, p), ClusterLabel::outlier());
    EXPECT_EQ(assign_source_label({}, p), ClusterLabel::outlier());
    EXPECT_EQ(assign_source_label({ { L(0), 600.0 }, { L(1), 5000.0 } }, p), ClusterLabel::outlier());
    EXPECT_EQ(assign_source_label({ { L(0), 0.0 }, { L(1), 10.0 } }, p), L(0));
    EXPECT_EQ(assign_source_label({ { L(0), 0.0 }, { L(1), 0.0 } }, p), ClusterLabel::outlier());
    // Exactly delta times closer is not enough.
    EXPECT_EQ(assign_source_label({ { L(0), 50.0 }, { L(1), 100.0 } }, p), ClusterLabel::outlier());
}

TEST(ClusterParamsTest, Validate)
{
    EXPECT_NO_THROW(params().validate());
    auto p = params();
    p.min_pts = 1;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = params();
    p.radii_fraction = 1.5;
    EXPECT_THROW(p.validate(), std::invalid_argument);
    p = params();
    p.delta = 1.0;
    EXPECT_THROW(p.validate(), std::invalid_argument);
}
