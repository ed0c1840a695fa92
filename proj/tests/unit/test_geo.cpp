#include "tripcast/geo.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

using namespace tripcast;

namespace {

// Central-angle values from an independent cross-product oracle.
constexpr double kGothenburgPairM = 1508.8298903803877;
constexpr double kHalfCircumferenceM = 20015114.442035925;

} // namespace

TEST(Geo, GothenburgPair)
{
    const GeoPoint a{ 57.7089, 11.9746 };
    const GeoPoint b{ 57.7089, 12.0 };
    EXPECT_NEAR(haversine_distance(a, b), kGothenburgPairM, 1e-6);
}

TEST(Geo, AntipodalOnEquatorIsHalfCircumference)
{
    const double d = haversine_distance({ 0.0, 0.0 }, { 0.0, 180.0 });
    EXPECT_NEAR(d, kHalfCircumferenceM, 1e-6);
    EXPECT_NEAR(d, std::numbers::pi * kEarthRadiusM, 1e-6);
}

TEST(Geo, IdenticalPointsAreZero)
{
    const GeoPoint p{ 57.7, 11.97 };
    EXPECT_EQ(haversine_distance(p, p), 0.0);
}

TEST(Geo, SymmetricAndTriangle)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> lat(-89.0, 89.0);
    std::uniform_real_distribution<double> lon(-180.0, 180.0);
    for (int i = 0; i < 1000; ++i) {
        const GeoPoint a{ lat(rng), lon(rng) };
        const GeoPoint b{ lat(rng), lon(rng) };
        const GeoPoint c{ lat(rng), lon(rng) };
        EXPECT_EQ(haversine_distance(a, b), haversine_distance(b, a));
        EXPECT_LE(haversine_distance(a, c), haversine_distance(a, b) + haversine_distance(b, c) + 1e-6);
        EXPECT_LE(haversine_distance(a, b), std::numbers::pi * kEarthRadiusM + 1e-6);
    }
}

TEST(Geo, CheckedRejectsOutOfRange)
{
    EXPECT_THROW(GeoPoint::checked(91.0, 0.0), std::invalid_argument);
    EXPECT_THROW(GeoPoint::checked(0.0, 181.0), std::invalid_argument);
    EXPECT_THROW(GeoPoint::checked(std::nan(""), 0.0), std::invalid_argument);
    EXPECT_NO_THROW(GeoPoint::checked(-90.0, -180.0));
}

TEST(Geo, OffsetByMetersMatchesDistance)
{
    const GeoPoint origin{ 57.7089, 11.9746 };
    const auto east = offset_by_meters(origin, 100.0, 0.0);
    const auto north = offset_by_meters(origin, 0.0, 250.0);
    EXPECT_NEAR(haversine_distance(origin, east), 100.0, 0.05);
    EXPECT_NEAR(haversine_distance(origin, north), 250.0, 0.05);
    EXPECT_EQ(offset_by_meters(origin, 0.0, 0.0), origin);
}

TEST(Geo, OffsetWrapsLongitude)
{
    const auto p = offset_by_meters({ 0.0, 179.9999 }, 1000.0, 0.0);
    EXPECT_TRUE(p.is_valid());
    EXPECT_LT(p.lon, 0.0);
}

TEST(Geo, WeightedCenter)
{
    const std::vector<GeoPoint> pts{ { 10.0, 20.0 }, { 10.0, 20.002 } };
    const std::vector<double> equal{ 1.0, 1.0 };
    const auto mid = weighted_center(pts, equal);
    EXPECT_NEAR(haversine_distance(mid, pts[0]), haversine_distance(mid, pts[1]), 1e-6);

    const std::vector<double> skewed{ 3.0, 1.0 };
    const auto c = weighted_center(pts, skewed);
    EXPECT_NEAR(haversine_distance(c, pts[0]) * 3.0, haversine_distance(c, pts[1]), 1e-3);
}
