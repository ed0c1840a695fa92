#pragma once

#include <span>

namespace tripcast {

// Mean Earth radius (IUGG), meters.
inline constexpr double kEarthRadiusM = 6371008.8;

// Latitude/longitude in degrees.
struct GeoPoint
{
    double lat{ 0.0 };
    double lon{ 0.0 };

    bool operator==(const GeoPoint&) const = default;

    // Finite, lat in [-90, 90], lon in [-180, 180].
    bool is_valid() const;

    // Throws std::invalid_argument on out-of-range input.
    static GeoPoint checked(double lat, double lon);
};

// Great-circle distance in meters. Symmetric; exactly 0 for identical points.
double haversine_distance(const GeoPoint& a, const GeoPoint& b);

// Moves `origin` by a local east/north displacement in meters using the
// tangent plane at `origin`. Longitude is wrapped into [-180, 180] and
// latitude clamped to the poles.
GeoPoint offset_by_meters(const GeoPoint& origin, double east_m, double north_m);

// Weighted mean position, computed on unit vectors and projected back onto
// the sphere. `points` and `weights` must have equal, non-zero length.
GeoPoint weighted_center(std::span<const GeoPoint> points, std::span<const double> weights);

} // namespace tripcast
