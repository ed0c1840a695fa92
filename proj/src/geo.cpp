#include "tripcast/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace tripcast {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

double half_angle_sin_sq(double delta_rad)
{
    const double s = std::sin(delta_rad / 2.0);
    return s * s;
}

} // namespace

bool GeoPoint::is_valid() const
{
    return std::isfinite(lat) && std::isfinite(lon) && lat >= -90.0 && lat <= 90.0 && lon >= -180.0 &&
           lon <= 180.0;
}

GeoPoint GeoPoint::checked(double lat, double lon)
{
    GeoPoint p{ lat, lon };
    if (!p.is_valid()) {
        throw std::invalid_argument("invalid coordinate (" + std::to_string(lat) + ", " + std::to_string(lon) + ")");
    }
    return p;
}

double haversine_distance(const GeoPoint& a, const GeoPoint& b)
{
    const double lat_a = a.lat * kDegToRad;
    const double lat_b = b.lat * kDegToRad;
    const double f1 = half_angle_sin_sq(lat_a - lat_b);
    const double f2 = std::cos(lat_a) * std::cos(lat_b) * half_angle_sin_sq((a.lon - b.lon) * kDegToRad);
    // Commutative products keep the result bit-identical under argument swap.
    const double h = std::clamp(f1 + f2, 0.0, 1.0);
    return 2.0 * kEarthRadiusM * std::asin(std::sqrt(h));
}

GeoPoint offset_by_meters(const GeoPoint& origin, double east_m, double north_m)
{
    const double lat_rad = origin.lat * kDegToRad;
    double lat = origin.lat + (north_m / kEarthRadiusM) * kRadToDeg;
    const double cos_lat = std::max(std::cos(lat_rad), 1e-12);
    double lon = origin.lon + (east_m / (kEarthRadiusM * cos_lat)) * kRadToDeg;
    lat = std::clamp(lat, -90.0, 90.0);
    lon = std::remainder(lon, 360.0);
    return { lat, lon };
}

GeoPoint weighted_center(std::span<const GeoPoint> points, std::span<const double> weights)
{
    if (points.empty() || points.size() != weights.size()) {
        throw std::invalid_argument("weighted_center: points and weights must be non-empty and of equal length");
    }
    double x = 0.0, y = 0.0, z = 0.0;
    for (std::size_t i = 0; i < points.size(); ++i) {
        const double la = points[i].lat * kDegToRad;
        const double lo = points[i].lon * kDegToRad;
        x += weights[i] * std::cos(la) * std::cos(lo);
        y += weights[i] * std::cos(la) * std::sin(lo);
        z += weights[i] * std::sin(la);
    }
    const double horiz = std::hypot(x, y);
    if (horiz == 0.0 && z == 0.0) {
        return points.front();
    }
    return { std::atan2(z, horiz) * kRadToDeg, std::atan2(y, x) * kRadToDeg };
}

} // namespace tripcast
