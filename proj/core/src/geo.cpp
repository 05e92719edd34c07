#include "citynet/geo.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace citynet {

namespace {

constexpr double kPi = 3.14159265358979323846;

double to_rad(double deg) { return deg * kPi / 180.0; }

}  // namespace

GeoPoint::GeoPoint(double lat_deg, double lon_deg) : lat_(lat_deg), lon_(lon_deg) {
    if (!std::isfinite(lat_deg) || lat_deg < -90.0 || lat_deg > 90.0) {
        throw std::invalid_argument("latitude out of range [-90, 90]: " + std::to_string(lat_deg));
    }
    if (!std::isfinite(lon_deg) || lon_deg < -180.0 || lon_deg > 180.0) {
        throw std::invalid_argument("longitude out of range [-180, 180]: " +
                                    std::to_string(lon_deg));
    }
}

double great_circle_distance(const GeoPoint& a, const GeoPoint& b) {
    const double lat1 = to_rad(a.lat());
    const double lat2 = to_rad(b.lat());
    const double dlat = to_rad(b.lat() - a.lat());
    const double dlon = to_rad(b.lon() - a.lon());

    const double sin_lat = std::sin(dlat / 2.0);
    const double sin_lon = std::sin(dlon / 2.0);
    double h = sin_lat * sin_lat + std::cos(lat1) * std::cos(lat2) * sin_lon * sin_lon;

    // Rounding can push h just past 1 for near-antipodal points.
    if (h > 1.0) h = 1.0;
    if (h < 0.0) h = 0.0;

    return 2.0 * kEarthRadiusM * std::atan2(std::sqrt(h), std::sqrt(1.0 - h));
}

}  // namespace citynet
