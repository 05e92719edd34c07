#ifndef CITYNET_GEO_HPP
#define CITYNET_GEO_HPP

namespace citynet {

/// IUGG mean Earth radius, meters.
inline constexpr double kEarthRadiusM = 6371008.8;

/// A point on the Earth's surface. Construction validates that latitude is
/// within [-90, 90], longitude within [-180, 180], and both are finite.
class GeoPoint {
public:
    GeoPoint(double lat_deg, double lon_deg);

    double lat() const { return lat_; }
    double lon() const { return lon_; }

    friend bool operator==(const GeoPoint&, const GeoPoint&) = default;

private:
    double lat_;
    double lon_;
};

/// Haversine distance in meters on a sphere of radius kEarthRadiusM.
double great_circle_distance(const GeoPoint& a, const GeoPoint& b);

}  // namespace citynet

#endif
