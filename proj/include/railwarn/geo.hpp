#ifndef RAILWARN_GEO_HPP
#define RAILWARN_GEO_HPP

#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace railwarn::geo {

/// Mean radius of the WGS84 ellipsoid (meters). All geodesy here is spherical.
inline constexpr double kEarthRadius = 6371008.8;

/// Maximum separation accepted by the tangent-plane projection (meters).
inline constexpr double kTangentPlaneRange = 100000.0;

class GeoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/**
 * WGS84 latitude/longitude in degrees, with an altitude in meters that is
 * carried along but ignored by distance and bearing computations.
 */
class GeoPoint {
public:
    /// Throws GeoError if lat is outside [-90, 90] or lon outside [-180, 180].
    GeoPoint(double lat_deg, double lon_deg, double alt_m = 0.0);

    double lat() const noexcept { return lat_; }
    double lon() const noexcept { return lon_; }
    double alt() const noexcept { return alt_; }

    bool operator==(const GeoPoint&) const = default;

private:
    double lat_;
    double lon_;
    double alt_;
};

struct EnuVector {
    double east = 0.0;
    double north = 0.0;
    double up = 0.0;

    double norm() const noexcept;
    EnuVector operator*(double k) const noexcept { return {east * k, north * k, up * k}; }
};

/// Great-circle distance on the mean sphere (meters).
double haversine_distance(const GeoPoint& a, const GeoPoint& b) noexcept;

/// Initial great-circle bearing from a to b in [0, 360), clockwise from north.
/// Throws GeoError("undefined bearing") when the points coincide horizontally.
double bearing(const GeoPoint& a, const GeoPoint& b);

/// Local East-North-Up coordinates of p in the tangent frame at origin.
/// Throws GeoError("out of tangent-plane range") beyond 100 km.
EnuVector to_enu(const GeoPoint& origin, const GeoPoint& p);

/// Inverse of to_enu.
GeoPoint from_enu(const GeoPoint& origin, const EnuVector& v);

/// Wraps an angle to [0, 360).
double wrap_360(double deg) noexcept;

/// Wraps an angle to [-180, 180].
double wrap_180(double deg) noexcept;

struct PathPose {
    GeoPoint position;
    double heading_deg;
};

/// Ordered vertices with cumulative arclength. Consecutive duplicate vertices
/// are dropped at construction so every segment has positive length.
class Polyline {
public:
    /// Throws GeoError when fewer than two distinct vertices remain.
    explicit Polyline(std::vector<GeoPoint> vertices);

    std::span<const GeoPoint> vertices() const noexcept { return vertices_; }
    std::span<const double> cumulative_length() const noexcept { return cumulative_; }
    double length() const noexcept { return cumulative_.back(); }

    /// Position and heading at arclength s. Within a segment the position is
    /// interpolated along the great circle and the heading is the segment's
    /// initial bearing; at an interior vertex the outgoing segment wins.
    /// Throws GeoError("arclength out of bounds") unless 0 <= s <= length().
    PathPose point_at_arclength(double s) const;

private:
    std::vector<GeoPoint> vertices_;
    std::vector<double> cumulative_;
    std::vector<double> headings_;
};

} // namespace railwarn::geo

#endif // RAILWARN_GEO_HPP
