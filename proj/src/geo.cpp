#include "railwarn/geo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

namespace railwarn::geo {

namespace {

constexpr double kDegToRad = std::numbers::pi / 180.0;
constexpr double kRadToDeg = 180.0 / std::numbers::pi;

using Vec3 = std::array<double, 3>;

Vec3 unit_vector(const GeoPoint& p) noexcept {
    const double lat = p.lat() * kDegToRad;
    const double lon = p.lon() * kDegToRad;
    return {std::cos(lat) * std::cos(lon), std::cos(lat) * std::sin(lon), std::sin(lat)};
}

// Rows are the east, north and up axes of the tangent frame at (lat, lon).
struct Frame {
    Vec3 east, north, up;
};

Frame tangent_frame(const GeoPoint& origin) noexcept {
    const double lat = origin.lat() * kDegToRad;
    const double lon = origin.lon() * kDegToRad;
    const double sl = std::sin(lat), cl = std::cos(lat);
    const double so = std::sin(lon), co = std::cos(lon);
    return {{-so, co, 0.0}, {-sl * co, -sl * so, cl}, {cl * co, cl * so, sl}};
}

double dot(const Vec3& a, const Vec3& b) noexcept {
    return a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
}

Vec3 ecef(const GeoPoint& p) noexcept {
    const Vec3 u = unit_vector(p);
    const double r = kEarthRadius + p.alt();
    return {u[0] * r, u[1] * r, u[2] * r};
}

} // namespace

GeoPoint::GeoPoint(double lat_deg, double lon_deg, double alt_m)
    : lat_(lat_deg), lon_(lon_deg), alt_(alt_m) {
    if (!(lat_deg >= -90.0 && lat_deg <= 90.0))
        throw GeoError("latitude out of range [-90, 90]: " + std::to_string(lat_deg));
    if (!(lon_deg >= -180.0 && lon_deg <= 180.0))
        throw GeoError("longitude out of range [-180, 180]: " + std::to_string(lon_deg));
    if (!std::isfinite(alt_m))
        throw GeoError("altitude must be finite");
}

double EnuVector::norm() const noexcept {
    return std::sqrt(east * east + north * north + up * up);
}

double wrap_360(double deg) noexcept {
    double r = std::fmod(deg, 360.0);
    if (r < 0.0)
        r += 360.0;
    // fmod of a tiny negative value can round up to exactly 360
    return r >= 360.0 ? 0.0 : r;
}

double wrap_180(double deg) noexcept {
    double r = wrap_360(deg);
    return r > 180.0 ? r - 360.0 : r;
}

double haversine_distance(const GeoPoint& a, const GeoPoint& b) noexcept {
    const double dlat = (b.lat() - a.lat()) * kDegToRad;
    const double dlon = (b.lon() - a.lon()) * kDegToRad;
    const double s1 = std::sin(dlat / 2.0);
    const double s2 = std::sin(dlon / 2.0);
    double h = s1 * s1 + std::cos(a.lat() * kDegToRad) * std::cos(b.lat() * kDegToRad) * s2 * s2;
    h = std::clamp(h, 0.0, 1.0);
    return 2.0 * kEarthRadius * std::asin(std::sqrt(h));
}

double bearing(const GeoPoint& a, const GeoPoint& b) {
    if (a.lat() == b.lat() && a.lon() == b.lon())
        throw GeoError("undefined bearing");
    const double lat1 = a.lat() * kDegToRad;
    const double lat2 = b.lat() * kDegToRad;
    const double dlon = (b.lon() - a.lon()) * kDegToRad;
    const double y = std::sin(dlon) * std::cos(lat2);
    const double x = std::cos(lat1) * std::sin(lat2) - std::sin(lat1) * std::cos(lat2) * std::cos(dlon);
    return wrap_360(std::atan2(y, x) * kRadToDeg);
}

EnuVector to_enu(const GeoPoint& origin, const GeoPoint& p) {
    if (haversine_distance(origin, p) > kTangentPlaneRange)
        throw GeoError("out of tangent-plane range");
    const Vec3 o = ecef(origin);
    const Vec3 q = ecef(p);
    const Vec3 d{q[0] - o[0], q[1] - o[1], q[2] - o[2]};
    const Frame f = tangent_frame(origin);
    return {dot(f.east, d), dot(f.north, d), dot(f.up, d)};
}

GeoPoint from_enu(const GeoPoint& origin, const EnuVector& v) {
    if (v.norm() > kTangentPlaneRange)
        throw GeoError("out of tangent-plane range");
    const Vec3 o = ecef(origin);
    const Frame f = tangent_frame(origin);
    Vec3 q{};
    for (int i = 0; i < 3; ++i)
        q[i] = o[i] + f.east[i] * v.east + f.north[i] * v.north + f.up[i] * v.up;
    const double horiz = std::hypot(q[0], q[1]);
    const double r = std::hypot(horiz, q[2]);
    const double lat = std::atan2(q[2], horiz) * kRadToDeg;
    double lon = std::atan2(q[1], q[0]) * kRadToDeg;
    if (lon > 180.0)
        lon -= 360.0;
    return GeoPoint(lat, lon, r - kEarthRadius);
}

Polyline::Polyline(std::vector<GeoPoint> vertices) {
    for (auto& v : vertices) {
        if (!vertices_.empty() && haversine_distance(vertices_.back(), v) == 0.0)
            continue;
        vertices_.push_back(v);
    }
    if (vertices_.size() < 2)
        throw GeoError("polyline needs at least two distinct vertices");
    cumulative_.reserve(vertices_.size());
    cumulative_.push_back(0.0);
    for (std::size_t i = 1; i < vertices_.size(); ++i) {
        cumulative_.push_back(cumulative_.back() + haversine_distance(vertices_[i - 1], vertices_[i]));
        headings_.push_back(bearing(vertices_[i - 1], vertices_[i]));
    }
}

PathPose Polyline::point_at_arclength(double s) const {
    if (!(s >= 0.0 && s <= length()))
        throw GeoError("arclength out of bounds");

    // Segment i spans [cumulative_[i], cumulative_[i+1]); the final vertex
    // belongs to the last segment.
    auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), s);
    std::size_t seg = static_cast<std::size_t>(std::distance(cumulative_.begin(), it));
    seg = std::min(seg == 0 ? 0 : seg - 1, headings_.size() - 1);

    const GeoPoint& a = vertices_[seg];
    const GeoPoint& b = vertices_[seg + 1];
    const double seg_len = cumulative_[seg + 1] - cumulative_[seg];
    const double frac = std::clamp((s - cumulative_[seg]) / seg_len, 0.0, 1.0);
    const double alt = a.alt() + (b.alt() - a.alt()) * frac;

    if (frac == 0.0)
        return {GeoPoint(a.lat(), a.lon(), alt), headings_[seg]};
    if (frac == 1.0)
        return {GeoPoint(b.lat(), b.lon(), alt), headings_[seg]};

    // Spherical linear interpolation between the segment endpoints.
    const Vec3 ua = unit_vector(a);
    const Vec3 ub = unit_vector(b);
    const double omega = seg_len / kEarthRadius;
    const double sin_omega = std::sin(omega);
    const double wa = std::sin((1.0 - frac) * omega) / sin_omega;
    const double wb = std::sin(frac * omega) / sin_omega;
    const Vec3 u{wa * ua[0] + wb * ub[0], wa * ua[1] + wb * ub[1], wa * ua[2] + wb * ub[2]};
    const double lat = std::atan2(u[2], std::hypot(u[0], u[1])) * kRadToDeg;
    const double lon = std::atan2(u[1], u[0]) * kRadToDeg;
    return {GeoPoint(std::clamp(lat, -90.0, 90.0), std::clamp(lon, -180.0, 180.0), alt), headings_[seg]};
}

} // namespace railwarn::geo
