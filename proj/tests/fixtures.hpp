// Scenario builders shared by the unit and acceptance tests.
#ifndef RAILWARN_TESTS_FIXTURES_HPP
#define RAILWARN_TESTS_FIXTURES_HPP

#include "oracles.hpp"

#include "railwarn/sim.hpp"

#include <string>

namespace fixture {

using namespace railwarn;

inline geo::GeoPoint at(double lat, double lon) { return {lat, lon}; }

inline geo::GeoPoint offset(const geo::GeoPoint& from, double bearing_deg, double metres) {
    const auto p = oracle::destination(from.lat(), from.lon(), bearing_deg, metres);
    return {p[0], p[1]};
}

inline const geo::GeoPoint kOrigin{38.48, -104.35};

// Straight southbound track of `length` metres starting at kOrigin.
inline geo::Polyline south_track(double length) { return geo::Polyline({kOrigin, offset(kOrigin, 180.0, length)}); }

// Free-space, threshold, one stationary train at the track start, no
// receivers yet. Callers add an RSU / OBUs.
inline sim::Scenario base(double track_length = 5000.0, std::int64_t duration_ms = 1000) {
    sim::Scenario s{.track = south_track(track_length), .crossing_arclength_m = track_length / 2};
    s.train.id = "train";
    s.train.radio = channel::RadioConfig::for_class(channel::PowerClass::Private);
    s.duration_ms = duration_ms;
    s.seed = 1;
    return s;
}

inline sim::ObuSpec obu(std::string id, std::size_t road, double s = 0.0, double speed = 0.0,
                        double gain_dbi = 0.0) {
    sim::ObuSpec o;
    o.id = std::move(id);
    o.road = road;
    o.initial_arclength_m = s;
    o.speed_mps = speed;
    o.antenna = antenna::AntennaPattern::omni(gain_dbi);
    return o;
}

inline sim::RsuSpec rsu(const geo::GeoPoint& where, channel::PowerClass pc = channel::PowerClass::PublicSafety) {
    sim::RsuSpec r;
    r.position = where;
    r.radio = channel::RadioConfig::for_class(pc);
    return r;
}

} // namespace fixture

#endif
