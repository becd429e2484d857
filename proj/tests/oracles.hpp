// Independent reference computations used to check the library. These use
// different formulations from the production code on purpose: vector
// geometry instead of haversine, wavelength instead of 4*pi*d*f/c, explicit
// phasor sums instead of the closed-form array factor.
#ifndef RAILWARN_TESTS_ORACLES_HPP
#define RAILWARN_TESTS_ORACLES_HPP

#include <array>
#include <cmath>
#include <complex>
#include <numbers>

namespace oracle {

inline constexpr double kR = 6371008.8;
inline constexpr double kC = 299792458.0;

inline double rad(double deg) { return deg * std::numbers::pi / 180.0; }
inline double deg(double rad) { return rad * 180.0 / std::numbers::pi; }

inline std::array<double, 3> unit(double lat, double lon) {
    return {std::cos(rad(lat)) * std::cos(rad(lon)), std::cos(rad(lat)) * std::sin(rad(lon)), std::sin(rad(lat))};
}

// Central angle via atan2(|a x b|, a . b), well conditioned at all ranges.
inline double distance(double lat1, double lon1, double lat2, double lon2) {
    const auto a = unit(lat1, lon1);
    const auto b = unit(lat2, lon2);
    const std::array<double, 3> x{a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
    const double cross = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    const double dot = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    return kR * std::atan2(cross, dot);
}

// Bearing from local east/north components of b - a projected at a.
inline double bearing(double lat1, double lon1, double lat2, double lon2) {
    const auto a = unit(lat1, lon1);
    const auto b = unit(lat2, lon2);
    const std::array<double, 3> east{-std::sin(rad(lon1)), std::cos(rad(lon1)), 0.0};
    const std::array<double, 3> north{-std::sin(rad(lat1)) * std::cos(rad(lon1)),
                                      -std::sin(rad(lat1)) * std::sin(rad(lon1)), std::cos(rad(lat1))};
    double e = 0, n = 0;
    for (int i = 0; i < 3; ++i) {
        e += (b[i] - a[i]) * east[i];
        n += (b[i] - a[i]) * north[i];
    }
    const double brg = deg(std::atan2(e, n));
    return brg < 0 ? brg + 360.0 : brg;
}

// Point reached travelling `d` metres from (lat, lon) on initial bearing brg.
inline std::array<double, 2> destination(double lat, double lon, double brg, double d) {
    const double p1 = rad(lat), l1 = rad(lon), b = rad(brg), dr = d / kR;
    const double p2 = std::asin(std::sin(p1) * std::cos(dr) + std::cos(p1) * std::sin(dr) * std::cos(b));
    const double l2 =
        l1 + std::atan2(std::sin(b) * std::sin(dr) * std::cos(p1), std::cos(dr) - std::sin(p1) * std::sin(p2));
    return {deg(p2), deg(l2)};
}

inline double fspl_db(double d, double f) {
    const double lambda = kC / f;
    return 20.0 * std::log10(4.0 * std::numbers::pi * d / lambda);
}

// Free-space distance at which a link budget (dB above the 1 m loss) runs out.
inline double free_space_range(double budget_db, double f) {
    return std::pow(10.0, (budget_db - fspl_db(1.0, f)) / 20.0);
}

// |sum_k exp(j k psi)| / N in dB, psi = 2 pi d sin(theta), no clamp.
inline double phasor_af_db(int n, double spacing_wl, double offset_deg) {
    const double psi = 2.0 * std::numbers::pi * spacing_wl * std::sin(rad(offset_deg));
    std::complex<double> sum{0.0, 0.0};
    for (int k = 0; k < n; ++k)
        sum += std::polar(1.0, k * psi);
    return 20.0 * std::log10(std::abs(sum) / n);
}

} // namespace oracle

#endif
