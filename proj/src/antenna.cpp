#include "railwarn/antenna.hpp"

#include "railwarn/geo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace railwarn::antenna {

namespace {

double closed_form_af_db(int n, double spacing, double offset_deg) noexcept {
    if (n == 1)
        return 0.0;
    const double psi = 2.0 * std::numbers::pi * spacing * std::sin(offset_deg * std::numbers::pi / 180.0);
    const double den = n * std::sin(psi / 2.0);
    double mag = 1.0;
    // psi at a multiple of 2 pi: every element adds in phase (limit value 1)
    if (std::abs(den) > 1e-12)
        mag = std::abs(std::sin(n * psi / 2.0) / den);
    if (mag <= 0.0)
        return kArrayFactorFloorDb;
    return std::max(20.0 * std::log10(mag), kArrayFactorFloorDb);
}

} // namespace

AntennaPattern AntennaPattern::omni(double element_gain_dbi, double feed_loss_db) {
    if (!std::isfinite(element_gain_dbi))
        throw AntennaError("element gain must be finite");
    if (!(feed_loss_db >= 0.0))
        throw AntennaError("feed loss must be >= 0 dB");
    AntennaPattern p;
    p.kind_ = AntennaKind::Omni;
    p.element_gain_ = element_gain_dbi;
    p.feed_loss_ = feed_loss_db;
    return p;
}

AntennaPattern AntennaPattern::uniform_linear_array(int num_elements, double element_spacing_wl,
                                                    double element_gain_dbi, double boresight_deg,
                                                    double feed_loss_db) {
    if (num_elements < 1)
        throw AntennaError("num_elements must be >= 1, got " + std::to_string(num_elements));
    if (!(element_spacing_wl > 0.0 && element_spacing_wl <= 1.0))
        throw AntennaError("element spacing must be in (0, 1] wavelengths, got " +
                           std::to_string(element_spacing_wl));
    if (!std::isfinite(boresight_deg))
        throw AntennaError("boresight must be finite");
    AntennaPattern p = omni(element_gain_dbi, feed_loss_db);
    p.kind_ = AntennaKind::UniformLinearArray;
    p.num_elements_ = num_elements;
    p.spacing_ = element_spacing_wl;
    p.boresight_ = geo::wrap_360(boresight_deg);
    return p;
}

AntennaPattern AntennaPattern::oriented(double heading_deg) const {
    AntennaPattern p = *this;
    p.boresight_ = geo::wrap_360(heading_deg);
    return p;
}

double AntennaPattern::peak_gain_dbi() const noexcept {
    if (kind_ == AntennaKind::Omni)
        return element_gain_ - feed_loss_;
    return element_gain_ + 20.0 * std::log10(static_cast<double>(num_elements_)) - feed_loss_;
}

double array_factor_db(const AntennaPattern& pattern, double offset_from_boresight_deg) {
    if (pattern.kind() != AntennaKind::UniformLinearArray)
        throw AntennaError("pattern has no array factor");
    return closed_form_af_db(pattern.num_elements(), pattern.element_spacing_wl(), offset_from_boresight_deg);
}

double gain_dbi(const AntennaPattern& pattern, double toward_deg) noexcept {
    if (pattern.kind() == AntennaKind::Omni)
        return pattern.peak_gain_dbi();
    const double offset = geo::wrap_180(toward_deg - pattern.boresight_deg());
    return pattern.peak_gain_dbi() +
           closed_form_af_db(pattern.num_elements(), pattern.element_spacing_wl(), offset);
}

} // namespace railwarn::antenna
