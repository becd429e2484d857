#ifndef RAILWARN_ANTENNA_HPP
#define RAILWARN_ANTENNA_HPP

#include <stdexcept>

namespace railwarn::antenna {

/// Lower bound applied to the normalized array factor (dB).
inline constexpr double kArrayFactorFloorDb = -60.0;

/// Default element spacing in wavelengths.
inline constexpr double kDefaultSpacing = 0.5;

class AntennaError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class AntennaKind { Omni, UniformLinearArray };

/**
 * Azimuth-only gain pattern. An omni pattern radiates element_gain in every
 * direction. A uniform linear array is an equal-amplitude, equal-phase
 * (unsteered) broadside array of identical omni elements; its boresight is
 * perpendicular to the array axis.
 */
class AntennaPattern {
public:
    static AntennaPattern omni(double element_gain_dbi, double feed_loss_db = 0.0);

    /// Throws AntennaError unless num_elements >= 1 and spacing is in (0, 1].
    static AntennaPattern uniform_linear_array(int num_elements, double element_spacing_wl,
                                               double element_gain_dbi, double boresight_deg = 0.0,
                                               double feed_loss_db = 0.0);

    AntennaKind kind() const noexcept { return kind_; }
    double element_gain_dbi() const noexcept { return element_gain_; }
    int num_elements() const noexcept { return num_elements_; }
    double element_spacing_wl() const noexcept { return spacing_; }
    double boresight_deg() const noexcept { return boresight_; }
    double feed_loss_db() const noexcept { return feed_loss_; }

    /// Same pattern with boresight pointed at heading_deg (wrapped to [0, 360)).
    AntennaPattern oriented(double heading_deg) const;

    /// Peak gain over azimuth.
    double peak_gain_dbi() const noexcept;

    bool operator==(const AntennaPattern&) const = default;

private:
    AntennaPattern() = default;

    AntennaKind kind_ = AntennaKind::Omni;
    double element_gain_ = 0.0;
    int num_elements_ = 1;
    double spacing_ = kDefaultSpacing;
    double boresight_ = 0.0;
    double feed_loss_ = 0.0;
};

/// Normalized array factor 20*log10|sin(N psi/2) / (N sin(psi/2))| with
/// psi = 2 pi d sin(offset), clamped below at -60 dB. Throws AntennaError
/// ("pattern has no array factor") for omni patterns.
double array_factor_db(const AntennaPattern& pattern, double offset_from_boresight_deg);

/// Gain toward a true bearing. Arrays add the coherent-combining gain
/// 20*log10(N) over a single element; feed loss is subtracted.
double gain_dbi(const AntennaPattern& pattern, double toward_deg) noexcept;

} // namespace railwarn::antenna

#endif // RAILWARN_ANTENNA_HPP
