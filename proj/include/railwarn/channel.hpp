#ifndef RAILWARN_CHANNEL_HPP
#define RAILWARN_CHANNEL_HPP

#include "railwarn/antenna.hpp"
#include "railwarn/geo.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace railwarn::channel {

inline constexpr double kSpeedOfLight = 299792458.0;
inline constexpr double kDsrcFrequencyHz = 5.9e9;

/// DSRC transmit power levels (dBm).
inline constexpr double kPrivatePowerDbm = 11.0;
inline constexpr double kPublicSafetyPowerDbm = 23.0;

class ChannelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class PowerClass { Private, PublicSafety };

double nominal_power_dbm(PowerClass pc) noexcept;
std::string_view to_string(PowerClass pc) noexcept;

struct RadioConfig {
    PowerClass power_class = PowerClass::PublicSafety;
    double tx_power_dbm = kPublicSafetyPowerDbm;
    /// Allows tx_power_dbm to differ from the power class level.
    bool override_tx_power = false;
    double frequency_hz = kDsrcFrequencyHz;
    std::string mcs_id = "MCS2";

    static RadioConfig for_class(PowerClass pc, std::string mcs = "MCS2");

    /// Human-readable violations; empty when valid.
    std::vector<std::string> violations() const;
};

enum class PathLossKind { FreeSpace, LogDistance };

struct PathLossModel {
    PathLossKind kind = PathLossKind::FreeSpace;
    double exponent = 2.0;
    double reference_distance_m = 1.0;
    double shadowing_sigma_db = 0.0;

    std::vector<std::string> violations() const;
};

/// Minimum decodable receive power per MCS (dBm).
class SensitivityTable {
public:
    SensitivityTable() = default;
    explicit SensitivityTable(std::map<std::string, double> entries) : entries_(std::move(entries)) {}

    /// MCS0 -94, MCS2 -88, MCS4 -82 dBm (10 MHz channel, typical receivers).
    static SensitivityTable defaults();

    bool contains(const std::string& mcs_id) const { return entries_.count(mcs_id) != 0; }

    /// Throws ChannelError("MCS not in sensitivity table").
    double sensitivity_dbm(const std::string& mcs_id) const;

    const std::map<std::string, double>& entries() const noexcept { return entries_; }

private:
    std::map<std::string, double> entries_;
};

/// 20*log10(4 pi d f / c).
double free_space_path_loss_db(double distance_m, double frequency_hz);

/**
 * Path loss at `distance_m`; distances below the reference distance are
 * clamped to it. `standard_normal_draw` is a N(0,1) sample scaled by the
 * model's shadowing sigma (log-distance only); pass nullopt for the median.
 */
double path_loss_db(const PathLossModel& model, double distance_m, double frequency_hz,
                    std::optional<double> standard_normal_draw = std::nullopt);

/// An antenna at a position. The pattern's boresight is a true bearing.
struct Endpoint {
    geo::GeoPoint position;
    antenna::AntennaPattern pattern;
};

/// tx power + both antenna gains along the great-circle bearing - path loss.
/// Throws ChannelError("degenerate link geometry") if the positions coincide.
double received_power_dbm(const RadioConfig& tx, const Endpoint& from, const Endpoint& to,
                          const PathLossModel& model, std::optional<double> standard_normal_draw = std::nullopt);

/// Hard threshold; exact equality decodes.
bool packet_success(double prx_dbm, const SensitivityTable& table, const std::string& mcs_id);

/// Logistic reception probability 1 / (1 + exp(-slope (prx - sens))).
double success_probability(double prx_dbm, double sensitivity_dbm, double slope_per_db) noexcept;

/// Identifies one (packet, receiver, hop) link for per-packet random draws.
struct LinkKey {
    std::uint64_t scenario_seed = 0;
    std::uint64_t packet_seq = 0;
    std::string_view receiver_id;
    std::uint32_t hop = 0; // 0 = direct from train, 1 = relay
};

/// Independent, order-free random draws for a single link.
struct LinkDraws {
    double shadowing_normal; // N(0, 1)
    double reception_uniform; // U[0, 1)
};

LinkDraws draw_for_link(const LinkKey& key);

} // namespace railwarn::channel

#endif // RAILWARN_CHANNEL_HPP
