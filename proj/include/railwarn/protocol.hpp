#ifndef RAILWARN_PROTOCOL_HPP
#define RAILWARN_PROTOCOL_HPP

#include "railwarn/geo.hpp"

#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <utility>

namespace railwarn::protocol {

inline constexpr std::int64_t kDefaultBroadcastPeriodMs = 100;
inline constexpr std::int64_t kDefaultHoldTimeMs = 3000;
inline constexpr double kDefaultClearMarginM = 100.0;

/// Broadcast safety payload from the locomotive, possibly relayed once.
struct WarningMessage {
    std::string train_id;
    std::uint64_t seq = 0;
    geo::GeoPoint position{0.0, 0.0};
    double speed_mps = 0.0;
    double heading_deg = 0.0;
    std::int64_t timestamp_ms = 0;
    bool relayed = false;
    std::optional<std::string> relay_id; // present iff relayed

    bool operator==(const WarningMessage&) const = default;
};

/// True while the train has not yet travelled clear_margin past the
/// crossing. Travel is assumed to be toward increasing arclength.
bool warning_active(double train_arclength_m, double crossing_arclength_m, double clear_margin_m) noexcept;

struct TrainState {
    std::string train_id;
    double arclength_m = 0.0;
    double speed_mps = 0.0;
    geo::GeoPoint position{0.0, 0.0};
    double heading_deg = 0.0;
    bool warning_active = false;
    std::uint64_t next_seq = 0;
};

/// Emits the next original message when the warning is active and now_ms
/// falls on a broadcast epoch; advances state.next_seq on emission.
std::optional<WarningMessage> next_broadcast(TrainState& state, std::int64_t now_ms, std::int64_t period_ms);

struct RsuState {
    std::string rsu_id;
    geo::GeoPoint position{0.0, 0.0};
    bool relay_enabled = true;
    std::set<std::pair<std::string, std::uint64_t>> seen;
};

/// Relay copy of a first-heard original message, or nothing. Relayed
/// messages are never relayed again.
std::optional<WarningMessage> rsu_ingest(RsuState& state, const WarningMessage& msg);

struct ObuState {
    std::string obu_id;
    std::int64_t hold_time_ms = kDefaultHoldTimeMs;
    bool warning_active = false;
    std::optional<std::int64_t> last_msg_time_ms;

    /// (now - last message) <= hold time, given at least one message.
    bool active_at(std::int64_t now_ms) const noexcept;
};

ObuState obu_ingest(ObuState state, const WarningMessage& msg, std::int64_t now_ms);

/// Re-evaluates warning_active at now_ms without a new message.
ObuState obu_refresh(ObuState state, std::int64_t now_ms);

} // namespace railwarn::protocol

#endif // RAILWARN_PROTOCOL_HPP
