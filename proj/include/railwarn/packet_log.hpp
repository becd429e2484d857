#ifndef RAILWARN_PACKET_LOG_HPP
#define RAILWARN_PACKET_LOG_HPP

#include "railwarn/geo.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace railwarn {

enum class ReceiverRole { Rsu, Obu };

struct ReceiverInfo {
    std::string id;
    ReceiverRole role;

    bool operator==(const ReceiverInfo&) const = default;
};

/// Outcome of one broadcast at one receiver.
struct Reception {
    std::string receiver_id;
    bool received = false;
    /// Decoded only through the RSU relay copy.
    bool via_relay = false;
    /// Direct-path receive power; absent for replayed field logs.
    std::optional<double> prx_dbm;
    std::optional<double> relay_prx_dbm;
    /// Transmitter-receiver distance at transmit time, when known.
    std::optional<double> distance_m;

    bool received_direct() const noexcept { return received && !via_relay; }
};

/// Everything that happened to one broadcast. Receptions follow the log's
/// receiver order, one entry per receiver.
struct PacketFate {
    std::uint64_t seq = 0;
    geo::GeoPoint tx_position{0.0, 0.0};
    std::int64_t tx_time_ms = 0;
    std::vector<Reception> receptions;
};

struct TracePoint {
    std::int64_t time_ms;
    geo::GeoPoint position;
};

struct WarningTransition {
    std::int64_t time_ms;
    bool active;
};

/// Output of a simulation run or a field-log replay.
struct SimLog {
    std::string scenario_hash;
    std::vector<ReceiverInfo> receivers;
    std::vector<geo::GeoPoint> rsu_positions;
    std::vector<geo::GeoPoint> obu_positions;
    std::vector<PacketFate> fates; // ordered by (tx_time, seq)
    std::map<std::string, std::vector<TracePoint>> traces;
    std::map<std::string, std::vector<WarningTransition>> warning_timelines;
    /// False for replayed logs, where relay-only saves cannot be told apart.
    bool relay_path_known = true;
};

} // namespace railwarn

#endif // RAILWARN_PACKET_LOG_HPP
