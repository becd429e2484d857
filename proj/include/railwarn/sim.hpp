#ifndef RAILWARN_SIM_HPP
#define RAILWARN_SIM_HPP

#include "railwarn/antenna.hpp"
#include "railwarn/channel.hpp"
#include "railwarn/geo.hpp"
#include "railwarn/packet_log.hpp"
#include "railwarn/protocol.hpp"
#include "railwarn/validation.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace railwarn::sim {

enum class ReceptionModel { Threshold, Logistic };

struct TrainSpec {
    std::string id = "train";
    double initial_arclength_m = 0.0;
    double speed_mps = 0.0;
    channel::RadioConfig radio;
    antenna::AntennaPattern antenna = antenna::AntennaPattern::omni(12.0);
    /// Boresight relative to the direction of travel.
    double mount_offset_deg = 0.0;
    std::int64_t broadcast_period_ms = protocol::kDefaultBroadcastPeriodMs;
    double clear_margin_m = protocol::kDefaultClearMarginM;
};

struct RsuSpec {
    std::string id = "rsu";
    geo::GeoPoint position{0.0, 0.0};
    channel::RadioConfig radio;
    /// Boresight is a true bearing for the fixed RSU.
    antenna::AntennaPattern antenna = antenna::AntennaPattern::omni(12.0);
    bool relay_enabled = true;
    std::int64_t relay_delay_ms = 0;
};

struct ObuSpec {
    std::string id = "obu";
    std::size_t road = 0;
    double initial_arclength_m = 0.0;
    double speed_mps = 0.0;
    channel::RadioConfig radio;
    antenna::AntennaPattern antenna = antenna::AntennaPattern::omni(12.0);
    double mount_offset_deg = 0.0;
    std::int64_t hold_time_ms = protocol::kDefaultHoldTimeMs;
};

struct Scenario {
    geo::Polyline track;
    double crossing_arclength_m = 0.0;
    std::vector<geo::Polyline> roads;
    TrainSpec train;
    std::optional<RsuSpec> rsu;
    std::vector<ObuSpec> obus;
    channel::PathLossModel path_loss;
    channel::SensitivityTable sensitivity = channel::SensitivityTable::defaults();
    ReceptionModel reception = ReceptionModel::Threshold;
    double logistic_slope_per_db = 1.0;
    std::int64_t timestep_ms = 100;
    std::int64_t duration_ms = 0;
    std::uint64_t seed = 0;

    /// Every violated constraint, with the offending field named.
    std::vector<ValidationIssue> validate() const;
};

/// Stable hex digest of every field that influences a run.
std::string scenario_hash(const Scenario& scenario);

enum class EventKind { Broadcast, DirectReception, RelayEmission, RelayReception, WarningChange };

struct Event {
    std::int64_t time_ms;
    EventKind kind;
    std::string unit_id;
    std::uint64_t seq = 0;
    bool value = false; // received / warning active
};

/**
 * Fixed-timestep world. Each step runs, in order: mobility, train broadcast,
 * direct receptions at the RSU and every OBU, relay emission and its
 * receptions at the OBUs, warning-state updates, and the packet-fate append.
 */
class World {
public:
    /// Throws ValidationError if the scenario is invalid.
    explicit World(Scenario scenario);
    World(const World&) = delete;
    World& operator=(const World&) = delete;

    /// Advances the clock by dt_ms, which must equal the scenario timestep.
    std::vector<Event> step(std::int64_t dt_ms);

    std::int64_t now_ms() const noexcept { return now_; }
    const protocol::TrainState& train() const noexcept { return train_; }
    const std::vector<protocol::ObuState>& obu_states() const noexcept { return obu_states_; }
    const SimLog& log() const noexcept { return log_; }
    SimLog take_log() && { return std::move(log_); }

private:
    struct Mobile {
        const geo::Polyline* path;
        double arclength_m;
        double speed_mps;
        geo::GeoPoint position;
        double heading_deg;
    };

    struct PendingRelay {
        std::int64_t due_ms;
        std::size_t fate_index;
        protocol::WarningMessage msg;
    };

    static Mobile place(const geo::Polyline& path, double s, double speed);
    static void advance(Mobile& m, std::int64_t dt_ms);

    double link_prx(const channel::RadioConfig& tx, const channel::Endpoint& from,
                    const channel::Endpoint& to, double shadow_draw) const;
    bool decide(double prx_dbm, const std::string& mcs, double uniform_draw) const;
    channel::Endpoint train_endpoint() const;
    channel::Endpoint obu_endpoint(std::size_t i) const;
    void deliver_relay(const PendingRelay& relay, std::vector<Event>& events);

    Scenario scenario_;
    std::int64_t now_ = 0;
    Mobile train_motion_;
    std::vector<Mobile> obu_motion_;
    protocol::TrainState train_;
    std::optional<protocol::RsuState> rsu_;
    std::vector<protocol::ObuState> obu_states_;
    std::vector<PendingRelay> pending_;
    SimLog log_;
};

/// Runs duration/timestep steps. Identical scenarios give identical logs.
SimLog run(const Scenario& scenario);

} // namespace railwarn::sim

#endif // RAILWARN_SIM_HPP
