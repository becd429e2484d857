#include "railwarn/protocol.hpp"

namespace railwarn::protocol {

bool warning_active(double train_arclength_m, double crossing_arclength_m, double clear_margin_m) noexcept {
    return train_arclength_m <= crossing_arclength_m + clear_margin_m;
}

std::optional<WarningMessage> next_broadcast(TrainState& state, std::int64_t now_ms, std::int64_t period_ms) {
    if (period_ms <= 0 || !state.warning_active || now_ms % period_ms != 0)
        return std::nullopt;
    WarningMessage msg;
    msg.train_id = state.train_id;
    msg.seq = state.next_seq++;
    msg.position = state.position;
    msg.speed_mps = state.speed_mps;
    msg.heading_deg = state.heading_deg;
    msg.timestamp_ms = now_ms;
    return msg;
}

std::optional<WarningMessage> rsu_ingest(RsuState& state, const WarningMessage& msg) {
    if (!state.relay_enabled || msg.relayed)
        return std::nullopt;
    if (!state.seen.emplace(msg.train_id, msg.seq).second)
        return std::nullopt;
    WarningMessage copy = msg;
    copy.relayed = true;
    copy.relay_id = state.rsu_id;
    return copy;
}

bool ObuState::active_at(std::int64_t now_ms) const noexcept {
    return last_msg_time_ms && now_ms - *last_msg_time_ms <= hold_time_ms;
}

ObuState obu_ingest(ObuState state, const WarningMessage& /*msg*/, std::int64_t now_ms) {
    state.last_msg_time_ms = now_ms;
    state.warning_active = true;
    return state;
}

ObuState obu_refresh(ObuState state, std::int64_t now_ms) {
    state.warning_active = state.active_at(now_ms);
    return state;
}

} // namespace railwarn::protocol
