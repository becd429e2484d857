#include "railwarn/sim.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <set>

namespace railwarn::sim {

namespace {

using channel::Endpoint;

void check_radio(const channel::RadioConfig& radio, const channel::SensitivityTable& table,
                 const std::string& path, std::vector<ValidationIssue>& out) {
    for (auto& v : radio.violations())
        out.push_back({path, v});
    if (!radio.mcs_id.empty() && !table.contains(radio.mcs_id))
        out.push_back({path + ".mcs", "MCS not in sensitivity table: " + radio.mcs_id});
}

class Fingerprint {
public:
    Fingerprint& operator<<(double v) {
        char buf[32];
        auto res = std::to_chars(buf, buf + sizeof buf, v);
        text_.append(buf, res.ptr);
        text_ += ';';
        return *this;
    }
    Fingerprint& operator<<(std::int64_t v) { return *this << std::to_string(v); }
    Fingerprint& operator<<(std::uint64_t v) { return *this << std::to_string(v); }
    Fingerprint& operator<<(bool v) { return *this << std::string(v ? "T" : "F"); }
    Fingerprint& operator<<(const std::string& s) {
        text_ += std::to_string(s.size());
        text_ += ':';
        text_ += s;
        text_ += ';';
        return *this;
    }
    Fingerprint& operator<<(const geo::GeoPoint& p) { return *this << p.lat() << p.lon() << p.alt(); }
    Fingerprint& operator<<(const geo::Polyline& line) {
        *this << static_cast<std::uint64_t>(line.vertices().size());
        for (const auto& v : line.vertices())
            *this << v;
        return *this;
    }
    Fingerprint& operator<<(const channel::RadioConfig& r) {
        return *this << std::string(channel::to_string(r.power_class)) << r.tx_power_dbm << r.override_tx_power
                     << r.frequency_hz << r.mcs_id;
    }
    Fingerprint& operator<<(const antenna::AntennaPattern& a) {
        return *this << static_cast<std::int64_t>(a.kind()) << a.element_gain_dbi()
                     << static_cast<std::int64_t>(a.num_elements()) << a.element_spacing_wl() << a.boresight_deg()
                     << a.feed_loss_db();
    }

    std::string digest() const {
        std::uint64_t h = 0xcbf29ce484222325ULL;
        for (unsigned char c : text_) {
            h ^= c;
            h *= 0x100000001b3ULL;
        }
        char buf[17];
        std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
        return buf;
    }

private:
    std::string text_;
};

} // namespace

std::vector<ValidationIssue> Scenario::validate() const {
    std::vector<ValidationIssue> out;
    if (timestep_ms <= 0)
        out.push_back({"timestep_ms", "must be > 0"});
    if (duration_ms < 0)
        out.push_back({"duration_ms", "must be >= 0"});
    if (timestep_ms > 0 && duration_ms % timestep_ms != 0)
        out.push_back({"duration_ms", "must be a multiple of timestep_ms"});
    if (!(crossing_arclength_m >= 0.0 && crossing_arclength_m <= track.length()))
        out.push_back({"crossing_arclength_m", "outside track bounds [0, " + std::to_string(track.length()) + "]"});

    if (train.id.empty())
        out.push_back({"train.id", "must not be empty"});
    if (!(train.initial_arclength_m >= 0.0 && train.initial_arclength_m <= track.length()))
        out.push_back({"train.initial_arclength_m", "outside track bounds"});
    if (!(train.speed_mps >= 0.0 && std::isfinite(train.speed_mps)))
        out.push_back({"train.speed_mps", "must be finite and >= 0"});
    if (!(train.clear_margin_m >= 0.0))
        out.push_back({"train.clear_margin_m", "must be >= 0"});
    if (train.broadcast_period_ms <= 0)
        out.push_back({"train.broadcast_period_ms", "must be > 0"});
    else if (timestep_ms > 0 && train.broadcast_period_ms % timestep_ms != 0)
        out.push_back({"train.broadcast_period_ms", "timestep_ms must divide the broadcast period"});
    check_radio(train.radio, sensitivity, "train.radio", out);

    std::set<std::string> ids{train.id};
    if (rsu) {
        check_radio(rsu->radio, sensitivity, "rsu.radio", out);
        if (rsu->id.empty() || !ids.insert(rsu->id).second)
            out.push_back({"rsu.id", "must be non-empty and unique"});
        if (rsu->relay_delay_ms < 0 || (timestep_ms > 0 && rsu->relay_delay_ms % timestep_ms != 0))
            out.push_back({"rsu.relay_delay_ms", "must be a non-negative multiple of timestep_ms"});
    }
    for (std::size_t i = 0; i < obus.size(); ++i) {
        const auto& o = obus[i];
        const std::string p = "obus[" + std::to_string(i) + "]";
        if (o.id.empty() || !ids.insert(o.id).second)
            out.push_back({p + ".id", "must be non-empty and unique"});
        if (o.road >= roads.size())
            out.push_back({p + ".road", "no road with index " + std::to_string(o.road)});
        else if (!(o.initial_arclength_m >= 0.0 && o.initial_arclength_m <= roads[o.road].length()))
            out.push_back({p + ".initial_arclength_m", "outside road bounds"});
        if (!(o.speed_mps >= 0.0 && std::isfinite(o.speed_mps)))
            out.push_back({p + ".speed_mps", "must be finite and >= 0"});
        if (o.hold_time_ms < 0)
            out.push_back({p + ".hold_time_ms", "must be >= 0"});
        check_radio(o.radio, sensitivity, p + ".radio", out);
    }
    if (!rsu && obus.empty())
        out.push_back({"obus", "scenario has no receivers"});

    for (auto& v : path_loss.violations())
        out.push_back({"path_loss", v});
    if (reception == ReceptionModel::Logistic && !(logistic_slope_per_db > 0.0))
        out.push_back({"reception.logistic_slope_per_db", "must be > 0"});
    return out;
}

std::string scenario_hash(const Scenario& s) {
    Fingerprint f;
    f << s.track << s.crossing_arclength_m << static_cast<std::uint64_t>(s.roads.size());
    for (const auto& r : s.roads)
        f << r;
    f << s.train.id << s.train.initial_arclength_m << s.train.speed_mps << s.train.radio << s.train.antenna
      << s.train.mount_offset_deg << s.train.broadcast_period_ms << s.train.clear_margin_m;
    f << s.rsu.has_value();
    if (s.rsu)
        f << s.rsu->id << s.rsu->position << s.rsu->radio << s.rsu->antenna << s.rsu->relay_enabled
          << s.rsu->relay_delay_ms;
    f << static_cast<std::uint64_t>(s.obus.size());
    for (const auto& o : s.obus)
        f << o.id << static_cast<std::uint64_t>(o.road) << o.initial_arclength_m << o.speed_mps << o.radio
          << o.antenna << o.mount_offset_deg << o.hold_time_ms;
    f << static_cast<std::int64_t>(s.path_loss.kind) << s.path_loss.exponent << s.path_loss.reference_distance_m
      << s.path_loss.shadowing_sigma_db;
    for (const auto& [mcs, sens] : s.sensitivity.entries())
        f << mcs << sens;
    f << static_cast<std::int64_t>(s.reception) << s.logistic_slope_per_db << s.timestep_ms << s.duration_ms
      << s.seed;
    return f.digest();
}

World::Mobile World::place(const geo::Polyline& path, double s, double speed) {
    auto pose = path.point_at_arclength(s);
    return {&path, s, speed, pose.position, pose.heading_deg};
}

void World::advance(Mobile& m, std::int64_t dt_ms) {
    if (m.speed_mps <= 0.0)
        return;
    double s = m.arclength_m + m.speed_mps * static_cast<double>(dt_ms) / 1000.0;
    if (s >= m.path->length()) {
        s = m.path->length();
        m.speed_mps = 0.0;
    }
    m.arclength_m = s;
    auto pose = m.path->point_at_arclength(s);
    m.position = pose.position;
    m.heading_deg = pose.heading_deg;
}

World::World(Scenario scenario)
    : scenario_(std::move(scenario)),
      train_motion_(place(scenario_.track, 0.0, 0.0)) {
    if (auto issues = scenario_.validate(); !issues.empty())
        throw ValidationError(std::move(issues));

    train_motion_ = place(scenario_.track, scenario_.train.initial_arclength_m, scenario_.train.speed_mps);
    train_.train_id = scenario_.train.id;
    train_.arclength_m = train_motion_.arclength_m;
    train_.speed_mps = train_motion_.speed_mps;
    train_.position = train_motion_.position;
    train_.heading_deg = train_motion_.heading_deg;
    train_.warning_active = protocol::warning_active(train_.arclength_m, scenario_.crossing_arclength_m,
                                                     scenario_.train.clear_margin_m);

    log_.scenario_hash = scenario_hash(scenario_);
    log_.traces[scenario_.train.id].push_back({0, train_motion_.position});

    if (scenario_.rsu) {
        const auto& spec = *scenario_.rsu;
        rsu_ = protocol::RsuState{spec.id, spec.position, spec.relay_enabled, {}};
        log_.receivers.push_back({spec.id, ReceiverRole::Rsu});
        log_.rsu_positions.push_back(spec.position);
        log_.traces[spec.id].push_back({0, spec.position});
    }
    for (const auto& spec : scenario_.obus) {
        obu_motion_.push_back(place(scenario_.roads[spec.road], spec.initial_arclength_m, spec.speed_mps));
        protocol::ObuState st;
        st.obu_id = spec.id;
        st.hold_time_ms = spec.hold_time_ms;
        obu_states_.push_back(st);
        log_.receivers.push_back({spec.id, ReceiverRole::Obu});
        log_.obu_positions.push_back(obu_motion_.back().position);
        log_.traces[spec.id].push_back({0, obu_motion_.back().position});
        log_.warning_timelines[spec.id].push_back({0, false});
    }
}

Endpoint World::train_endpoint() const {
    return {train_motion_.position,
            scenario_.train.antenna.oriented(train_motion_.heading_deg + scenario_.train.mount_offset_deg)};
}

Endpoint World::obu_endpoint(std::size_t i) const {
    const auto& spec = scenario_.obus[i];
    return {obu_motion_[i].position, spec.antenna.oriented(obu_motion_[i].heading_deg + spec.mount_offset_deg)};
}

double World::link_prx(const channel::RadioConfig& tx, const Endpoint& from, const Endpoint& to,
                       double shadow_draw) const {
    if (from.position.lat() == to.position.lat() && from.position.lon() == to.position.lon()) {
        // Co-located units: no bearing exists, so take both peaks at the
        // reference distance.
        return tx.tx_power_dbm + from.pattern.peak_gain_dbi() + to.pattern.peak_gain_dbi() -
               channel::path_loss_db(scenario_.path_loss, 0.0, tx.frequency_hz, shadow_draw);
    }
    return channel::received_power_dbm(tx, from, to, scenario_.path_loss, shadow_draw);
}

bool World::decide(double prx_dbm, const std::string& mcs, double uniform_draw) const {
    if (scenario_.reception == ReceptionModel::Threshold)
        return channel::packet_success(prx_dbm, scenario_.sensitivity, mcs);
    const double p = channel::success_probability(prx_dbm, scenario_.sensitivity.sensitivity_dbm(mcs),
                                                  scenario_.logistic_slope_per_db);
    return uniform_draw < p;
}

void World::deliver_relay(const PendingRelay& relay, std::vector<Event>& events) {
    const auto& spec = *scenario_.rsu;
    const Endpoint from{spec.position, spec.antenna};
    PacketFate& fate = log_.fates[relay.fate_index];
    for (std::size_t i = 0; i < obu_states_.size(); ++i) {
        const auto& id = scenario_.obus[i].id;
        const auto draws = channel::draw_for_link({scenario_.seed, relay.msg.seq, id, 1});
        const double prx = link_prx(spec.radio, from, obu_endpoint(i), draws.shadowing_normal);
        const bool ok = decide(prx, spec.radio.mcs_id, draws.reception_uniform);
        events.push_back({now_, EventKind::RelayReception, id, relay.msg.seq, ok});

        auto rec = std::find_if(fate.receptions.begin(), fate.receptions.end(),
                                [&](const Reception& r) { return r.receiver_id == id; });
        rec->relay_prx_dbm = prx;
        if (ok) {
            if (!rec->received) {
                rec->received = true;
                rec->via_relay = true;
            }
            obu_states_[i] = protocol::obu_ingest(obu_states_[i], relay.msg, now_);
        }
    }
}

std::vector<Event> World::step(std::int64_t dt_ms) {
    if (dt_ms != scenario_.timestep_ms)
        throw std::invalid_argument("step size must equal the scenario timestep");
    std::vector<Event> events;
    now_ += dt_ms;

    // 1. mobility
    advance(train_motion_, dt_ms);
    for (auto& m : obu_motion_)
        advance(m, dt_ms);
    train_.arclength_m = train_motion_.arclength_m;
    train_.speed_mps = train_motion_.speed_mps;
    train_.position = train_motion_.position;
    train_.heading_deg = train_motion_.heading_deg;
    train_.warning_active = protocol::warning_active(train_.arclength_m, scenario_.crossing_arclength_m,
                                                     scenario_.train.clear_margin_m);
    log_.traces[scenario_.train.id].push_back({now_, train_motion_.position});
    for (std::size_t i = 0; i < obu_motion_.size(); ++i)
        log_.traces[scenario_.obus[i].id].push_back({now_, obu_motion_[i].position});

    // 2. broadcast
    std::optional<protocol::WarningMessage> msg =
        protocol::next_broadcast(train_, now_, scenario_.train.broadcast_period_ms);
    std::optional<PendingRelay> fresh_relay;
    if (msg) {
        events.push_back({now_, EventKind::Broadcast, scenario_.train.id, msg->seq, true});
        PacketFate fate;
        fate.seq = msg->seq;
        fate.tx_position = msg->position;
        fate.tx_time_ms = now_;
        const Endpoint tx = train_endpoint();
        const auto& radio = scenario_.train.radio;

        // 3. direct receptions
        if (rsu_) {
            const auto& spec = *scenario_.rsu;
            const auto draws = channel::draw_for_link({scenario_.seed, msg->seq, spec.id, 0});
            Reception r;
            r.receiver_id = spec.id;
            r.prx_dbm = link_prx(radio, tx, {spec.position, spec.antenna}, draws.shadowing_normal);
            r.received = decide(*r.prx_dbm, radio.mcs_id, draws.reception_uniform);
            r.distance_m = geo::haversine_distance(tx.position, spec.position);
            events.push_back({now_, EventKind::DirectReception, spec.id, msg->seq, r.received});
            if (r.received) {
                if (auto copy = protocol::rsu_ingest(*rsu_, *msg)) {
                    events.push_back({now_, EventKind::RelayEmission, spec.id, copy->seq, true});
                    fresh_relay = PendingRelay{now_ + spec.relay_delay_ms, log_.fates.size(), *copy};
                }
            }
            fate.receptions.push_back(std::move(r));
        }
        for (std::size_t i = 0; i < obu_states_.size(); ++i) {
            const auto& id = scenario_.obus[i].id;
            const auto draws = channel::draw_for_link({scenario_.seed, msg->seq, id, 0});
            const Endpoint rx = obu_endpoint(i);
            Reception r;
            r.receiver_id = id;
            r.prx_dbm = link_prx(radio, tx, rx, draws.shadowing_normal);
            r.received = decide(*r.prx_dbm, radio.mcs_id, draws.reception_uniform);
            r.distance_m = geo::haversine_distance(tx.position, rx.position);
            events.push_back({now_, EventKind::DirectReception, id, msg->seq, r.received});
            if (r.received)
                obu_states_[i] = protocol::obu_ingest(obu_states_[i], *msg, now_);
            fate.receptions.push_back(std::move(r));
        }
        log_.fates.push_back(std::move(fate));
    }

    // 4. relay receptions: earlier delayed relays first, then this step's
    if (fresh_relay)
        pending_.push_back(std::move(*fresh_relay));
    auto due_end = std::stable_partition(pending_.begin(), pending_.end(),
                                         [&](const PendingRelay& p) { return p.due_ms <= now_; });
    for (auto it = pending_.begin(); it != due_end; ++it)
        deliver_relay(*it, events);
    pending_.erase(pending_.begin(), due_end);

    // 5. warning states
    for (std::size_t i = 0; i < obu_states_.size(); ++i) {
        const bool before = log_.warning_timelines[obu_states_[i].obu_id].back().active;
        obu_states_[i] = protocol::obu_refresh(obu_states_[i], now_);
        if (obu_states_[i].warning_active != before) {
            log_.warning_timelines[obu_states_[i].obu_id].push_back({now_, obu_states_[i].warning_active});
            events.push_back({now_, EventKind::WarningChange, obu_states_[i].obu_id, 0,
                              obu_states_[i].warning_active});
        }
    }
    return events;
}

SimLog run(const Scenario& scenario) {
    World world(scenario);
    const std::int64_t steps = scenario.duration_ms / scenario.timestep_ms;
    for (std::int64_t i = 0; i < steps; ++i)
        world.step(scenario.timestep_ms);
    return std::move(world).take_log();
}

} // namespace railwarn::sim
