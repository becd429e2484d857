#include "fixtures.hpp"

#include "railwarn/ingest.hpp"
#include "railwarn/sim.hpp"

#include <doctest.h>

#include <algorithm>
#include <random>

using namespace railwarn;
using namespace railwarn::sim;
using fixture::offset;

namespace {

bool has_issue(const Scenario& s, const std::string& field) {
    const auto issues = s.validate();
    return std::any_of(issues.begin(), issues.end(), [&](const ValidationIssue& i) { return i.field == field; });
}

const Reception& reception(const PacketFate& f, const std::string& id) {
    return *std::find_if(f.receptions.begin(), f.receptions.end(),
                         [&](const Reception& r) { return r.receiver_id == id; });
}

// Train parked at the track start, RSU `rsu_m` metres south of it and a
// stationary OBU `obu_m` metres east of it.
Scenario relay_geometry(double rsu_m, double obu_m) {
    auto s = fixture::base();
    s.train.antenna = antenna::AntennaPattern::omni(12.0);
    s.rsu = fixture::rsu(offset(fixture::kOrigin, 180.0, rsu_m));
    s.roads.emplace_back(std::vector<geo::GeoPoint>{fixture::kOrigin, offset(fixture::kOrigin, 90.0, 5000.0)});
    s.obus.push_back(fixture::obu("car", 0, obu_m));
    return s;
}

} // namespace

TEST_SUITE("sim") {

TEST_CASE("validation names every offending field") {
    auto s = fixture::base();
    CHECK(has_issue(s, "obus")); // no receivers at all

    s.rsu = fixture::rsu(fixture::kOrigin);
    s.rsu->id = "train";
    s.timestep_ms = 30;
    s.duration_ms = 100;
    s.crossing_arclength_m = 1e6;
    s.train.radio.tx_power_dbm = 23.0; // private class without override
    s.train.radio.mcs_id = "MCS9";
    s.obus.push_back(fixture::obu("car", 3));
    s.path_loss = {channel::PathLossKind::LogDistance, 9.0, 1.0, 0.0};
    const auto issues = s.validate();
    CHECK(issues.size() >= 8);
    for (const char* field : {"duration_ms", "crossing_arclength_m", "train.broadcast_period_ms", "rsu.id",
                              "obus[0].road", "path_loss", "train.radio", "train.radio.mcs"})
        CHECK_MESSAGE(has_issue(s, field), field);
    CHECK_THROWS_AS(World{s}, ValidationError);
}

TEST_CASE("zero duration leaves only initial positions") {
    auto s = relay_geometry(50.0, 100.0);
    s.duration_ms = 0;
    const auto log = run(s);
    CHECK(log.fates.empty());
    for (const auto& [id, trace] : log.traces)
        CHECK_MESSAGE(trace.size() == 1, id);
    CHECK(log.receivers.size() == 2);
}

TEST_CASE("step refuses a foreign dt") {
    World w(relay_geometry(50.0, 100.0));
    CHECK_THROWS_AS(w.step(50), std::invalid_argument);
    CHECK_NOTHROW(w.step(100));
    CHECK(w.now_ms() == 100);
}

TEST_CASE("cleared train broadcasts nothing") {
    auto s = relay_geometry(50.0, 100.0);
    s.crossing_arclength_m = 0.0;
    s.train.clear_margin_m = 0.0;
    s.train.initial_arclength_m = 10.0;
    CHECK(run(s).fates.empty());
}

TEST_CASE("relay saves an OBU beyond direct range") {
    // Budgets from the oracle: train 11 dBm + 12 + 0 dBi against -88 dBm
    // reaches ~1435 m; RSU 23 dBm + 12 + 0 dBi reaches ~5.7 km.
    const double direct = oracle::free_space_range(11 + 12 + 0 + 88, 5.9e9);
    const double relay = oracle::free_space_range(23 + 12 + 0 + 88, 5.9e9);
    CHECK(direct == doctest::Approx(1435.3).epsilon(1e-3));
    CHECK(relay == doctest::Approx(5709.0).epsilon(1e-3));

    const auto log = run(relay_geometry(20.0, 2000.0));
    REQUIRE(log.fates.size() == 10);
    for (const auto& f : log.fates) {
        CHECK(reception(f, "rsu").received);
        const auto& car = reception(f, "car");
        CHECK(car.received);
        CHECK(car.via_relay);
        CHECK(*car.prx_dbm < -88.0);
        CHECK(*car.relay_prx_dbm >= -88.0);
    }

    auto off = relay_geometry(20.0, 2000.0);
    off.rsu->relay_enabled = false;
    for (const auto& f : run(off).fates)
        CHECK_FALSE(reception(f, "car").received);
}

TEST_CASE("relay delay defers the relayed reception") {
    auto s = relay_geometry(20.0, 2000.0);
    s.rsu->relay_delay_ms = 300;
    World w(s);
    bool relayed_seen = false;
    for (int i = 0; i < 10; ++i) {
        for (const auto& e : w.step(100)) {
            if (e.kind == EventKind::RelayReception) {
                relayed_seen = true;
                CHECK(e.time_ms == static_cast<std::int64_t>(e.seq + 1) * 100 + 300);
            }
        }
    }
    CHECK(relayed_seen);
    const auto& fates = w.log().fates;
    for (std::size_t i = 0; i + 3 < fates.size(); ++i)
        CHECK(reception(fates[i], "car").via_relay);
}

TEST_CASE("fates are ordered and cover every active broadcast epoch") {
    auto s = relay_geometry(20.0, 300.0);
    s.train.speed_mps = 27.0;
    s.train.broadcast_period_ms = 300;
    s.crossing_arclength_m = 400.0;
    s.train.clear_margin_m = 50.0;
    s.duration_ms = 60000;
    const auto log = run(s);

    std::size_t expected = 0;
    for (std::int64_t t = 100; t <= s.duration_ms; t += 100) {
        const double at = std::min(27.0 * static_cast<double>(t) / 1000.0, s.track.length());
        if (t % 300 == 0 && at <= 450.0)
            ++expected;
    }
    CHECK(log.fates.size() == expected);
    for (std::size_t i = 0; i < log.fates.size(); ++i) {
        CHECK(log.fates[i].seq == i);
        CHECK(log.fates[i].receptions.size() == log.receivers.size());
        if (i > 0)
            CHECK(log.fates[i].tx_time_ms > log.fates[i - 1].tx_time_ms);
    }
}

TEST_CASE("train pins at the end of the track") {
    auto s = relay_geometry(20.0, 300.0);
    s.track = fixture::south_track(100.0);
    s.crossing_arclength_m = 100.0;
    s.train.speed_mps = 40.0;
    s.duration_ms = 10000;
    World w(s);
    for (int i = 0; i < 100; ++i)
        w.step(100);
    CHECK(w.train().arclength_m == doctest::Approx(100.0));
    CHECK(w.train().speed_mps == 0.0);
}

TEST_CASE("runs are deterministic") {
    auto s = relay_geometry(500.0, 1200.0);
    s.path_loss = {channel::PathLossKind::LogDistance, 2.9, 1.0, 6.0};
    s.reception = ReceptionModel::Logistic;
    s.train.speed_mps = 20.0;
    s.duration_ms = 30000;
    s.seed = 99;
    const auto a = run(s);
    const auto b = run(s);
    CHECK(a.scenario_hash == b.scenario_hash);
    CHECK(ingest::write_packet_log(a) == ingest::write_packet_log(b));
    REQUIRE(a.fates.size() == b.fates.size());
    for (std::size_t i = 0; i < a.fates.size(); ++i)
        for (std::size_t r = 0; r < a.receivers.size(); ++r)
            CHECK(a.fates[i].receptions[r].prx_dbm == b.fates[i].receptions[r].prx_dbm);

    s.seed = 100;
    CHECK(scenario_hash(s) != a.scenario_hash);
    CHECK(ingest::write_packet_log(run(s)) != ingest::write_packet_log(a));
}

TEST_CASE("relay only ever adds receptions") {
    std::mt19937_64 rng(51);
    std::uniform_real_distribution<double> rsu_m(10.0, 1500.0), obu_m(0.0, 3000.0);
    for (int trial = 0; trial < 15; ++trial) {
        auto s = relay_geometry(rsu_m(rng), obu_m(rng));
        s.path_loss = {channel::PathLossKind::LogDistance, 3.0, 1.0, 5.0};
        s.train.speed_mps = 25.0;
        s.duration_ms = 20000;
        s.seed = rng();
        auto off = s;
        off.rsu->relay_enabled = false;
        const auto with = run(s);
        const auto without = run(off);
        REQUIRE(with.fates.size() == without.fates.size());
        for (std::size_t i = 0; i < with.fates.size(); ++i) {
            for (std::size_t r = 0; r < with.receivers.size(); ++r) {
                const auto& w = with.fates[i].receptions[r];
                const auto& wo = without.fates[i].receptions[r];
                CHECK(w.received_direct() == wo.received);
                if (wo.received)
                    CHECK(w.received);
            }
        }
    }
}

TEST_CASE("free-space reception is monotone along boresight") {
    // Train parked facing south with an 8-element array; the OBU drives
    // away down the track line.
    auto s = fixture::base(8000.0, 240000);
    s.train.antenna = antenna::AntennaPattern::uniform_linear_array(8, 0.5, 12.0);
    s.train.radio.mcs_id = "MCS4";
    s.roads.push_back(fixture::south_track(8000.0));
    s.obus.push_back(fixture::obu("ahead", 0, 0.0, 30.0));
    s.crossing_arclength_m = s.track.length();
    const auto log = run(s);

    std::vector<std::pair<double, bool>> seen;
    for (const auto& f : log.fates)
        seen.emplace_back(*f.receptions[0].distance_m, f.receptions[0].received);
    std::sort(seen.begin(), seen.end());
    bool lost = false;
    for (const auto& [d, ok] : seen) {
        if (!ok)
            lost = true;
        CHECK_FALSE((lost && ok));
    }
    const double edge = oracle::free_space_range(11 + 12 + 20 * std::log10(8.0) + 0 + 82, 5.9e9);
    const auto last_ok = std::find_if(seen.rbegin(), seen.rend(), [](const auto& p) { return p.second; });
    REQUIRE(last_ok != seen.rend());
    CHECK(last_ok->first <= edge);
    CHECK(last_ok->first > edge - 3.1); // one 3 m mobility step
}

TEST_CASE("OBU warning timeline follows receptions") {
    auto s = relay_geometry(20.0, 100.0);
    s.rsu->relay_enabled = false;
    s.obus[0].hold_time_ms = 500;
    s.crossing_arclength_m = 0.0;
    s.train.clear_margin_m = 50.0;
    s.train.speed_mps = 10.0; // clears after 5 s
    s.duration_ms = 8000;
    const auto log = run(s);
    const auto& tl = log.warning_timelines.at("car");
    REQUIRE(tl.size() == 3);
    CHECK_FALSE(tl[0].active);
    CHECK(tl[1].active);
    CHECK(tl[1].time_ms == 100);
    CHECK_FALSE(tl[2].active);
    CHECK(tl[2].time_ms == log.fates.back().tx_time_ms + 600);
}

} // TEST_SUITE
