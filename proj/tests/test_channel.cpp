#include "oracles.hpp"

#include "railwarn/channel.hpp"

#include <doctest.h>

#include <random>
#include <set>

using namespace railwarn;
using namespace railwarn::channel;
using antenna::AntennaPattern;

namespace {

// Two points exactly `d` metres apart due east of an equatorial origin.
std::pair<geo::GeoPoint, geo::GeoPoint> link_of(double d) {
    const geo::GeoPoint a{0.0, 0.0};
    return {a, geo::from_enu(a, {d, 0.0, 0.0})};
}

} // namespace

TEST_SUITE("channel") {

TEST_CASE("free-space path loss examples") {
    const double at1 = oracle::fspl_db(1.0, 5.9e9);
    CHECK(oracle::kC / 5.9e9 == doctest::Approx(0.050812).epsilon(1e-5));
    CHECK(at1 == doctest::Approx(47.8648).epsilon(1e-6));
    CHECK(free_space_path_loss_db(1.0, 5.9e9) == doctest::Approx(at1).epsilon(1e-12));
    CHECK(free_space_path_loss_db(1.0, 5.9e9) == doctest::Approx(47.86).epsilon(0.01 / 47.86));
    CHECK(free_space_path_loss_db(1000.0, 5.9e9) == doctest::Approx(107.87).epsilon(0.02 / 107.87));
    CHECK_THROWS_AS(free_space_path_loss_db(1.0, 0.0), ChannelError);
}

TEST_CASE("doubling the distance adds 6.021 dB in free space") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> d(1.0, 50000.0);
    for (int i = 0; i < 1000; ++i) {
        const double x = d(rng);
        const double step = free_space_path_loss_db(2 * x, 5.9e9) - free_space_path_loss_db(x, 5.9e9);
        CHECK(std::abs(step - 6.0206) < 1e-3);
    }
}

TEST_CASE("log-distance model and clamping") {
    PathLossModel m{PathLossKind::LogDistance, 3.0, 10.0, 4.0};
    const double pl0 = free_space_path_loss_db(10.0, 5.9e9);
    CHECK(path_loss_db(m, 10.0, 5.9e9) == doctest::Approx(pl0));
    CHECK(path_loss_db(m, 100.0, 5.9e9) == doctest::Approx(pl0 + 30.0));
    CHECK(path_loss_db(m, 100.0, 5.9e9, 0.5) == doctest::Approx(pl0 + 30.0 + 2.0));
    CHECK(path_loss_db(m, 2.0, 5.9e9) == doctest::Approx(pl0)); // clamped to d0
    CHECK(path_loss_db(PathLossModel{}, 0.0, 5.9e9) == doctest::Approx(free_space_path_loss_db(1.0, 5.9e9)));
}

TEST_CASE("path loss is non-decreasing in distance without shadowing") {
    std::mt19937_64 rng(32);
    std::uniform_real_distribution<double> d(0.0, 20000.0), n(1.6, 6.0), d0(0.1, 100.0);
    for (int i = 0; i < 2000; ++i) {
        const PathLossModel m{i % 2 ? PathLossKind::LogDistance : PathLossKind::FreeSpace, n(rng), d0(rng), 0.0};
        double a = d(rng), b = d(rng);
        if (a > b)
            std::swap(a, b);
        CHECK(path_loss_db(m, a, 5.9e9) <= path_loss_db(m, b, 5.9e9));
    }
}

TEST_CASE("model validation") {
    CHECK(PathLossModel{PathLossKind::LogDistance, 1.5, 1.0, 0.0}.violations().size() == 1);
    CHECK(PathLossModel{PathLossKind::LogDistance, 6.5, 1.0, 0.0}.violations().size() == 1);
    CHECK(PathLossModel{PathLossKind::LogDistance, 2.0, 0.0, -1.0}.violations().size() == 2);
    CHECK(PathLossModel{PathLossKind::LogDistance, 3.5, 1.0, 4.0}.violations().empty());

    auto r = RadioConfig::for_class(PowerClass::Private);
    CHECK(r.tx_power_dbm == 11.0);
    CHECK(r.violations().empty());
    r.tx_power_dbm = 23.0;
    CHECK(r.violations().size() == 1);
    r.override_tx_power = true;
    CHECK(r.violations().empty());
    CHECK(RadioConfig::for_class(PowerClass::PublicSafety).tx_power_dbm == 23.0);
}

TEST_CASE("received power examples") {
    const auto [a, b] = link_of(1.0);
    const auto omni = AntennaPattern::omni(12.0);
    const auto rx23 = received_power_dbm(RadioConfig::for_class(PowerClass::PublicSafety), {a, omni}, {b, omni}, {});
    CHECK(23 + 12 + 12 - oracle::fspl_db(1.0, 5.9e9) == doctest::Approx(-0.8648).epsilon(1e-4));
    CHECK(rx23 == doctest::Approx(-0.86).epsilon(0.05 / 0.86));
    const auto rx11 = received_power_dbm(RadioConfig::for_class(PowerClass::Private), {a, omni}, {b, omni}, {});
    CHECK(rx23 - rx11 == doctest::Approx(12.0).epsilon(1e-12));

    // boresight of the array pointed at the receiver (east)
    const auto ula = AntennaPattern::uniform_linear_array(8, 0.5, 12.0, 90.0);
    const auto rx_ula = received_power_dbm(RadioConfig::for_class(PowerClass::PublicSafety), {a, ula}, {b, omni}, {});
    CHECK(rx_ula - rx23 == doctest::Approx(18.06).epsilon(0.01 / 18.06));

    CHECK_THROWS_WITH_AS(received_power_dbm(RadioConfig{}, {a, omni}, {a, omni}, {}), "degenerate link geometry",
                         ChannelError);
}

TEST_CASE("received power falls strictly with distance along a bearing") {
    const auto ula = AntennaPattern::uniform_linear_array(8, 0.5, 12.0, 90.0);
    const auto omni = AntennaPattern::omni(3.0);
    double last = 1e9;
    for (double d = 1.5; d < 50000.0; d *= 1.37) {
        const auto [a, b] = link_of(d);
        const double p = received_power_dbm(RadioConfig{}, {a, ula}, {b, omni}, {});
        CHECK(p < last);
        last = p;
    }
}

TEST_CASE("link reciprocity") {
    std::mt19937_64 rng(33);
    std::uniform_real_distribution<double> off(-0.05, 0.05), bore(0.0, 360.0);
    std::uniform_int_distribution<int> n(1, 12);
    const PathLossModel m{PathLossKind::LogDistance, 2.7, 1.0, 0.0};
    for (int i = 0; i < 500; ++i) {
        const geo::GeoPoint a{38.0 + off(rng), -104.0 + off(rng)};
        const geo::GeoPoint b{38.0 + off(rng), -104.0 + off(rng)};
        const auto pa = AntennaPattern::uniform_linear_array(n(rng), 0.5, 12.0, bore(rng));
        const auto pb = AntennaPattern::uniform_linear_array(n(rng), 0.5, 5.0, bore(rng));
        const RadioConfig r{};
        CHECK(received_power_dbm(r, {a, pa}, {b, pb}, m) ==
              doctest::Approx(received_power_dbm(r, {b, pb}, {a, pa}, m)).epsilon(1e-6));
    }
}

TEST_CASE("threshold reception") {
    const auto table = SensitivityTable::defaults();
    CHECK(table.sensitivity_dbm("MCS0") == -94.0);
    CHECK(table.sensitivity_dbm("MCS2") == -88.0);
    CHECK(table.sensitivity_dbm("MCS4") == -82.0);

    const SensitivityTable custom({{"X", -85.0}});
    CHECK(packet_success(-72.9, custom, "X"));
    CHECK(packet_success(-85.0, custom, "X"));
    CHECK_FALSE(packet_success(-85.01, custom, "X"));
    CHECK_THROWS_WITH_AS(packet_success(-50.0, custom, "MCS7"), "MCS not in sensitivity table: MCS7", ChannelError);
}

TEST_CASE("logistic reception probability") {
    CHECK(success_probability(-88.0, -88.0, 1.0) == doctest::Approx(0.5));
    CHECK(success_probability(-80.0, -88.0, 1.0) == doctest::Approx(1.0 / (1.0 + std::exp(-8.0))));
    CHECK(success_probability(-200.0, -88.0, 1.0) >= 0.0);
    CHECK(success_probability(100.0, -88.0, 1.0) <= 1.0);
}

TEST_CASE("per-link draws are deterministic and distinct across links") {
    const auto a = draw_for_link({42, 7, "obu", 0});
    const auto b = draw_for_link({42, 7, "obu", 0});
    CHECK(a.shadowing_normal == b.shadowing_normal);
    CHECK(a.reception_uniform == b.reception_uniform);

    std::set<double> seen;
    for (std::uint64_t seq = 0; seq < 200; ++seq)
        for (const char* id : {"rsu", "obu", "obu1"})
            for (std::uint32_t hop : {0u, 1u})
                seen.insert(draw_for_link({42, seq, id, hop}).shadowing_normal);
    CHECK(seen.size() == 1200);
}

TEST_CASE("per-link normal draws look standard") {
    double sum = 0, sq = 0, usum = 0;
    const int n = 20000;
    for (int i = 0; i < n; ++i) {
        const auto d = draw_for_link({9, static_cast<std::uint64_t>(i), "rx", 0});
        sum += d.shadowing_normal;
        sq += d.shadowing_normal * d.shadowing_normal;
        usum += d.reception_uniform;
        CHECK(d.reception_uniform >= 0.0);
        CHECK(d.reception_uniform < 1.0);
    }
    CHECK(std::abs(sum / n) < 0.05);
    CHECK(std::abs(sq / n - 1.0) < 0.05);
    CHECK(std::abs(usum / n - 0.5) < 0.02);
}

} // TEST_SUITE
