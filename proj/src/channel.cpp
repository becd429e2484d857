#include "railwarn/channel.hpp"

#include <cmath>
#include <numbers>
#include <random>

namespace railwarn::channel {

namespace {

std::uint64_t fnv1a(std::string_view s, std::uint64_t h = 0xcbf29ce484222325ULL) noexcept {
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

std::uint64_t splitmix64(std::uint64_t x) noexcept {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

} // namespace

double nominal_power_dbm(PowerClass pc) noexcept {
    return pc == PowerClass::Private ? kPrivatePowerDbm : kPublicSafetyPowerDbm;
}

std::string_view to_string(PowerClass pc) noexcept {
    return pc == PowerClass::Private ? "private" : "public_safety";
}

RadioConfig RadioConfig::for_class(PowerClass pc, std::string mcs) {
    RadioConfig rc;
    rc.power_class = pc;
    rc.tx_power_dbm = nominal_power_dbm(pc);
    rc.mcs_id = std::move(mcs);
    return rc;
}

std::vector<std::string> RadioConfig::violations() const {
    std::vector<std::string> out;
    if (!override_tx_power && tx_power_dbm != nominal_power_dbm(power_class)) {
        out.push_back("tx_power_dbm " + std::to_string(tx_power_dbm) + " does not match power class " +
                      std::string(to_string(power_class)) + " (" +
                      std::to_string(nominal_power_dbm(power_class)) + " dBm); set override_tx_power to allow it");
    }
    if (!(frequency_hz > 0.0))
        out.push_back("frequency_hz must be > 0");
    if (mcs_id.empty())
        out.push_back("mcs must not be empty");
    return out;
}

std::vector<std::string> PathLossModel::violations() const {
    std::vector<std::string> out;
    if (kind == PathLossKind::LogDistance && !(exponent >= 1.6 && exponent <= 6.0))
        out.push_back("exponent must be in [1.6, 6.0]");
    if (!(reference_distance_m > 0.0))
        out.push_back("reference_distance_m must be > 0");
    if (!(shadowing_sigma_db >= 0.0))
        out.push_back("shadowing_sigma_db must be >= 0");
    return out;
}

SensitivityTable SensitivityTable::defaults() {
    return SensitivityTable({{"MCS0", -94.0}, {"MCS2", -88.0}, {"MCS4", -82.0}});
}

double SensitivityTable::sensitivity_dbm(const std::string& mcs_id) const {
    auto it = entries_.find(mcs_id);
    if (it == entries_.end())
        throw ChannelError("MCS not in sensitivity table: " + mcs_id);
    return it->second;
}

double free_space_path_loss_db(double distance_m, double frequency_hz) {
    if (!(frequency_hz > 0.0))
        throw ChannelError("frequency must be positive");
    if (!(distance_m > 0.0))
        throw ChannelError("distance must be positive");
    return 20.0 * std::log10(4.0 * std::numbers::pi * distance_m * frequency_hz / kSpeedOfLight);
}

double path_loss_db(const PathLossModel& model, double distance_m, double frequency_hz,
                    std::optional<double> standard_normal_draw) {
    if (!(frequency_hz > 0.0))
        throw ChannelError("frequency must be positive");
    const double d = std::max(distance_m, model.reference_distance_m);
    if (model.kind == PathLossKind::FreeSpace)
        return free_space_path_loss_db(d, frequency_hz);

    double pl = free_space_path_loss_db(model.reference_distance_m, frequency_hz) +
                10.0 * model.exponent * std::log10(d / model.reference_distance_m);
    if (standard_normal_draw && model.shadowing_sigma_db > 0.0)
        pl += model.shadowing_sigma_db * *standard_normal_draw;
    return pl;
}

double received_power_dbm(const RadioConfig& tx, const Endpoint& from, const Endpoint& to,
                          const PathLossModel& model, std::optional<double> standard_normal_draw) {
    if (from.position.lat() == to.position.lat() && from.position.lon() == to.position.lon())
        throw ChannelError("degenerate link geometry");
    const double d = geo::haversine_distance(from.position, to.position);
    const double out = geo::bearing(from.position, to.position);
    const double back = geo::bearing(to.position, from.position);
    return tx.tx_power_dbm + antenna::gain_dbi(from.pattern, out) + antenna::gain_dbi(to.pattern, back) -
           path_loss_db(model, d, tx.frequency_hz, standard_normal_draw);
}

bool packet_success(double prx_dbm, const SensitivityTable& table, const std::string& mcs_id) {
    return prx_dbm >= table.sensitivity_dbm(mcs_id);
}

double success_probability(double prx_dbm, double sensitivity_dbm, double slope_per_db) noexcept {
    return 1.0 / (1.0 + std::exp(-slope_per_db * (prx_dbm - sensitivity_dbm)));
}

LinkDraws draw_for_link(const LinkKey& key) {
    std::uint64_t h = splitmix64(key.scenario_seed);
    h = splitmix64(h ^ key.packet_seq);
    h = splitmix64(h ^ fnv1a(key.receiver_id));
    h = splitmix64(h ^ key.hop);
    std::mt19937_64 rng(h);
    std::normal_distribution<double> normal(0.0, 1.0);
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    LinkDraws d{};
    d.shadowing_normal = normal(rng);
    d.reception_uniform = uniform(rng);
    return d;
}

} // namespace railwarn::channel
