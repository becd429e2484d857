#include "railwarn/config.hpp"

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace railwarn::config {

using nlohmann::json;

namespace {

std::string type_name(const json& j) {
    return j.type_name();
}

/// Walks one JSON object, collecting issues instead of throwing.
class ObjectReader {
public:
    ObjectReader(const json& obj, std::string path, std::vector<ValidationIssue>& issues)
        : obj_(obj), path_(std::move(path)), issues_(issues) {
        if (!obj_.is_object())
            issue("", "expected an object, got " + type_name(obj_));
    }

    std::string field(std::string_view key) const {
        return path_.empty() ? std::string(key) : path_ + "." + std::string(key);
    }

    void issue(std::string_view key, std::string msg) const {
        issues_.push_back({key.empty() ? path_ : field(key), std::move(msg)});
    }

    bool has(std::string_view key) {
        seen_.insert(std::string(key));
        return obj_.is_object() && obj_.contains(std::string(key)) && !obj_.at(std::string(key)).is_null();
    }

    const json* raw(std::string_view key) {
        if (!has(key))
            return nullptr;
        return &obj_.at(std::string(key));
    }

    double number(std::string_view key, double fallback) {
        const json* j = raw(key);
        if (!j)
            return fallback;
        if (!j->is_number()) {
            issue(key, "expected a number, got " + type_name(*j));
            return fallback;
        }
        return j->get<double>();
    }

    std::optional<double> required_number(std::string_view key) {
        if (!has(key)) {
            issue(key, "required field missing");
            return std::nullopt;
        }
        const json& j = obj_.at(std::string(key));
        if (!j.is_number()) {
            issue(key, "expected a number, got " + type_name(j));
            return std::nullopt;
        }
        return j.get<double>();
    }

    std::int64_t integer(std::string_view key, std::int64_t fallback) {
        const json* j = raw(key);
        if (!j)
            return fallback;
        if (!j->is_number_integer()) {
            issue(key, "expected an integer, got " + type_name(*j));
            return fallback;
        }
        return j->get<std::int64_t>();
    }

    std::optional<std::int64_t> required_integer(std::string_view key) {
        if (!has(key)) {
            issue(key, "required field missing");
            return std::nullopt;
        }
        return integer(key, 0);
    }

    bool boolean(std::string_view key, bool fallback) {
        const json* j = raw(key);
        if (!j)
            return fallback;
        if (!j->is_boolean()) {
            issue(key, "expected true or false, got " + type_name(*j));
            return fallback;
        }
        return j->get<bool>();
    }

    std::string string(std::string_view key, std::string fallback) {
        const json* j = raw(key);
        if (!j)
            return fallback;
        if (!j->is_string()) {
            issue(key, "expected a string, got " + type_name(*j));
            return fallback;
        }
        return j->get<std::string>();
    }

    /// Flags keys that no accessor asked about.
    void finish() {
        if (!obj_.is_object())
            return;
        for (const auto& [k, v] : obj_.items())
            if (!seen_.count(k))
                issue(k, "unknown field");
    }

private:
    const json& obj_;
    std::string path_;
    std::vector<ValidationIssue>& issues_;
    std::set<std::string, std::less<>> seen_;
};

std::optional<geo::GeoPoint> read_point(const json& j, const std::string& path, std::vector<ValidationIssue>& issues) {
    if (!j.is_array() || j.size() < 2 || j.size() > 3 ||
        !std::all_of(j.begin(), j.end(), [](const json& v) { return v.is_number(); })) {
        issues.push_back({path, "expected [lat, lon] or [lat, lon, alt] in degrees/meters"});
        return std::nullopt;
    }
    try {
        return geo::GeoPoint(j[0].get<double>(), j[1].get<double>(), j.size() == 3 ? j[2].get<double>() : 0.0);
    } catch (const geo::GeoError& e) {
        issues.push_back({path, e.what()});
        return std::nullopt;
    }
}

std::optional<geo::Polyline> read_polyline(const json& j, const std::string& path,
                                           std::vector<ValidationIssue>& issues) {
    if (!j.is_array()) {
        issues.push_back({path, "expected an array of [lat, lon] points"});
        return std::nullopt;
    }
    std::vector<geo::GeoPoint> pts;
    bool ok = true;
    for (std::size_t i = 0; i < j.size(); ++i) {
        auto p = read_point(j[i], path + "[" + std::to_string(i) + "]", issues);
        ok = ok && p.has_value();
        if (p)
            pts.push_back(*p);
    }
    if (!ok)
        return std::nullopt;
    try {
        return geo::Polyline(std::move(pts));
    } catch (const geo::GeoError& e) {
        issues.push_back({path, e.what()});
        return std::nullopt;
    }
}

channel::RadioConfig read_radio(const json* j, const std::string& path, const channel::RadioConfig& fallback,
                                std::vector<ValidationIssue>& issues) {
    if (!j)
        return fallback;
    ObjectReader r(*j, path, issues);
    channel::RadioConfig rc;
    const std::string pc = r.string("power_class", std::string(channel::to_string(fallback.power_class)));
    if (pc == "private")
        rc.power_class = channel::PowerClass::Private;
    else if (pc == "public_safety")
        rc.power_class = channel::PowerClass::PublicSafety;
    else
        r.issue("power_class", "expected \"private\" or \"public_safety\", got \"" + pc + "\"");
    rc.tx_power_dbm = r.number("tx_power_dbm", channel::nominal_power_dbm(rc.power_class));
    rc.override_tx_power = r.boolean("override_tx_power", false);
    rc.frequency_hz = r.number("frequency_hz", channel::kDsrcFrequencyHz);
    rc.mcs_id = r.string("mcs", fallback.mcs_id);
    r.finish();
    return rc;
}

antenna::AntennaPattern read_antenna(const json* j, const std::string& path, const antenna::AntennaPattern& fallback,
                                     std::vector<ValidationIssue>& issues) {
    if (!j)
        return fallback;
    ObjectReader r(*j, path, issues);
    const std::string kind = r.string("kind", "omni");
    const double gain = r.number("element_gain_dbi", 12.0);
    const double feed_loss = r.number("feed_loss_db", 0.0);
    const auto n = r.integer("num_elements", 8);
    const double spacing = r.number("element_spacing_wl", antenna::kDefaultSpacing);
    const double boresight = r.number("boresight_deg", 0.0);
    r.finish();
    try {
        if (kind == "omni")
            return antenna::AntennaPattern::omni(gain, feed_loss);
        if (kind == "ula")
            return antenna::AntennaPattern::uniform_linear_array(static_cast<int>(n), spacing, gain, boresight,
                                                                 feed_loss);
        r.issue("kind", "expected \"omni\" or \"ula\", got \"" + kind + "\"");
    } catch (const antenna::AntennaError& e) {
        r.issue("", e.what());
    }
    return fallback;
}

} // namespace

RunConfig parse_run_config(const json& doc, const Overrides& overrides) {
    std::vector<ValidationIssue> issues;
    ObjectReader top(doc, "", issues);

    std::optional<geo::Polyline> track;
    if (const json* t = top.raw("track"))
        track = read_polyline(*t, "track", issues);
    else
        top.issue("track", "required field missing");

    std::vector<geo::Polyline> roads;
    if (const json* rs = top.raw("roads")) {
        if (!rs->is_array()) {
            top.issue("roads", "expected an array of polylines");
        } else {
            for (std::size_t i = 0; i < rs->size(); ++i)
                if (auto p = read_polyline((*rs)[i], "roads[" + std::to_string(i) + "]", issues))
                    roads.push_back(std::move(*p));
        }
    }

    const auto crossing = top.required_number("crossing_arclength_m");
    const auto duration = top.required_integer("duration_ms");
    const auto timestep = top.integer("timestep_ms", 100);
    std::int64_t seed_raw = top.integer("seed", 0);
    if (seed_raw < 0) {
        top.issue("seed", "must be >= 0");
        seed_raw = 0;
    }

    channel::PathLossModel pl;
    if (const json* j = top.raw("path_loss")) {
        ObjectReader r(*j, "path_loss", issues);
        const std::string model = r.string("model", "free_space");
        if (model == "free_space")
            pl.kind = channel::PathLossKind::FreeSpace;
        else if (model == "log_distance")
            pl.kind = channel::PathLossKind::LogDistance;
        else
            r.issue("model", "expected \"free_space\" or \"log_distance\", got \"" + model + "\"");
        pl.exponent = r.number("exponent", 2.0);
        pl.reference_distance_m = r.number("reference_distance_m", 1.0);
        pl.shadowing_sigma_db = r.number("shadowing_sigma_db", 0.0);
        r.finish();
    }

    sim::ReceptionModel reception = sim::ReceptionModel::Threshold;
    double slope = 1.0;
    if (const json* j = top.raw("reception")) {
        ObjectReader r(*j, "reception", issues);
        const std::string model = r.string("model", "threshold");
        if (model == "logistic")
            reception = sim::ReceptionModel::Logistic;
        else if (model != "threshold")
            r.issue("model", "expected \"threshold\" or \"logistic\", got \"" + model + "\"");
        slope = r.number("logistic_slope_per_db", 1.0);
        r.finish();
    }

    channel::SensitivityTable table = channel::SensitivityTable::defaults();
    if (const json* j = top.raw("sensitivity_dbm")) {
        if (!j->is_object() || j->empty()) {
            top.issue("sensitivity_dbm", "expected a non-empty object of MCS id -> dBm");
        } else {
            std::map<std::string, double> entries;
            for (const auto& [k, v] : j->items()) {
                if (!v.is_number())
                    issues.push_back({"sensitivity_dbm." + k, "expected a number"});
                else
                    entries[k] = v.get<double>();
            }
            table = channel::SensitivityTable(std::move(entries));
        }
    }

    double bin_width = sim::kDefaultBinWidthM;
    if (const json* j = top.raw("stats")) {
        ObjectReader r(*j, "stats", issues);
        bin_width = r.number("bin_width_m", sim::kDefaultBinWidthM);
        if (!(bin_width > 0.0))
            r.issue("bin_width_m", "must be > 0");
        r.finish();
    }
    std::int64_t decimate = 1;
    if (const json* j = top.raw("kml")) {
        ObjectReader r(*j, "kml", issues);
        decimate = r.integer("decimate", 1);
        if (decimate < 1)
            r.issue("decimate", "must be >= 1");
        r.finish();
    }

    sim::TrainSpec train;
    if (const json* j = top.raw("train")) {
        ObjectReader r(*j, "train", issues);
        train.id = r.string("id", "train");
        train.initial_arclength_m = r.number("initial_arclength_m", 0.0);
        if (auto v = r.required_number("speed_mps"))
            train.speed_mps = *v;
        train.radio = read_radio(r.raw("radio"), "train.radio", channel::RadioConfig{}, issues);
        train.antenna = read_antenna(r.raw("antenna"), "train.antenna", train.antenna, issues);
        train.mount_offset_deg = r.number("mount_offset_deg", 0.0);
        train.broadcast_period_ms = r.integer("broadcast_period_ms", protocol::kDefaultBroadcastPeriodMs);
        train.clear_margin_m = r.number("clear_margin_m", protocol::kDefaultClearMarginM);
        r.finish();
    } else {
        top.issue("train", "required field missing");
    }

    std::optional<sim::RsuSpec> rsu;
    if (const json* j = top.raw("rsu")) {
        ObjectReader r(*j, "rsu", issues);
        sim::RsuSpec spec;
        spec.id = r.string("id", "rsu");
        if (const json* p = r.raw("position")) {
            if (auto pt = read_point(*p, "rsu.position", issues))
                spec.position = *pt;
        } else {
            r.issue("position", "required field missing");
        }
        // The relay defaults to the train's radio and antenna.
        spec.radio = read_radio(r.raw("radio"), "rsu.radio", train.radio, issues);
        spec.antenna = read_antenna(r.raw("antenna"), "rsu.antenna", train.antenna, issues);
        spec.relay_enabled = r.boolean("relay_enabled", true);
        spec.relay_delay_ms = r.integer("relay_delay_ms", 0);
        r.finish();
        rsu = std::move(spec);
    }

    std::vector<sim::ObuSpec> obus;
    if (const json* j = top.raw("obus")) {
        if (!j->is_array()) {
            top.issue("obus", "expected an array");
        } else {
            for (std::size_t i = 0; i < j->size(); ++i) {
                const std::string path = "obus[" + std::to_string(i) + "]";
                ObjectReader r((*j)[i], path, issues);
                sim::ObuSpec spec;
                spec.id = r.string("id", i == 0 ? "obu" : "obu" + std::to_string(i));
                const auto road = r.integer("road", 0);
                if (road < 0)
                    r.issue("road", "must be >= 0");
                spec.road = static_cast<std::size_t>(std::max<std::int64_t>(road, 0));
                spec.initial_arclength_m = r.number("initial_arclength_m", 0.0);
                spec.speed_mps = r.number("speed_mps", 0.0);
                spec.radio = read_radio(r.raw("radio"), path + ".radio", channel::RadioConfig{}, issues);
                spec.antenna = read_antenna(r.raw("antenna"), path + ".antenna", spec.antenna, issues);
                spec.mount_offset_deg = r.number("mount_offset_deg", 0.0);
                spec.hold_time_ms = r.integer("hold_time_ms", protocol::kDefaultHoldTimeMs);
                r.finish();
                obus.push_back(std::move(spec));
            }
        }
    }
    top.finish();

    if (!track || !crossing || !duration) {
        if (issues.empty())
            issues.push_back({"", "incomplete scenario"});
        throw ValidationError(std::move(issues));
    }

    sim::Scenario scenario{
        .track = std::move(*track),
        .crossing_arclength_m = *crossing,
        .roads = std::move(roads),
        .train = std::move(train),
        .rsu = std::move(rsu),
        .obus = std::move(obus),
        .path_loss = pl,
        .sensitivity = std::move(table),
        .reception = reception,
        .logistic_slope_per_db = slope,
        .timestep_ms = timestep,
        .duration_ms = *duration,
        .seed = overrides.seed.value_or(static_cast<std::uint64_t>(seed_raw)),
    };
    for (auto& i : scenario.validate())
        issues.push_back(std::move(i));
    if (!issues.empty())
        throw ValidationError(std::move(issues));
    return RunConfig{std::move(scenario), bin_width, static_cast<std::size_t>(decimate)};
}

json read_json_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw ValidationError(std::vector<ValidationIssue>{{path.string(), "cannot open config file"}});
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::vector<ValidationIssue>{{path.string(), std::string("malformed JSON: ") + e.what()}});
    }
}

RunConfig load_run_config(const std::filesystem::path& path, const Overrides& overrides) {
    return parse_run_config(read_json_file(path), overrides);
}

json to_json(const sim::DeliveryStats& s) {
    json bins = json::array();
    for (const auto& b : s.bins)
        bins.push_back({{"lower_m", b.lower_m},
                        {"upper_m", b.upper_m},
                        {"packets", b.packets},
                        {"received", b.received},
                        {"pdr", b.pdr}});
    return {{"packets", s.packets},
            {"received", s.received},
            {"pdr", s.pdr},
            {"coverage_range_m", s.coverage_range_m},
            {"bins", std::move(bins)}};
}

json to_json(const sim::Stats& stats, std::string_view scenario_hash) {
    json receivers = json::array();
    for (const auto& r : stats.receivers) {
        json entry{{"id", r.id},
                   {"role", r.role == ReceiverRole::Rsu ? "rsu" : "obu"},
                   {"distance_known", r.distance_known},
                   {"delivery", to_json(r.delivery)}};
        if (r.direct_only)
            entry["direct_only"] = to_json(*r.direct_only);
        receivers.push_back(std::move(entry));
    }
    return {{"scenario_hash", scenario_hash},
            {"packets", stats.packets},
            {"bin_width_m", stats.bin_width_m},
            {"coverage_pdr_threshold", sim::kCoveragePdrThreshold},
            {"receivers", std::move(receivers)}};
}

} // namespace railwarn::config
