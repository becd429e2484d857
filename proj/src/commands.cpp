#include "railwarn/commands.hpp"

#include "railwarn/kmlout.hpp"
#include "railwarn/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <future>
#include <map>
#include <sstream>

namespace railwarn::cli {

using nlohmann::json;

namespace {

void write_file(const fs::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw std::runtime_error("cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out)
        throw std::runtime_error("failed writing " + path.string());
}

double elapsed_ms(std::chrono::steady_clock::time_point since) {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - since).count();
}

/// Shared tail of run and replay: KML, CSV and stats outputs.
RunReport write_outputs(const SimLog& log, const fs::path& out_dir, double bin_width_m, std::size_t decimate,
                        bool kmz) {
    fs::create_directories(out_dir);
    RunReport report;
    report.scenario_hash = log.scenario_hash;

    if (log.fates.empty())
        report.warnings.push_back("no packets were broadcast; the trace has no packet points");
    try {
        kmlout::KmlOptions opts;
        opts.decimate = decimate;
        const std::string kml = kmlout::render_log(log, opts);
        write_file(out_dir / kTraceFile, kml);
        report.outputs.push_back(out_dir / kTraceFile);
        if (kmz) {
            write_file(out_dir / kKmzFile, kmlout::package_kmz(kml));
            report.outputs.push_back(out_dir / kKmzFile);
        }
    } catch (const kmlout::KmlError& e) {
        report.warnings.push_back(std::string("KML not written: ") + e.what());
    }

    write_file(out_dir / kPacketsFile, ingest::write_packet_log(log));
    report.outputs.push_back(out_dir / kPacketsFile);

    try {
        report.stats = sim::compute_stats(log, bin_width_m);
        write_file(out_dir / kStatsFile, config::to_json(*report.stats, log.scenario_hash).dump(2) + "\n");
        report.outputs.push_back(out_dir / kStatsFile);
    } catch (const sim::StatsError& e) {
        report.warnings.push_back(std::string("stats suppressed: ") + e.what());
    }
    return report;
}

antenna::AntennaPattern as_omni(const antenna::AntennaPattern& p) {
    return antenna::AntennaPattern::omni(p.element_gain_dbi(), p.feed_loss_db());
}

antenna::AntennaPattern as_ula8(const antenna::AntennaPattern& p) {
    return antenna::AntennaPattern::uniform_linear_array(8, antenna::kDefaultSpacing, p.element_gain_dbi(), 0.0,
                                                         p.feed_loss_db());
}

void set_power(config::RunConfig& cfg, channel::PowerClass pc) {
    auto apply = [pc](channel::RadioConfig& r) {
        r.power_class = pc;
        r.tx_power_dbm = channel::nominal_power_dbm(pc);
        r.override_tx_power = false;
    };
    apply(cfg.scenario.train.radio);
    if (cfg.scenario.rsu)
        apply(cfg.scenario.rsu->radio);
}

std::string fixed(double v, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

} // namespace

RunReport run_config(const config::RunConfig& cfg, const fs::path& out_dir, bool kmz) {
    const auto start = std::chrono::steady_clock::now();
    const SimLog log = sim::run(cfg.scenario);
    RunReport report = write_outputs(log, out_dir, cfg.bin_width_m, cfg.kml_decimate, kmz);
    report.wall_time_ms = elapsed_ms(start);
    return report;
}

RunReport cmd_run(const fs::path& config_path, const fs::path& out_dir, const RunOptions& options) {
    const config::RunConfig cfg = config::load_run_config(config_path, options.overrides);
    return run_config(cfg, out_dir, options.kmz);
}

RunReport cmd_replay(const fs::path& packets_csv, const fs::path& out_dir, const ReplayOptions& options) {
    const auto start = std::chrono::steady_clock::now();
    std::ifstream csv(packets_csv);
    if (!csv)
        throw ingest::IngestError("cannot open packet log " + packets_csv.string());
    ingest::PacketLogParse parsed = ingest::parse_packet_log(csv, options.mode);

    std::vector<std::string> warnings;
    for (const auto& e : parsed.errors)
        warnings.push_back(packets_csv.filename().string() + " " + e.to_string() + " (row skipped)");

    const bool needs_gps = std::any_of(parsed.records.begin(), parsed.records.end(),
                                       [](const ingest::PacketRecord& r) { return !r.has_position(); });
    std::vector<ingest::GpsFix> fixes;
    if (options.nmea_path) {
        std::ifstream nmea(*options.nmea_path);
        if (!nmea)
            throw ingest::IngestError("cannot open NMEA file " + options.nmea_path->string());
        auto np = ingest::parse_nmea_stream(nmea, options.mode);
        for (const auto& e : np.errors)
            warnings.push_back(options.nmea_path->filename().string() + " " + e.to_string() + " (line skipped)");
        if (np.unsupported > 0)
            warnings.push_back(std::to_string(np.unsupported) + " unsupported NMEA sentence(s) skipped");
        fixes = std::move(np.fixes);
    } else if (needs_gps) {
        throw ingest::IngestError("packet log rows have no tx_lat/tx_lon; GPS input (--nmea) is required");
    }

    const SimLog log = ingest::replay(fixes, parsed.records, options.units);
    RunReport report = write_outputs(log, out_dir, options.bin_width_m, options.kml_decimate, options.kmz);
    report.warnings.insert(report.warnings.begin(), warnings.begin(), warnings.end());
    report.wall_time_ms = elapsed_ms(start);
    return report;
}

std::optional<CompareAxis> parse_axis(std::string_view s) noexcept {
    if (s == "antenna")
        return CompareAxis::Antenna;
    if (s == "relay")
        return CompareAxis::Relay;
    if (s == "power")
        return CompareAxis::Power;
    return std::nullopt;
}

std::string_view to_string(CompareAxis axis) noexcept {
    switch (axis) {
    case CompareAxis::Antenna: return "antenna";
    case CompareAxis::Relay: return "relay";
    case CompareAxis::Power: return "power";
    }
    return "antenna";
}

std::optional<double> ReceiverDelta::coverage_ratio() const noexcept {
    if (coverage_without_m <= 0.0)
        return std::nullopt;
    return coverage_with_m / coverage_without_m;
}

const ReceiverDelta* ComparisonReport::receiver(const std::string& id) const noexcept {
    auto it = std::find_if(receivers.begin(), receivers.end(), [&](const ReceiverDelta& r) { return r.id == id; });
    return it == receivers.end() ? nullptr : &*it;
}

json ComparisonReport::to_json() const {
    json rx = json::array();
    for (const auto& r : receivers) {
        json bins = json::array();
        for (const auto& [idx, d] : r.bin_pdr_delta)
            bins.push_back({{"bin", idx}, {"pdr_delta", d}});
        json entry{{"id", r.id},
                   {"pdr", {{leg_with, r.pdr_with}, {leg_without, r.pdr_without}, {"delta", r.pdr_delta()}}},
                   {"coverage_range_m",
                    {{leg_with, r.coverage_with_m}, {leg_without, r.coverage_without_m}, {"delta", r.coverage_delta_m()}}},
                   {"bin_pdr_delta", std::move(bins)}};
        if (auto ratio = r.coverage_ratio())
            entry["coverage_range_m"]["ratio"] = *ratio;
        rx.push_back(std::move(entry));
    }
    return {{"axis", cli::to_string(axis)},
            {"legs", {leg_with, leg_without}},
            {"scenario_hash", {{leg_with, with.scenario_hash}, {leg_without, without.scenario_hash}}},
            {"receivers", std::move(rx)}};
}

std::pair<config::RunConfig, config::RunConfig> comparison_legs(const config::RunConfig& base, CompareAxis axis) {
    config::RunConfig with = base;
    config::RunConfig without = base;
    switch (axis) {
    case CompareAxis::Antenna: {
        const auto& ant = base.scenario.train.antenna;
        if (ant.kind() == antenna::AntennaKind::UniformLinearArray) {
            without.scenario.train.antenna = as_omni(ant);
        } else {
            with.scenario.train.antenna = as_ula8(ant);
        }
        break;
    }
    case CompareAxis::Relay:
        if (!base.scenario.rsu)
            throw ValidationError(std::vector<ValidationIssue>{{"rsu", "relay comparison needs an RSU"}});
        with.scenario.rsu->relay_enabled = true;
        without.scenario.rsu->relay_enabled = false;
        break;
    case CompareAxis::Power:
        set_power(with, channel::PowerClass::PublicSafety);
        set_power(without, channel::PowerClass::Private);
        break;
    }
    return {std::move(with), std::move(without)};
}

ComparisonReport cmd_compare(const fs::path& config_path, CompareAxis axis, const fs::path& out_dir,
                             const RunOptions& options) {
    const config::RunConfig base = config::load_run_config(config_path, options.overrides);
    auto [with_cfg, without_cfg] = comparison_legs(base, axis);

    ComparisonReport report{axis, "", "", {}, {}, {}};
    switch (axis) {
    case CompareAxis::Antenna:
        report.leg_with = with_cfg.scenario.train.antenna.kind() == antenna::AntennaKind::UniformLinearArray
                              ? "ula" + std::to_string(with_cfg.scenario.train.antenna.num_elements())
                              : "ula";
        report.leg_without = "omni";
        break;
    case CompareAxis::Relay:
        report.leg_with = "relay_on";
        report.leg_without = "relay_off";
        break;
    case CompareAxis::Power:
        report.leg_with = "public_safety";
        report.leg_without = "private";
        break;
    }

    auto fut_with = std::async(std::launch::async, [&] { return run_config(with_cfg, out_dir / report.leg_with, options.kmz); });
    auto fut_without =
        std::async(std::launch::async, [&] { return run_config(without_cfg, out_dir / report.leg_without, options.kmz); });
    report.with = fut_with.get();
    report.without = fut_without.get();

    if (report.with.stats && report.without.stats) {
        for (const auto& a : report.with.stats->receivers) {
            const sim::ReceiverStats* b = report.without.stats->receiver(a.id);
            if (!b)
                continue;
            ReceiverDelta d;
            d.id = a.id;
            d.pdr_with = a.delivery.pdr;
            d.pdr_without = b->delivery.pdr;
            d.coverage_with_m = a.delivery.coverage_range_m;
            d.coverage_without_m = b->delivery.coverage_range_m;
            std::map<long, double> deltas;
            for (const auto& bin : a.delivery.bins)
                deltas[bin.index] += bin.pdr;
            for (const auto& bin : b->delivery.bins)
                deltas[bin.index] -= bin.pdr;
            d.bin_pdr_delta.assign(deltas.begin(), deltas.end());
            report.receivers.push_back(std::move(d));
        }
    }
    fs::create_directories(out_dir);
    write_file(out_dir / kComparisonFile, report.to_json().dump(2) + "\n");
    return report;
}

std::string format_summary(const sim::Stats& stats) {
    std::ostringstream os;
    os << "packets broadcast: " << stats.packets << "\n";
    os << "receiver      role  received    PDR   coverage(m)  direct PDR  direct cov(m)\n";
    for (const auto& r : stats.receivers) {
        char line[160];
        std::snprintf(line, sizeof line, "%-12s  %-4s  %8zu  %5s  %11s  %10s  %13s\n", r.id.c_str(),
                      r.role == ReceiverRole::Rsu ? "rsu" : "obu", r.delivery.received,
                      fixed(r.delivery.pdr, 3).c_str(), fixed(r.delivery.coverage_range_m, 1).c_str(),
                      r.direct_only ? fixed(r.direct_only->pdr, 3).c_str() : "-",
                      r.direct_only ? fixed(r.direct_only->coverage_range_m, 1).c_str() : "-");
        os << line;
    }
    return os.str();
}

} // namespace railwarn::cli
