// railwarn: simulate, replay and compare grade-crossing warning broadcasts.

#include "railwarn/commands.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <string>

namespace {

using namespace railwarn;

enum class Verbosity { Quiet = 0, Warn = 1, Info = 2 };

Verbosity verbosity_from_env() {
    const char* v = std::getenv("RAILWARN_LOG");
    if (!v)
        return Verbosity::Warn;
    const std::string s(v);
    if (s == "quiet" || s == "error")
        return Verbosity::Quiet;
    if (s == "info" || s == "debug")
        return Verbosity::Info;
    return Verbosity::Warn;
}

geo::GeoPoint parse_lat_lon(const std::string& text) {
    const auto comma = text.find(',');
    if (comma == std::string::npos)
        throw CLI::ValidationError("expected LAT,LON, got '" + text + "'");
    try {
        const double lat = std::stod(text.substr(0, comma));
        const double lon = std::stod(text.substr(comma + 1));
        return geo::GeoPoint(lat, lon);
    } catch (const std::exception& e) {
        throw CLI::ValidationError("bad position '" + text + "': " + e.what());
    }
}

void report(const cli::RunReport& r, Verbosity v, bool summary) {
    if (v >= Verbosity::Warn)
        for (const auto& w : r.warnings)
            std::cerr << "warning: " << w << "\n";
    if (v >= Verbosity::Info) {
        if (!r.scenario_hash.empty())
            std::cerr << "scenario " << r.scenario_hash << "\n";
        for (const auto& p : r.outputs)
            std::cerr << "wrote " << p.string() << "\n";
        std::cerr << "wall time " << r.wall_time_ms << " ms\n";
    }
    if (summary && r.stats)
        std::cout << cli::format_summary(*r.stats);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Grade-crossing DSRC warning simulator and field-log analyzer"};
    app.require_subcommand(1);
    const Verbosity verbosity = verbosity_from_env();

    std::string config_path, out_dir, csv_path, nmea_path, axis_name;
    std::uint64_t seed = 0;
    bool summary = false, kmz = false, strict = false;
    std::vector<std::string> rsu_pos, obu_pos;
    double bin_width = sim::kDefaultBinWidthM;
    std::size_t decimate = 1;

    auto* run = app.add_subcommand("run", "Run a scenario config");
    run->add_option("config", config_path, "Scenario config (JSON)")->required();
    run->add_option("-o,--out", out_dir, "Output directory")->required();
    auto* run_seed = run->add_option("--seed", seed, "Override the config seed");
    run->add_flag("--summary", summary, "Print a per-receiver table");
    run->add_flag("--kmz", kmz, "Also write trace.kmz");

    auto* replay = app.add_subcommand("replay", "Replay a field packet log");
    replay->add_option("packets", csv_path, "Packet log CSV")->required();
    replay->add_option("-o,--out", out_dir, "Output directory")->required();
    replay->add_option("--nmea", nmea_path, "NMEA GPS log used to position rows without lat/lon");
    replay->add_option("--rsu", rsu_pos, "RSU position LAT,LON (repeatable)");
    replay->add_option("--obu", obu_pos, "OBU position LAT,LON (repeatable)");
    replay->add_option("--bin-width", bin_width, "Distance bin width (m)")->check(CLI::PositiveNumber);
    replay->add_option("--decimate", decimate, "Keep every Nth packet point in the KML")->check(CLI::PositiveNumber);
    replay->add_flag("--strict", strict, "Fail on the first bad row instead of skipping it");
    replay->add_flag("--summary", summary, "Print a per-receiver table");
    replay->add_flag("--kmz", kmz, "Also write trace.kmz");

    auto* compare = app.add_subcommand("compare", "Run paired scenarios differing on one axis");
    compare->add_option("config", config_path, "Scenario config (JSON)")->required();
    compare->add_option("--axis", axis_name, "antenna | relay | power")
        ->required()
        ->check(CLI::IsMember({"antenna", "relay", "power"}));
    compare->add_option("-o,--out", out_dir, "Output directory")->required();
    auto* cmp_seed = compare->add_option("--seed", seed, "Override the config seed");
    compare->add_flag("--summary", summary, "Print a comparison table");
    compare->add_flag("--kmz", kmz, "Also write trace.kmz per leg");

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            cli::RunOptions opts;
            if (*run_seed)
                opts.overrides.seed = seed;
            opts.kmz = kmz;
            report(cli::cmd_run(config_path, out_dir, opts), verbosity, summary);
        } else if (*replay) {
            cli::ReplayOptions opts;
            if (!nmea_path.empty())
                opts.nmea_path = nmea_path;
            opts.mode = strict ? ingest::ParseMode::Strict : ingest::ParseMode::Lenient;
            for (const auto& p : rsu_pos)
                opts.units.rsus.push_back(parse_lat_lon(p));
            for (const auto& p : obu_pos)
                opts.units.obus.push_back(parse_lat_lon(p));
            opts.bin_width_m = bin_width;
            opts.kml_decimate = decimate;
            opts.kmz = kmz;
            report(cli::cmd_replay(csv_path, out_dir, opts), verbosity, summary);
        } else if (*compare) {
            cli::RunOptions opts;
            if (*cmp_seed)
                opts.overrides.seed = seed;
            opts.kmz = kmz;
            const auto result = cli::cmd_compare(config_path, *cli::parse_axis(axis_name), out_dir, opts);
            report(result.with, verbosity, false);
            report(result.without, verbosity, false);
            if (summary) {
                std::cout << "axis " << cli::to_string(result.axis) << ": " << result.leg_with << " vs "
                          << result.leg_without << "\n";
                for (const auto& r : result.receivers) {
                    std::cout << "  " << r.id << "  PDR " << r.pdr_with << " vs " << r.pdr_without
                              << "  coverage " << r.coverage_with_m << " m vs " << r.coverage_without_m << " m";
                    if (auto ratio = r.coverage_ratio())
                        std::cout << "  (x" << *ratio << ")";
                    std::cout << "\n";
                }
            }
        }
    } catch (const ValidationError& e) {
        std::cerr << "error: invalid scenario\n";
        for (const auto& i : e.issues())
            std::cerr << "  " << i.to_string() << "\n";
        return 2;
    } catch (const ingest::IngestError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
