#ifndef RAILWARN_COMMANDS_HPP
#define RAILWARN_COMMANDS_HPP

#include "railwarn/config.hpp"
#include "railwarn/ingest.hpp"
#include "railwarn/stats.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace railwarn::cli {

namespace fs = std::filesystem;

inline constexpr std::string_view kTraceFile = "trace.kml";
inline constexpr std::string_view kKmzFile = "trace.kmz";
inline constexpr std::string_view kPacketsFile = "packets.csv";
inline constexpr std::string_view kStatsFile = "stats.json";
inline constexpr std::string_view kComparisonFile = "comparison.json";

struct RunReport {
    std::string scenario_hash;
    std::optional<sim::Stats> stats; // absent when there were no packets
    std::vector<fs::path> outputs;
    std::vector<std::string> warnings;
    double wall_time_ms = 0.0;
};

struct RunOptions {
    config::Overrides overrides;
    bool kmz = false;
};

/// Validates and runs a scenario config, writing trace.kml, packets.csv and
/// stats.json into out_dir. Throws ValidationError listing every problem.
RunReport cmd_run(const fs::path& config_path, const fs::path& out_dir, const RunOptions& options = {});

/// Runs an already-parsed config (shared by run and compare).
RunReport run_config(const config::RunConfig& cfg, const fs::path& out_dir, bool kmz = false);

struct ReplayOptions {
    std::optional<fs::path> nmea_path;
    ingest::ParseMode mode = ingest::ParseMode::Lenient;
    ingest::UnitPositions units;
    double bin_width_m = sim::kDefaultBinWidthM;
    std::size_t kml_decimate = 1;
    bool kmz = false;
};

/// Replays a field packet log (plus optional NMEA track) into the same
/// outputs as cmd_run. Throws IngestError on unusable input.
RunReport cmd_replay(const fs::path& packets_csv, const fs::path& out_dir, const ReplayOptions& options = {});

enum class CompareAxis { Antenna, Relay, Power };

std::optional<CompareAxis> parse_axis(std::string_view s) noexcept;
std::string_view to_string(CompareAxis axis) noexcept;

struct ReceiverDelta {
    std::string id;
    double pdr_with = 0.0;
    double pdr_without = 0.0;
    double coverage_with_m = 0.0;
    double coverage_without_m = 0.0;
    /// PDR differences per distance bin present in either leg (with - without).
    std::vector<std::pair<long, double>> bin_pdr_delta;

    double pdr_delta() const noexcept { return pdr_with - pdr_without; }
    double coverage_delta_m() const noexcept { return coverage_with_m - coverage_without_m; }
    /// coverage_with / coverage_without, when the latter is positive.
    std::optional<double> coverage_ratio() const noexcept;
};

struct ComparisonReport {
    CompareAxis axis;
    std::string leg_with;    // e.g. "ula8", "relay_on", "public_safety"
    std::string leg_without; // e.g. "omni", "relay_off", "private"
    RunReport with;
    RunReport without;
    std::vector<ReceiverDelta> receivers;

    const ReceiverDelta* receiver(const std::string& id) const noexcept;
    nlohmann::json to_json() const;
};

/// Builds the two legs of a comparison from a base config.
std::pair<config::RunConfig, config::RunConfig> comparison_legs(const config::RunConfig& base, CompareAxis axis);

/// Runs both legs with the same seed and writes per-leg outputs under
/// out_dir/<leg>/ plus comparison.json.
ComparisonReport cmd_compare(const fs::path& config_path, CompareAxis axis, const fs::path& out_dir,
                             const RunOptions& options = {});

/// Human-readable per-receiver table.
std::string format_summary(const sim::Stats& stats);

} // namespace railwarn::cli

#endif // RAILWARN_COMMANDS_HPP
