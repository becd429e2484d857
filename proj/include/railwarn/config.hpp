#ifndef RAILWARN_CONFIG_HPP
#define RAILWARN_CONFIG_HPP

#include "railwarn/sim.hpp"
#include "railwarn/stats.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace railwarn::config {

/// A scenario plus the output options that travel with it.
struct RunConfig {
    sim::Scenario scenario;
    double bin_width_m = sim::kDefaultBinWidthM;
    std::size_t kml_decimate = 1;
};

struct Overrides {
    std::optional<std::uint64_t> seed;
};

/**
 * Builds a RunConfig from a JSON document. Every problem found (unknown
 * field, wrong type, out-of-range value, scenario invariant) is reported
 * together in one ValidationError.
 */
RunConfig parse_run_config(const nlohmann::json& doc, const Overrides& overrides = {});

/// Reads and parses a JSON config file. A missing or unreadable file, or
/// malformed JSON, is reported as a ValidationError on field "<file>".
RunConfig load_run_config(const std::filesystem::path& path, const Overrides& overrides = {});

/// Reads the raw JSON of a config file (same error reporting as above).
nlohmann::json read_json_file(const std::filesystem::path& path);

nlohmann::json to_json(const sim::DeliveryStats& s);
nlohmann::json to_json(const sim::Stats& stats, std::string_view scenario_hash);

} // namespace railwarn::config

#endif // RAILWARN_CONFIG_HPP
