#ifndef RAILWARN_INGEST_HPP
#define RAILWARN_INGEST_HPP

#include "railwarn/geo.hpp"
#include "railwarn/packet_log.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace railwarn::ingest {

/// Header of the canonical packet-log CSV, byte for byte.
inline constexpr std::string_view kPacketLogHeader = "seq,tx_time_ms,tx_lat,tx_lon,rsu_received,obu_received";

inline constexpr std::int64_t kMsPerDay = 86'400'000;

// ---------------------------------------------------------------- NMEA 0183

enum class SentenceType { GGA, RMC };

struct GpsFix {
    std::int64_t time_ms = 0; // since midnight UTC
    geo::GeoPoint position{0.0, 0.0};
    int quality = 0;
    SentenceType source = SentenceType::GGA;
};

enum class NmeaErrorKind { Checksum, Unsupported, Parse };

class NmeaError : public std::runtime_error {
public:
    NmeaError(NmeaErrorKind kind, std::string field, const std::string& what)
        : std::runtime_error(what), kind_(kind), field_(std::move(field)) {}

    NmeaErrorKind kind() const noexcept { return kind_; }
    /// Offending field for parse errors ("checksum" for checksum errors).
    const std::string& field() const noexcept { return field_; }

private:
    NmeaErrorKind kind_;
    std::string field_;
};

/// XOR of every byte between '$' and '*'.
std::uint8_t nmea_checksum(std::string_view body) noexcept;

/**
 * Parses one GGA or RMC sentence (any talker id). The trailing *XX checksum
 * is mandatory and verified. Throws NmeaError for every malformed input;
 * no other exception escapes.
 */
GpsFix parse_nmea_sentence(std::string_view line);

/// Renders a fix as a checksummed sentence of its source type.
std::string format_nmea_sentence(const GpsFix& fix);

// ---------------------------------------------------------------- packet CSV

enum class ParseMode { Lenient, Strict };

struct PacketRecord {
    std::uint64_t seq = 0;
    std::int64_t tx_time_ms = 0;
    std::optional<double> tx_lat;
    std::optional<double> tx_lon;
    bool rsu_received = false;
    bool obu_received = false;

    bool has_position() const noexcept { return tx_lat.has_value(); }
    bool operator==(const PacketRecord&) const = default;
};

struct LineError {
    std::size_t line = 0; // 1-based line number in the file
    std::string message;

    std::string to_string() const { return "line " + std::to_string(line) + ": " + message; }
};

/// A fatal ingest failure with every underlying detail.
class IngestError : public std::runtime_error {
public:
    IngestError(const std::string& what, std::vector<std::string> details = {})
        : std::runtime_error(compose(what, details)), details_(std::move(details)) {}

    const std::vector<std::string>& details() const noexcept { return details_; }

private:
    static std::string compose(const std::string& what, const std::vector<std::string>& details) {
        std::string s = what;
        for (const auto& d : details)
            s += "\n  " + d;
        return s;
    }

    std::vector<std::string> details_;
};

struct PacketLogParse {
    std::vector<PacketRecord> records;
    std::vector<LineError> errors;
};

/**
 * Reads the packet-log CSV. Columns are located by header name; a missing
 * column is fatal. Bad rows are collected in `errors` and skipped
 * (lenient) or raised together as one IngestError (strict).
 */
PacketLogParse parse_packet_log(std::istream& in, ParseMode mode = ParseMode::Lenient);

struct NmeaParse {
    std::vector<GpsFix> fixes;
    std::vector<LineError> errors;
    std::size_t unsupported = 0;
};

/// One sentence per line; unsupported sentence types are counted and skipped.
NmeaParse parse_nmea_stream(std::istream& in, ParseMode mode = ParseMode::Lenient);

/// Canonical CSV of a log: one row per fate, receiver flags aggregated by role.
std::string write_packet_log(const SimLog& log);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

// ---------------------------------------------------------------- replay

struct UnitPositions {
    std::vector<geo::GeoPoint> rsus;
    std::vector<geo::GeoPoint> obus;
};

/// Receiver ids used for replayed logs.
inline constexpr std::string_view kReplayRsuId = "rsu";
inline constexpr std::string_view kReplayObuId = "obu";

/**
 * Rebuilds packet fates from field records. Records without lat/lon take a
 * position interpolated linearly in the local ENU frame between the two
 * bracketing fixes; their tx_time_ms is then read on the fix clock (ms since
 * midnight UTC). Distances are measured to the first RSU / OBU position
 * given, when any.
 */
SimLog replay(std::span<const GpsFix> fixes, std::span<const PacketRecord> records,
              const UnitPositions& units = {});

} // namespace railwarn::ingest

#endif // RAILWARN_INGEST_HPP
