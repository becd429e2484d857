#ifndef RAILWARN_KMLOUT_HPP
#define RAILWARN_KMLOUT_HPP

#include "railwarn/geo.hpp"
#include "railwarn/packet_log.hpp"

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace railwarn::kmlout {

class KmlError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Fate of one broadcast by who decoded it:
/// White = nobody, Yellow = RSU only, Blue = OBU only, Green = both.
enum class PacketClass { White, Yellow, Blue, Green };

inline constexpr std::array<PacketClass, 4> kAllClasses{PacketClass::White, PacketClass::Yellow, PacketClass::Blue,
                                                        PacketClass::Green};

std::string_view class_name(PacketClass c) noexcept;

/// KML aabbggrr color of a class.
std::string_view class_color(PacketClass c) noexcept;

PacketClass classify(bool rsu_received, bool obu_received) noexcept;

/// Any-RSU / any-OBU reduction. Throws KmlError("unclassified receiver
/// role") for a receiver in neither set.
PacketClass classify_multi(const std::map<std::string, bool>& receptions, const std::set<std::string>& rsu_ids,
                           const std::set<std::string>& obu_ids);

struct ClassifiedPacket {
    std::uint64_t seq = 0;
    std::int64_t tx_time_ms = 0;
    geo::GeoPoint position{0.0, 0.0};
    PacketClass packet_class = PacketClass::White;
};

/// Classifies every fate of a log by receiver role.
std::vector<ClassifiedPacket> classify_log(const SimLog& log);

struct KmlOptions {
    std::string document_name = "Packet trace";
    /// Keep every Nth packet point (1 = all).
    std::size_t decimate = 1;
};

/**
 * KML 2.2 document: one shared dot style per class, packets grouped in one
 * folder per class, then icon placemarks for RSUs (yellow) and OBUs (blue).
 * Coordinates are written lon,lat,0. Throws KmlError("nothing to render")
 * when there is neither a packet nor a unit.
 */
std::string emit_kml(std::span<const ClassifiedPacket> packets, std::span<const geo::GeoPoint> rsu_positions,
                     std::span<const geo::GeoPoint> obu_positions, const KmlOptions& options = {});

/// classify_log + emit_kml with the log's unit positions.
std::string render_log(const SimLog& log, const KmlOptions& options = {});

/// Zip archive holding the document as doc.kml (stored, uncompressed).
std::string package_kmz(std::string_view kml);

} // namespace railwarn::kmlout

#endif // RAILWARN_KMLOUT_HPP
