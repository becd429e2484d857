#include "railwarn/kmlout.hpp"

#include <zlib.h>

namespace railwarn::kmlout {

namespace {

void put16(std::string& out, std::uint16_t v) {
    out += static_cast<char>(v & 0xFF);
    out += static_cast<char>(v >> 8);
}

void put32(std::string& out, std::uint32_t v) {
    put16(out, static_cast<std::uint16_t>(v & 0xFFFF));
    put16(out, static_cast<std::uint16_t>(v >> 16));
}

constexpr std::string_view kEntryName = "doc.kml";
constexpr std::uint16_t kDosDate = (0 << 9) | (1 << 5) | 1; // 1980-01-01, fixed for reproducible output

} // namespace

std::string package_kmz(std::string_view kml) {
    if (kml.size() > 0xFFFFFFFFu)
        throw KmlError("document too large for a zip32 archive");
    const auto size = static_cast<std::uint32_t>(kml.size());
    const auto crc = static_cast<std::uint32_t>(
        crc32(crc32(0L, Z_NULL, 0), reinterpret_cast<const Bytef*>(kml.data()), static_cast<uInt>(kml.size())));

    std::string out;
    // local file header
    put32(out, 0x04034b50);
    put16(out, 20);
    put16(out, 0);
    put16(out, 0); // stored
    put16(out, 0);
    put16(out, kDosDate);
    put32(out, crc);
    put32(out, size);
    put32(out, size);
    put16(out, static_cast<std::uint16_t>(kEntryName.size()));
    put16(out, 0);
    out += kEntryName;
    out += kml;

    const auto central_offset = static_cast<std::uint32_t>(out.size());
    put32(out, 0x02014b50);
    put16(out, 20);
    put16(out, 20);
    put16(out, 0);
    put16(out, 0);
    put16(out, 0);
    put16(out, kDosDate);
    put32(out, crc);
    put32(out, size);
    put32(out, size);
    put16(out, static_cast<std::uint16_t>(kEntryName.size()));
    put16(out, 0);
    put16(out, 0);
    put16(out, 0);
    put16(out, 0);
    put32(out, 0);
    put32(out, 0); // local header offset
    out += kEntryName;
    const auto central_size = static_cast<std::uint32_t>(out.size()) - central_offset;

    put32(out, 0x06054b50);
    put16(out, 0);
    put16(out, 0);
    put16(out, 1);
    put16(out, 1);
    put32(out, central_size);
    put32(out, central_offset);
    put16(out, 0);
    return out;
}

} // namespace railwarn::kmlout
