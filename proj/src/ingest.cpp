#include "railwarn/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <istream>
#include <map>
#include <set>

namespace railwarn::ingest {

namespace {

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        auto pos = s.find(sep, start);
        if (pos == std::string_view::npos) {
            out.push_back(s.substr(start));
            return out;
        }
        out.push_back(s.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string_view strip_eol(std::string_view s) {
    while (!s.empty() && (s.back() == '\r' || s.back() == '\n'))
        s.remove_suffix(1);
    return s;
}

bool all_digits(std::string_view s) {
    return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

// [-]digits[.digits]; from_chars alone would accept "inf" and "nan".
std::optional<double> parse_decimal(std::string_view s, bool allow_sign) {
    std::string_view body = s;
    if (allow_sign && !body.empty() && body.front() == '-')
        body.remove_prefix(1);
    const auto dot = body.find('.');
    const std::string_view whole = body.substr(0, dot);
    const std::string_view frac = dot == std::string_view::npos ? std::string_view{} : body.substr(dot + 1);
    if (!all_digits(whole) || (dot != std::string_view::npos && !frac.empty() && !all_digits(frac)))
        return std::nullopt;
    double v = 0.0;
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        return std::nullopt;
    return v;
}

template <typename Int>
std::optional<Int> parse_integer(std::string_view s) {
    if (s.empty())
        return std::nullopt;
    Int v{};
    auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc{} || res.ptr != s.data() + s.size())
        return std::nullopt;
    return v;
}

[[noreturn]] void parse_fail(const std::string& field, const std::string& detail = "") {
    throw NmeaError(NmeaErrorKind::Parse, field,
                    "parse error in field '" + field + "'" + (detail.empty() ? "" : ": " + detail));
}

std::int64_t parse_utc_time(std::string_view s) {
    const std::string_view hms = s.substr(0, std::min<std::size_t>(6, s.size()));
    if (hms.size() != 6 || !all_digits(hms))
        parse_fail("time", "expected hhmmss[.sss]");
    const int h = (hms[0] - '0') * 10 + (hms[1] - '0');
    const int m = (hms[2] - '0') * 10 + (hms[3] - '0');
    const int sec = (hms[4] - '0') * 10 + (hms[5] - '0');
    if (h > 23 || m > 59 || sec > 59)
        parse_fail("time", "out of range");
    std::int64_t ms = ((h * 60LL + m) * 60 + sec) * 1000;
    if (s.size() > 6) {
        if (s[6] != '.')
            parse_fail("time", "expected hhmmss[.sss]");
        const std::string_view frac = s.substr(7);
        if (!frac.empty()) {
            if (!all_digits(frac))
                parse_fail("time", "bad fractional seconds");
            // milliseconds, truncated
            int scale = 100;
            for (std::size_t i = 0; i < frac.size() && scale > 0; ++i, scale /= 10)
                ms += (frac[i] - '0') * scale;
        }
    }
    return ms;
}

// ddmm.mmmm / dddmm.mmmm with hemisphere sign.
double parse_coordinate(std::string_view value, std::string_view hemi, const std::string& field, bool is_lat) {
    const char pos_h = is_lat ? 'N' : 'E';
    const char neg_h = is_lat ? 'S' : 'W';
    if (hemi.size() != 1 || (hemi[0] != pos_h && hemi[0] != neg_h))
        parse_fail(field + "_hemisphere", "expected " + std::string(1, pos_h) + " or " + std::string(1, neg_h));
    const auto dot = value.find('.');
    const std::size_t int_len = dot == std::string_view::npos ? value.size() : dot;
    const std::size_t max_deg_digits = is_lat ? 2 : 3;
    if (int_len < 3 || int_len > max_deg_digits + 2)
        parse_fail(field, "expected " + std::string(is_lat ? "ddmm.mmmm" : "dddmm.mmmm"));
    const auto deg = parse_integer<int>(value.substr(0, int_len - 2));
    const auto min = parse_decimal(value.substr(int_len - 2), false);
    if (!deg || !min || !all_digits(value.substr(0, int_len - 2)))
        parse_fail(field, "not a number");
    if (*min >= 60.0)
        parse_fail(field, "minutes >= 60");
    double v = *deg + *min / 60.0;
    if (v > (is_lat ? 90.0 : 180.0))
        parse_fail(field, "out of range");
    return hemi[0] == neg_h ? -v : v;
}

char hex_digit(unsigned v) {
    return "0123456789ABCDEF"[v & 0xF];
}

std::string two_hex(std::uint8_t v) {
    return {hex_digit(v >> 4), hex_digit(v)};
}

std::string format_time(std::int64_t time_ms) {
    const std::int64_t t = std::clamp<std::int64_t>(time_ms, 0, kMsPerDay - 1);
    char buf[16];
    std::snprintf(buf, sizeof buf, "%02lld%02lld%02lld.%03lld", static_cast<long long>(t / 3'600'000),
                  static_cast<long long>(t / 60'000 % 60), static_cast<long long>(t / 1000 % 60),
                  static_cast<long long>(t % 1000));
    return buf;
}

std::string format_coordinate(double deg, bool is_lat) {
    // integer micro-minutes so that rounding never yields 60 minutes
    const long long micro = std::llround(std::abs(deg) * 60.0 * 1e6);
    const long long whole_deg = micro / 60'000'000LL;
    const long long rem = micro % 60'000'000LL;
    char buf[32];
    std::snprintf(buf, sizeof buf, is_lat ? "%02lld%02lld.%06lld,%c" : "%03lld%02lld.%06lld,%c", whole_deg,
                  rem / 1'000'000LL, rem % 1'000'000LL,
                  is_lat ? (deg < 0 ? 'S' : 'N') : (deg < 0 ? 'W' : 'E'));
    return buf;
}

std::optional<bool> parse_bool(std::string_view s) {
    if (s == "1" || s == "true")
        return true;
    if (s == "0" || s == "false")
        return false;
    return std::nullopt;
}

} // namespace

std::uint8_t nmea_checksum(std::string_view body) noexcept {
    std::uint8_t x = 0;
    for (unsigned char c : body)
        x ^= c;
    return x;
}

GpsFix parse_nmea_sentence(std::string_view line) {
    line = strip_eol(line);
    if (line.empty())
        parse_fail("sentence", "empty line");
    for (unsigned char c : line)
        if (c < 0x20 || c > 0x7E)
            parse_fail("sentence", "non-printable or non-ASCII byte");
    if (line.front() != '$')
        parse_fail("sentence", "missing '$'");
    const auto star = line.rfind('*');
    if (star == std::string_view::npos || star + 3 != line.size())
        parse_fail("checksum", "missing *XX checksum");
    const std::string_view body = line.substr(1, star - 1);
    const std::string_view given = line.substr(star + 1);
    std::uint8_t actual = 0;
    auto res = std::from_chars(given.data(), given.data() + 2, actual, 16);
    if (res.ec != std::errc{} || res.ptr != given.data() + 2)
        parse_fail("checksum", "checksum is not two hex digits");
    const std::uint8_t expected = nmea_checksum(body);
    if (expected != actual)
        throw NmeaError(NmeaErrorKind::Checksum, "checksum",
                        "checksum error: expected " + two_hex(expected) + ", actual " + two_hex(actual));

    const auto f = split(body, ',');
    const std::string_view address = f[0];
    if (address.size() != 5)
        parse_fail("address", "expected talker id and sentence type");
    const std::string_view type = address.substr(2);

    GpsFix fix;
    if (type == "GGA") {
        if (f.size() < 10)
            parse_fail("fields", "GGA needs at least 10 fields");
        fix.source = SentenceType::GGA;
        fix.time_ms = parse_utc_time(f[1]);
        const double lat = parse_coordinate(f[2], f[3], "lat", true);
        const double lon = parse_coordinate(f[4], f[5], "lon", false);
        const auto q = parse_integer<int>(f[6]);
        if (!q || *q < 0 || *q > 9)
            parse_fail("quality", "expected a digit 0-9");
        fix.quality = *q;
        double alt = 0.0;
        if (!f[9].empty()) {
            const auto a = parse_decimal(f[9], true);
            if (!a)
                parse_fail("altitude", "not a number");
            alt = *a;
        }
        fix.position = geo::GeoPoint(lat, lon, alt);
    } else if (type == "RMC") {
        if (f.size() < 7)
            parse_fail("fields", "RMC needs at least 7 fields");
        fix.source = SentenceType::RMC;
        fix.time_ms = parse_utc_time(f[1]);
        if (f[2] == "A")
            fix.quality = 1;
        else if (f[2] == "V")
            fix.quality = 0;
        else
            parse_fail("status", "expected A or V");
        const double lat = parse_coordinate(f[3], f[4], "lat", true);
        const double lon = parse_coordinate(f[5], f[6], "lon", false);
        fix.position = geo::GeoPoint(lat, lon);
    } else {
        throw NmeaError(NmeaErrorKind::Unsupported, "address",
                        "unsupported sentence: " + std::string(address));
    }
    return fix;
}

std::string format_nmea_sentence(const GpsFix& fix) {
    std::string body;
    const std::string lat = format_coordinate(fix.position.lat(), true);
    const std::string lon = format_coordinate(fix.position.lon(), false);
    if (fix.source == SentenceType::GGA) {
        char alt[32];
        std::snprintf(alt, sizeof alt, "%.1f", fix.position.alt());
        body = "GPGGA," + format_time(fix.time_ms) + "," + lat + "," + lon + "," +
               std::to_string(std::clamp(fix.quality, 0, 9)) + ",08,1.0," + alt + ",M,0.0,M,,";
    } else {
        body = "GPRMC," + format_time(fix.time_ms) + "," + (fix.quality > 0 ? "A" : "V") + "," + lat + "," + lon +
               ",0.0,0.0,010100,,";
    }
    return "$" + body + "*" + two_hex(nmea_checksum(body));
}

NmeaParse parse_nmea_stream(std::istream& in, ParseMode mode) {
    NmeaParse out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (strip_eol(line).empty())
            continue;
        try {
            out.fixes.push_back(parse_nmea_sentence(line));
        } catch (const NmeaError& e) {
            if (e.kind() == NmeaErrorKind::Unsupported)
                ++out.unsupported;
            else
                out.errors.push_back({lineno, e.what()});
        } catch (const geo::GeoError& e) {
            out.errors.push_back({lineno, e.what()});
        }
    }
    if (mode == ParseMode::Strict && !out.errors.empty()) {
        std::vector<std::string> details;
        for (const auto& e : out.errors)
            details.push_back(e.to_string());
        throw IngestError("NMEA input has " + std::to_string(out.errors.size()) + " bad line(s)", details);
    }
    return out;
}

PacketLogParse parse_packet_log(std::istream& in, ParseMode mode) {
    static constexpr std::string_view kColumns[] = {"seq",    "tx_time_ms",   "tx_lat",
                                                    "tx_lon", "rsu_received", "obu_received"};
    std::string header_line;
    if (!std::getline(in, header_line))
        throw IngestError("packet log is empty: missing header row");
    const auto header = split(strip_eol(header_line), ',');

    std::map<std::string_view, std::size_t> col;
    std::vector<std::string> problems;
    for (std::size_t i = 0; i < header.size(); ++i)
        if (!col.emplace(header[i], i).second)
            problems.push_back("duplicate column: " + std::string(header[i]));
    for (auto name : kColumns)
        if (!col.count(name))
            problems.push_back("missing column: " + std::string(name));
    if (!problems.empty())
        throw IngestError("packet log header does not match schema '" + std::string(kPacketLogHeader) + "'",
                          problems);

    std::size_t idx[6];
    for (std::size_t i = 0; i < 6; ++i)
        idx[i] = col.at(kColumns[i]);
    const std::size_t ncols = header.size();

    PacketLogParse out;
    std::set<std::pair<std::uint64_t, std::int64_t>> keys;
    std::optional<std::int64_t> last_time;
    std::string line;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string_view row = strip_eol(line);
        if (row.empty())
            continue;
        const auto f = split(row, ',');
        auto fail = [&](std::string msg) { out.errors.push_back({lineno, std::move(msg)}); };
        if (f.size() != ncols) {
            fail("expected " + std::to_string(ncols) + " fields, got " + std::to_string(f.size()));
            continue;
        }
        PacketRecord r;
        const auto seq = parse_integer<std::uint64_t>(f[idx[0]]);
        const auto t = parse_integer<std::int64_t>(f[idx[1]]);
        const auto rsu = parse_bool(f[idx[4]]);
        const auto obu = parse_bool(f[idx[5]]);
        if (!seq) {
            fail("seq: not a non-negative integer");
            continue;
        }
        if (!t || *t < 0) {
            fail("tx_time_ms: not a non-negative integer");
            continue;
        }
        if (!rsu) {
            fail("rsu_received: '" + std::string(f[idx[4]]) + "' not in {0,1,true,false}");
            continue;
        }
        if (!obu) {
            fail("obu_received: '" + std::string(f[idx[5]]) + "' not in {0,1,true,false}");
            continue;
        }
        const std::string_view lat_s = f[idx[2]], lon_s = f[idx[3]];
        if (lat_s.empty() != lon_s.empty()) {
            fail("tx_lat and tx_lon must both be present or both empty");
            continue;
        }
        if (!lat_s.empty()) {
            const auto lat = parse_decimal(lat_s, true);
            const auto lon = parse_decimal(lon_s, true);
            if (!lat || !lon || *lat < -90.0 || *lat > 90.0 || *lon < -180.0 || *lon > 180.0) {
                fail("tx_lat/tx_lon: not a valid coordinate");
                continue;
            }
            r.tx_lat = lat;
            r.tx_lon = lon;
        }
        if (!keys.emplace(*seq, *t).second) {
            fail("duplicate (seq, tx_time_ms) = (" + std::to_string(*seq) + ", " + std::to_string(*t) + ")");
            continue;
        }
        if (last_time && *t < *last_time) {
            fail("tx_time_ms decreases");
            continue;
        }
        r.seq = *seq;
        r.tx_time_ms = *t;
        r.rsu_received = *rsu;
        r.obu_received = *obu;
        last_time = r.tx_time_ms;
        out.records.push_back(r);
    }
    if (mode == ParseMode::Strict && !out.errors.empty()) {
        std::vector<std::string> details;
        for (const auto& e : out.errors)
            details.push_back(e.to_string());
        throw IngestError("packet log has " + std::to_string(out.errors.size()) + " bad row(s)", details);
    }
    return out;
}

std::string format_double(double v) {
    char buf[32];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::string write_packet_log(const SimLog& log) {
    std::string out(kPacketLogHeader);
    out += '\n';
    for (const auto& fate : log.fates) {
        bool rsu = false, obu = false;
        for (std::size_t i = 0; i < fate.receptions.size(); ++i) {
            if (!fate.receptions[i].received)
                continue;
            (log.receivers.at(i).role == ReceiverRole::Rsu ? rsu : obu) = true;
        }
        out += std::to_string(fate.seq);
        out += ',';
        out += std::to_string(fate.tx_time_ms);
        out += ',';
        out += format_double(fate.tx_position.lat());
        out += ',';
        out += format_double(fate.tx_position.lon());
        out += rsu ? ",1" : ",0";
        out += obu ? ",1\n" : ",0\n";
    }
    return out;
}

SimLog replay(std::span<const GpsFix> fixes, std::span<const PacketRecord> records, const UnitPositions& units) {
    if (records.empty())
        throw IngestError("no packet records to replay");

    std::vector<GpsFix> sorted(fixes.begin(), fixes.end());
    std::stable_sort(sorted.begin(), sorted.end(),
                     [](const GpsFix& a, const GpsFix& b) { return a.time_ms < b.time_ms; });

    std::vector<PacketRecord> recs(records.begin(), records.end());
    std::stable_sort(recs.begin(), recs.end(), [](const PacketRecord& a, const PacketRecord& b) {
        return std::pair(a.tx_time_ms, a.seq) < std::pair(b.tx_time_ms, b.seq);
    });

    auto interpolate = [&](std::int64_t t) -> std::optional<geo::GeoPoint> {
        if (sorted.empty() || t < sorted.front().time_ms || t > sorted.back().time_ms)
            return std::nullopt;
        auto hi = std::lower_bound(sorted.begin(), sorted.end(), t,
                                   [](const GpsFix& f, std::int64_t v) { return f.time_ms < v; });
        if (hi->time_ms == t)
            return hi->position;
        auto lo = std::prev(hi);
        const double frac = static_cast<double>(t - lo->time_ms) / static_cast<double>(hi->time_ms - lo->time_ms);
        const geo::EnuVector v = geo::to_enu(lo->position, hi->position);
        return geo::from_enu(lo->position, v * frac);
    };

    SimLog log;
    log.relay_path_known = false;
    log.receivers = {{std::string(kReplayRsuId), ReceiverRole::Rsu}, {std::string(kReplayObuId), ReceiverRole::Obu}};
    log.rsu_positions = units.rsus;
    log.obu_positions = units.obus;

    std::vector<std::string> uncovered;
    for (const auto& r : recs) {
        PacketFate fate;
        fate.seq = r.seq;
        fate.tx_time_ms = r.tx_time_ms;
        if (r.has_position()) {
            fate.tx_position = geo::GeoPoint(*r.tx_lat, *r.tx_lon);
        } else if (auto p = interpolate(r.tx_time_ms)) {
            fate.tx_position = geo::GeoPoint(p->lat(), p->lon());
        } else {
            uncovered.push_back("seq " + std::to_string(r.seq) + " at " + std::to_string(r.tx_time_ms) + " ms");
            continue;
        }
        auto reception = [&](std::string_view id, bool ok, const std::vector<geo::GeoPoint>& where) {
            Reception rec;
            rec.receiver_id = std::string(id);
            rec.received = ok;
            if (!where.empty())
                rec.distance_m = geo::haversine_distance(fate.tx_position, where.front());
            return rec;
        };
        fate.receptions.push_back(reception(kReplayRsuId, r.rsu_received, units.rsus));
        fate.receptions.push_back(reception(kReplayObuId, r.obu_received, units.obus));
        log.fates.push_back(std::move(fate));
    }
    if (!uncovered.empty())
        throw IngestError(sorted.empty() ? "records lack positions and no GPS fixes were given"
                                         : "records outside the GPS fix time span",
                          uncovered);
    return log;
}

} // namespace railwarn::ingest
