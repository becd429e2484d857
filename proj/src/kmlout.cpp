#include "railwarn/kmlout.hpp"

#include <cstdio>

namespace railwarn::kmlout {

namespace {

constexpr std::string_view kDotIcon = "http://maps.google.com/mapfiles/kml/shapes/shaded_dot.png";
constexpr std::string_view kUnitIcon = "http://maps.google.com/mapfiles/kml/pushpin/wht-pushpin.png";

std::string xml_escape(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string coordinates(const geo::GeoPoint& p) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.8f,%.8f,0", p.lon(), p.lat());
    return buf;
}

std::string style_id(PacketClass c) {
    return "packet-" + std::string(class_name(c));
}

void icon_style(std::string& out, std::string_view id, std::string_view color, double scale, std::string_view href) {
    char scale_buf[16];
    std::snprintf(scale_buf, sizeof scale_buf, "%.1f", scale);
    out += "    <Style id=\"";
    out += id;
    out += "\">\n      <IconStyle>\n        <color>";
    out += color;
    out += "</color>\n        <scale>";
    out += scale_buf;
    out += "</scale>\n        <Icon><href>";
    out += href;
    out += "</href></Icon>\n      </IconStyle>\n      <LabelStyle><scale>0</scale></LabelStyle>\n    </Style>\n";
}

void point_placemark(std::string& out, std::string_view indent, std::string_view name, std::string_view style,
                     const geo::GeoPoint& p) {
    out += indent;
    out += "<Placemark><name>";
    out += xml_escape(name);
    out += "</name><styleUrl>#";
    out += style;
    out += "</styleUrl><Point><coordinates>";
    out += coordinates(p);
    out += "</coordinates></Point></Placemark>\n";
}

} // namespace

std::string_view class_name(PacketClass c) noexcept {
    switch (c) {
    case PacketClass::White: return "white";
    case PacketClass::Yellow: return "yellow";
    case PacketClass::Blue: return "blue";
    case PacketClass::Green: return "green";
    }
    return "white";
}

std::string_view class_color(PacketClass c) noexcept {
    switch (c) {
    case PacketClass::White: return "ffffffff";
    case PacketClass::Yellow: return "ff00ffff";
    case PacketClass::Blue: return "ffff0000";
    case PacketClass::Green: return "ff00ff00";
    }
    return "ffffffff";
}

PacketClass classify(bool rsu_received, bool obu_received) noexcept {
    if (rsu_received)
        return obu_received ? PacketClass::Green : PacketClass::Yellow;
    return obu_received ? PacketClass::Blue : PacketClass::White;
}

PacketClass classify_multi(const std::map<std::string, bool>& receptions, const std::set<std::string>& rsu_ids,
                           const std::set<std::string>& obu_ids) {
    bool rsu = false, obu = false;
    for (const auto& [id, ok] : receptions) {
        if (rsu_ids.count(id))
            rsu = rsu || ok;
        else if (obu_ids.count(id))
            obu = obu || ok;
        else
            throw KmlError("unclassified receiver role: " + id);
    }
    return classify(rsu, obu);
}

std::vector<ClassifiedPacket> classify_log(const SimLog& log) {
    std::set<std::string> rsu_ids, obu_ids;
    for (const auto& r : log.receivers)
        (r.role == ReceiverRole::Rsu ? rsu_ids : obu_ids).insert(r.id);
    std::vector<ClassifiedPacket> out;
    out.reserve(log.fates.size());
    for (const auto& fate : log.fates) {
        std::map<std::string, bool> rx;
        for (const auto& rec : fate.receptions)
            rx[rec.receiver_id] = rec.received;
        out.push_back({fate.seq, fate.tx_time_ms, fate.tx_position, classify_multi(rx, rsu_ids, obu_ids)});
    }
    return out;
}

std::string emit_kml(std::span<const ClassifiedPacket> packets, std::span<const geo::GeoPoint> rsu_positions,
                     std::span<const geo::GeoPoint> obu_positions, const KmlOptions& options) {
    if (packets.empty() && rsu_positions.empty() && obu_positions.empty())
        throw KmlError("nothing to render");
    const std::size_t every = options.decimate == 0 ? 1 : options.decimate;

    std::string out;
    out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    out += "<kml xmlns=\"http://www.opengis.net/kml/2.2\">\n";
    out += "  <Document>\n    <name>";
    out += xml_escape(options.document_name);
    out += "</name>\n";
    for (auto c : kAllClasses)
        icon_style(out, style_id(c), class_color(c), 0.5, kDotIcon);
    icon_style(out, "unit-rsu", class_color(PacketClass::Yellow), 1.2, kUnitIcon);
    icon_style(out, "unit-obu", class_color(PacketClass::Blue), 1.2, kUnitIcon);

    for (auto c : kAllClasses) {
        out += "    <Folder>\n      <name>";
        out += class_name(c);
        out += "</name>\n";
        const std::string style = style_id(c);
        for (std::size_t i = 0; i < packets.size(); i += every) {
            if (packets[i].packet_class != c)
                continue;
            point_placemark(out, "      ", "seq " + std::to_string(packets[i].seq) + " @ " +
                                               std::to_string(packets[i].tx_time_ms) + " ms",
                            style, packets[i].position);
        }
        out += "    </Folder>\n";
    }

    out += "    <Folder>\n      <name>units</name>\n";
    for (std::size_t i = 0; i < rsu_positions.size(); ++i)
        point_placemark(out, "      ", "RSU " + std::to_string(i), "unit-rsu", rsu_positions[i]);
    for (std::size_t i = 0; i < obu_positions.size(); ++i)
        point_placemark(out, "      ", "OBU " + std::to_string(i), "unit-obu", obu_positions[i]);
    out += "    </Folder>\n  </Document>\n</kml>\n";
    return out;
}

std::string render_log(const SimLog& log, const KmlOptions& options) {
    const auto packets = classify_log(log);
    return emit_kml(packets, log.rsu_positions, log.obu_positions, options);
}

} // namespace railwarn::kmlout
