#include <json.hpp>

#include "airtrust/adsb/types.hpp"
#include "airtrust/common/numfmt.hpp"

namespace airtrust::adsb {

namespace {

void append_escaped(std::string& out, const std::string& s) {
    out.push_back('"');
    for (char c : s) {
        switch (c) {
            case '"': out += "\\\""; break;
            case '\\': out += "\\\\"; break;
            case '\n': out += "\\n"; break;
            case '\t': out += "\\t"; break;
            case '\r': out += "\\r"; break;
            default:
                if (static_cast<unsigned char>(c) < 0x20) {
                    char buf[8];
                    std::snprintf(buf, sizeof(buf), "\\u%04x", c);
                    out += buf;
                } else {
                    out.push_back(c);
                }
        }
    }
    out.push_back('"');
}

}  // namespace

std::string record_to_json(const AdsbRecord& r) {
    std::string out = "{";
    out += "\"icao\":";
    append_escaped(out, r.icao);
    if (r.callsign) {
        out += ",\"callsign\":";
        append_escaped(out, *r.callsign);
    }
    out += ",\"lat_deg\":" + format_fixed(r.lat_deg, 6);
    out += ",\"lon_deg\":" + format_fixed(r.lon_deg, 6);
    out += ",\"altitude_ft\":" + std::to_string(r.altitude_ft);
    out += ",\"ground_speed_kt\":" + format_fixed(r.ground_speed_kt, 6);
    out += ",\"track_deg\":" + format_fixed(r.track_deg, 6);
    out += ",\"vertical_rate_fpm\":" + std::to_string(r.vertical_rate_fpm);
    out += ",\"timestamp\":" + format_fixed(r.timestamp, 6);
    out += "}";
    return out;
}

AdsbRecord record_from_json(const std::string& text) {
    auto j = nlohmann::json::parse(text);
    AdsbRecord r;
    r.icao = j.at("icao").get<std::string>();
    if (j.contains("callsign")) r.callsign = j.at("callsign").get<std::string>();
    r.lat_deg = j.at("lat_deg").get<double>();
    r.lon_deg = j.at("lon_deg").get<double>();
    r.altitude_ft = j.at("altitude_ft").get<int>();
    r.ground_speed_kt = j.at("ground_speed_kt").get<double>();
    r.track_deg = j.at("track_deg").get<double>();
    r.vertical_rate_fpm = j.at("vertical_rate_fpm").get<int>();
    r.timestamp = j.at("timestamp").get<double>();
    return r;
}

}  // namespace airtrust::adsb
