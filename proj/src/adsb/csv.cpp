#include "airtrust/adsb/csv.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <map>
#include <sstream>

#include "airtrust/common/numfmt.hpp"

namespace airtrust::adsb {

namespace {

std::string lower_trim(std::string s) {
    auto issp = [](unsigned char c) { return std::isspace(c); };
    s.erase(s.begin(), std::find_if_not(s.begin(), s.end(), issp));
    s.erase(std::find_if_not(s.rbegin(), s.rend(), issp).base(), s.end());
    std::transform(s.begin(), s.end(), s.begin(),
                   [](unsigned char c) { return std::tolower(c); });
    return s;
}

// Fixed alias table; first match wins.
const std::map<std::string, std::string> kAliases = {
    {"timestamp", "timestamp"}, {"time", "timestamp"},      {"ts", "timestamp"},
    {"icao", "icao"},           {"icao24", "icao"},         {"hex", "icao"},
    {"callsign", "callsign"},   {"flight", "callsign"},
    {"lat", "lat"},             {"latitude", "lat"},
    {"lon", "lon"},             {"lng", "lon"},             {"longitude", "lon"},
    {"altitude", "altitude"},   {"alt", "altitude"},        {"altitude_ft", "altitude"},
    {"speed", "speed"},         {"ground_speed", "speed"},  {"gs", "speed"},
    {"velocity", "speed"},      {"ground_speed_kt", "speed"},
    {"track", "track"},         {"heading", "track"},       {"track_deg", "track"},
    {"vertical_rate", "vertical_rate"}, {"vr", "vertical_rate"},
    {"vertical_rate_fpm", "vertical_rate"},
};

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::stringstream ss(line);
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

bool parse_double(const std::string& s, double& out) {
    try {
        size_t pos = 0;
        out = std::stod(s, &pos);
        while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) pos++;
        return pos == s.size() && std::isfinite(out);
    } catch (...) {
        return false;
    }
}

}  // namespace

CsvResult ingest_csv(std::istream& in) {
    std::string header_line;
    if (!std::getline(in, header_line)) throw EmptyInput("no header row");
    if (!header_line.empty() && header_line.back() == '\r') header_line.pop_back();

    std::map<std::string, size_t> col;  // canonical name -> index
    auto headers = split_row(header_line);
    for (size_t i = 0; i < headers.size(); ++i) {
        auto it = kAliases.find(lower_trim(headers[i]));
        if (it != kAliases.end() && !col.count(it->second)) col[it->second] = i;
    }
    for (const char* required : {"timestamp", "icao", "lat", "lon", "altitude", "speed", "track"}) {
        if (!col.count(required))
            throw HeaderError(std::string("missing required column: ") + required);
    }

    CsvResult result;
    std::string line;
    size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        ++result.data_rows;

        auto fields = split_row(line);
        auto get = [&](const char* name) -> const std::string* {
            auto it = col.find(name);
            if (it == col.end() || it->second >= fields.size()) return nullptr;
            return &fields[it->second];
        };

        auto skip = [&](const std::string& why) {
            result.skipped.push_back({line_no, why});
        };

        AdsbRecord r;
        const std::string* f;
        double v;

        if (!(f = get("timestamp")) || !parse_double(*f, v) || v <= 0) { skip("bad timestamp"); continue; }
        r.timestamp = v;
        if (!(f = get("icao")) || lower_trim(*f).empty()) { skip("bad icao"); continue; }
        r.icao = *f;
        std::transform(r.icao.begin(), r.icao.end(), r.icao.begin(),
                       [](unsigned char c) { return std::toupper(c); });
        if (!(f = get("lat")) || !parse_double(*f, v) || v < -90 || v > 90) { skip("bad lat"); continue; }
        r.lat_deg = v;
        if (!(f = get("lon")) || !parse_double(*f, v) || v <= -180 || v > 180) { skip("bad lon"); continue; }
        r.lon_deg = v;
        if (!(f = get("altitude")) || !parse_double(*f, v)) { skip("bad altitude"); continue; }
        r.altitude_ft = static_cast<int>(std::lround(v));
        if (!(f = get("speed")) || !parse_double(*f, v) || v < 0) { skip("bad speed"); continue; }
        r.ground_speed_kt = v;
        if (!(f = get("track")) || !parse_double(*f, v)) { skip("bad track"); continue; }
        r.track_deg = std::fmod(std::fmod(v, 360.0) + 360.0, 360.0);
        if ((f = get("vertical_rate")) && parse_double(*f, v))
            r.vertical_rate_fpm = static_cast<int>(std::lround(v));
        if ((f = get("callsign")) && !f->empty()) r.callsign = *f;

        result.records.push_back(std::move(r));
    }
    return result;
}

CsvResult ingest_csv(const std::string& text) {
    std::istringstream ss(text);
    return ingest_csv(ss);
}

std::string records_to_csv(const std::vector<AdsbRecord>& records) {
    std::string out = "timestamp,icao,callsign,lat,lon,altitude,speed,track,vertical_rate\n";
    for (const auto& r : records) {
        out += format_fixed(r.timestamp, 3);
        out += ',';
        out += r.icao;
        out += ',';
        out += r.callsign.value_or("");
        out += ',';
        out += format_fixed(r.lat_deg, 6);
        out += ',';
        out += format_fixed(r.lon_deg, 6);
        out += ',';
        out += std::to_string(r.altitude_ft);
        out += ',';
        out += format_fixed(r.ground_speed_kt, 3);
        out += ',';
        out += format_fixed(r.track_deg, 3);
        out += ',';
        out += std::to_string(r.vertical_rate_fpm);
        out += '\n';
    }
    return out;
}

}  // namespace airtrust::adsb
