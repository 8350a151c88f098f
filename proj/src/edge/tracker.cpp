#include "airtrust/edge/tracker.hpp"

#include <json.hpp>

#include "airtrust/common/geo.hpp"
#include "airtrust/common/numfmt.hpp"

namespace airtrust::edge {

UpdateOutcome TrackStore::update(const adsb::AdsbRecord& record) {
    auto it = tracks_.find(record.icao);
    bool in_box = box_.contains(record.lat_deg, record.lon_deg);

    if (!in_box) {
        counters_.ignored++;
        if (it != tracks_.end()) {
            counters_.closed_points += it->second.points.size();
            key_by_icao_.erase(record.icao);
            tracks_.erase(it);
            return UpdateOutcome::TrackClosed;
        }
        return UpdateOutcome::IgnoredOutOfBox;
    }

    if (it == tracks_.end()) {
        Track t;
        t.icao = record.icao;
        t.first_seen = record.timestamp;
        t.points.push_back({record.timestamp, record.lat_deg, record.lon_deg,
                            record.altitude_ft, record.ground_speed_kt, record.track_deg});
        tracks_.emplace(record.icao, std::move(t));
        counters_.accepted++;
        return UpdateOutcome::Appended;
    }

    Track& t = it->second;
    // Strictly increasing timestamps per track; duplicates count as regressions.
    if (!t.points.empty() && record.timestamp <= t.points.back().timestamp) {
        counters_.rejected++;
        return UpdateOutcome::RejectedOutOfOrder;
    }
    t.points.push_back({record.timestamp, record.lat_deg, record.lon_deg,
                        record.altitude_ft, record.ground_speed_kt, record.track_deg});
    counters_.accepted++;
    if (t.points.size() > window_) {
        t.points.pop_front();
        counters_.evicted++;
        return UpdateOutcome::AppendedEvicted;
    }
    return UpdateOutcome::Appended;
}

std::vector<std::string> TrackStore::evict_stale(double now, double ttl_s) {
    std::vector<std::string> closed;
    for (auto it = tracks_.begin(); it != tracks_.end();) {
        double last = it->second.points.empty() ? it->second.first_seen
                                                : it->second.points.back().timestamp;
        if (now - last > ttl_s) {
            counters_.closed_points += it->second.points.size();
            closed.push_back(it->first);
            key_by_icao_.erase(it->first);
            it = tracks_.erase(it);
        } else {
            ++it;
        }
    }
    return closed;
}

const Track* TrackStore::find(const std::string& icao) const {
    auto it = tracks_.find(icao);
    return it == tracks_.end() ? nullptr : &it->second;
}

size_t TrackStore::live_points() const {
    size_t n = 0;
    for (const auto& [_, t] : tracks_) n += t.points.size();
    return n;
}

std::string TrackStore::feature_key(const Track& t) const {
    auto assigned = key_by_icao_.find(t.icao);
    if (assigned != key_by_icao_.end()) return assigned->second;

    std::string base = format_fixed(t.first_seen, 3);
    std::string key = base;
    auto* self = const_cast<TrackStore*>(this);
    auto owner = key_owner_.find(key);
    if (owner != key_owner_.end() && owner->second != t.icao) key = base + "#" + t.icao;
    self->key_owner_[key] = t.icao;
    self->key_by_icao_[t.icao] = key;
    return key;
}

FeatureMap TrackStore::snapshot_features() const {
    FeatureMap map;
    for (const auto& [_, t] : tracks_) {
        if (t.points.size() < 2) continue;
        map.entries[feature_key(t)] = extract_features(t);
    }
    return map;
}

FeatureVector extract_features(const Track& track) {
    if (track.points.size() < 2)
        throw InsufficientHistory("need at least two points for " + track.icao);

    const TrackPoint& prev = track.points[track.points.size() - 2];
    const TrackPoint& last = track.points.back();

    FeatureVector fv;
    fv.icao = track.icao;
    fv.first_seen = track.first_seen;
    fv.speed_delta_kt = last.ground_speed_kt - prev.ground_speed_kt;
    fv.heading_delta_deg = geo::heading_delta(prev.track_deg, last.track_deg);
    fv.vertical_rate_fpm =
        (last.altitude_ft - prev.altitude_ft) / std::max(last.timestamp - prev.timestamp, 1e-9) * 60.0;
    fv.report_gap_s = last.timestamp - prev.timestamp;
    double dist_m = geo::haversine_m(prev.lat_deg, prev.lon_deg, last.lat_deg, last.lon_deg);
    fv.implied_speed_kt = dist_m / std::max(fv.report_gap_s, 1e-9) / geo::kKnotMps;
    fv.window_len = static_cast<int>(track.points.size());
    fv.ground_speed_kt = last.ground_speed_kt;
    fv.last_lat_deg = last.lat_deg;
    fv.last_lon_deg = last.lon_deg;
    return fv;
}

namespace {

void append_kv(std::string& out, const char* key, const std::string& rendered, bool& first) {
    if (!first) out.push_back(',');
    first = false;
    out.push_back('"');
    out += key;
    out += "\":";
    out += rendered;
}

std::string feature_to_json(const FeatureVector& fv) {
    // Keys emitted in sorted order to keep the document canonical.
    std::string out = "{";
    bool first = true;
    append_kv(out, "first_seen", format_fixed(fv.first_seen, 6), first);
    append_kv(out, "ground_speed_kt", format_fixed(fv.ground_speed_kt, 6), first);
    append_kv(out, "heading_delta_deg", format_fixed(fv.heading_delta_deg, 6), first);
    append_kv(out, "icao", "\"" + fv.icao + "\"", first);
    append_kv(out, "implied_speed_kt", format_fixed(fv.implied_speed_kt, 6), first);
    append_kv(out, "last_lat_deg", format_fixed(fv.last_lat_deg, 6), first);
    append_kv(out, "last_lon_deg", format_fixed(fv.last_lon_deg, 6), first);
    append_kv(out, "report_gap_s", format_fixed(fv.report_gap_s, 6), first);
    append_kv(out, "speed_delta_kt", format_fixed(fv.speed_delta_kt, 6), first);
    append_kv(out, "vertical_rate_fpm", format_fixed(fv.vertical_rate_fpm, 6), first);
    append_kv(out, "window_len", std::to_string(fv.window_len), first);
    out.push_back('}');
    return out;
}

}  // namespace

std::string serialize_features(const FeatureMap& map) {
    std::string out = "{";
    bool first = true;
    for (const auto& [key, fv] : map.entries) {  // std::map iterates sorted
        if (!first) out.push_back(',');
        first = false;
        out.push_back('"');
        out += key;
        out += "\":";
        out += feature_to_json(fv);
    }
    out.push_back('}');
    return out;
}

FeatureMap parse_features(const std::string& json_text) {
    auto j = nlohmann::json::parse(json_text);
    if (!j.is_object()) throw std::runtime_error("feature map must be a JSON object");
    FeatureMap map;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const auto& e = it.value();
        FeatureVector fv;
        fv.icao = e.at("icao").get<std::string>();
        fv.first_seen = e.at("first_seen").get<double>();
        fv.speed_delta_kt = e.at("speed_delta_kt").get<double>();
        fv.heading_delta_deg = e.at("heading_delta_deg").get<double>();
        fv.vertical_rate_fpm = e.at("vertical_rate_fpm").get<double>();
        fv.implied_speed_kt = e.at("implied_speed_kt").get<double>();
        fv.report_gap_s = e.at("report_gap_s").get<double>();
        fv.window_len = e.at("window_len").get<int>();
        fv.ground_speed_kt = e.at("ground_speed_kt").get<double>();
        fv.last_lat_deg = e.at("last_lat_deg").get<double>();
        fv.last_lon_deg = e.at("last_lon_deg").get<double>();
        map.entries[it.key()] = fv;
    }
    return map;
}

}  // namespace airtrust::edge
