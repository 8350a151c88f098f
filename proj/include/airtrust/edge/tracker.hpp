#pragma once

#include <deque>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "airtrust/adsb/types.hpp"

namespace airtrust::edge {

struct AirspaceBox {
    double lat_min = -90.0;
    double lat_max = 90.0;
    double lon_min = -180.0;
    double lon_max = 180.0;

    bool contains(double lat, double lon) const {
        return lat >= lat_min && lat <= lat_max && lon >= lon_min && lon <= lon_max;
    }
};

struct TrackPoint {
    double timestamp;
    double lat_deg;
    double lon_deg;
    int altitude_ft;
    double ground_speed_kt;
    double track_deg;
};

struct Track {
    std::string icao;
    double first_seen = 0.0;
    std::deque<TrackPoint> points;  // strictly increasing timestamps, |points| <= window
};

struct FeatureVector {
    std::string icao;
    double first_seen = 0.0;
    double speed_delta_kt = 0.0;
    double heading_delta_deg = 0.0;  // wrapped into [-180, 180]
    double vertical_rate_fpm = 0.0;
    double implied_speed_kt = 0.0;  // great-circle distance / time gap
    double report_gap_s = 0.0;
    int window_len = 0;
    // Last reported kinematics carried along for the fog tier: the rule set
    // compares implied against reported speed, and sector mapping needs a
    // position.
    double ground_speed_kt = 0.0;
    double last_lat_deg = 0.0;
    double last_lon_deg = 0.0;
};

// Keyed by first detection time (rendered with ms precision); key collisions
// within a session are disambiguated by appending the icao.
struct FeatureMap {
    std::map<std::string, FeatureVector> entries;
};

struct InsufficientHistory : std::runtime_error {
    explicit InsufficientHistory(const std::string& what) : std::runtime_error(what) {}
};

enum class UpdateOutcome {
    Appended,
    AppendedEvicted,    // appended and the oldest point fell off the window
    TrackClosed,        // record left the box, existing track closed
    RejectedOutOfOrder, // timestamp regression, store unchanged
    IgnoredOutOfBox,    // outside the box and no existing track
};

struct TrackerCounters {
    uint64_t accepted = 0;       // points currently or previously stored
    uint64_t evicted = 0;        // FIFO evictions
    uint64_t closed_points = 0;  // points dropped when a track closed
    uint64_t rejected = 0;       // out-of-order records
    uint64_t ignored = 0;        // out-of-box records (including closers)
};

class TrackStore {
public:
    explicit TrackStore(size_t window = 32, AirspaceBox box = {}) : window_(window), box_(box) {}

    UpdateOutcome update(const adsb::AdsbRecord& record);

    // Removes tracks with no report for more than ttl_s; returns the closed
    // tracks' icaos.
    std::vector<std::string> evict_stale(double now, double ttl_s);

    const Track* find(const std::string& icao) const;
    size_t size() const { return tracks_.size(); }
    size_t live_points() const;
    const TrackerCounters& counters() const { return counters_; }
    const AirspaceBox& box() const { return box_; }

    // Feature map over all tracks with at least two points.
    FeatureMap snapshot_features() const;

    // Stable session key for a track (first_seen, icao-suffixed on collision).
    std::string feature_key(const Track& t) const;

private:
    size_t window_;
    AirspaceBox box_;
    std::map<std::string, Track> tracks_;
    std::map<std::string, std::string> key_by_icao_;  // assigned session keys
    std::map<std::string, std::string> key_owner_;    // key -> icao
    TrackerCounters counters_;
};

// Movement features from the last two points of a track.
// Throws InsufficientHistory when |points| < 2.
FeatureVector extract_features(const Track& track);

// Canonical JSON: keys sorted, numbers with at most 6 fractional digits;
// byte-identical for equal maps.
std::string serialize_features(const FeatureMap& map);
FeatureMap parse_features(const std::string& json_text);

}  // namespace airtrust::edge
