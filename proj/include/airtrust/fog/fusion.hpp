#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "airtrust/edge/tracker.hpp"

namespace airtrust::fog {

struct SectorUnmapped : std::runtime_error {
    explicit SectorUnmapped(const std::string& what) : std::runtime_error(what) {}
};

enum class TimeBand { Day, Night };

struct Context {
    TimeBand time_band = TimeBand::Day;
    std::string sector_id;
    int security_level = 1;  // 1..3
};

struct GridConfig {
    edge::AirspaceBox box;
    int rows = 4;
    int cols = 4;
    int security_level = 1;
    // Day window over local seconds-of-day, half-open [start, end).
    double day_start_s = 6 * 3600.0;
    double day_end_s = 22 * 3600.0;
};

struct Rule {
    std::string id;
    std::function<bool(const edge::FeatureVector&, const Context&)> predicate;
    double weight = 0.0;  // normalized so the active set sums to 1
    std::string description;
};

struct RuleSet {
    std::vector<Rule> rules;

    // Scales weights so they sum to exactly 1; applied at load and after any
    // config change.
    void normalize();
};

struct RuleConfig {
    double speed_ratio = 5.0;       // implied speed vs reported ground speed
    double min_speed_floor_kt = 50; // reported-speed floor for the ratio test
    double gap_max_s = 30.0;        // halved at security level 3
    double gap_min_s = 0.5;         // duplicate-emitter side of the band
    double heading_delta_deg = 90.0;
    double w_implied_speed = 0.5;
    double w_report_gap = 0.35;
    double w_heading = 0.15;
};

// The shipped rule table: implied-speed anomaly, report-gap anomaly (band:
// silent too long or reports arriving faster than one emitter plausibly
// sends), heading swing.
RuleSet default_rules(const RuleConfig& cfg = {});
RuleSet rules_from_json(const std::string& text);

struct SuspicionReport {
    std::string icao;
    double first_seen = 0.0;
    double score = 0.0;  // sum of fired-rule weights
    std::vector<std::string> fired_rules;
    std::vector<std::string> fired_descriptions;
    Context context;
    double decided_at = 0.0;
};

struct Alert {
    std::string icao;
    double score = 0.0;
    double threshold = 0.0;
    std::string message;
    bool sink_ack = false;
    double first_seen = 0.0;
    double decided_at = 0.0;
};

// Deterministic context for a feature vector; day band is the configured
// half-open local-time window.
Context contextualize(const edge::FeatureVector& fv, double clock, const GridConfig& grid);

SuspicionReport score(const edge::FeatureVector& fv, const Context& ctx, const RuleSet& rules,
                      double decided_at = 0.0);

// Alert iff score >= threshold (inclusive). threshold must be in (0, 1].
std::optional<Alert> decide(const SuspicionReport& report, double threshold);

}  // namespace airtrust::fog
