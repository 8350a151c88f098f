#pragma once

#include <optional>
#include <string>
#include <vector>

#include "airtrust/adsb/types.hpp"
#include "airtrust/common/rng.hpp"

namespace airtrust::sim {

struct ScenarioError : std::runtime_error {
    explicit ScenarioError(const std::string& what) : std::runtime_error(what) {}
};
struct ScheduleError : std::runtime_error {
    explicit ScheduleError(const std::string& what) : std::runtime_error(what) {}
};
struct UnknownAgent : std::runtime_error {
    explicit UnknownAgent(const std::string& what) : std::runtime_error(what) {}
};
struct BadParams : std::runtime_error {
    explicit BadParams(const std::string& what) : std::runtime_error(what) {}
};

struct Waypoint {
    double lat_deg;
    double lon_deg;
};

enum class BehaviorKind { Normal, Spoofed, Replayed, Silent };

struct Behavior {
    BehaviorKind kind = BehaviorKind::Normal;
    // spoofed: ghost reports displaced jump_km along jump_bearing_deg appear
    // ghost_offset_s after each genuine report from at_s on.
    double jump_km = 0.0;
    double jump_bearing_deg = 0.0;
    double ghost_offset_s = 0.4;
    double at_s = 0.0;
    // replayed: from at_s the stream re-emits the state from delay_s ago.
    double delay_s = 0.0;
    // silent: no reports in [from_s, to_s).
    double from_s = 0.0;
    double to_s = 0.0;
};

struct AgentState {
    double lat_deg = 0.0;
    double lon_deg = 0.0;
    double altitude_ft = 0.0;
    double ground_speed_kt = 0.0;
    double track_deg = 0.0;
    double vertical_rate_fpm = 0.0;
};

struct AircraftAgent {
    std::string icao;
    std::string callsign;
    AgentState state;
    std::vector<Waypoint> waypoints;  // consumed front to back
    Behavior behavior;
    double report_period_s = 1.0;
    double clock_s = 0.0;
    bool arrived = false;  // last waypoint reached: hold position

    // Past states at emit times, for replay behavior.
    std::vector<std::pair<double, AgentState>> history;
};

inline constexpr double kMaxTurnRateDegS = 3.0;
inline constexpr double kWaypointCaptureNm = 1.0;

// Kinematic step: great-circle advance along track at ground speed, altitude
// integrates vertical rate, heading turns toward the next waypoint at most
// kMaxTurnRateDegS, waypoints pop inside the capture radius. Internally
// sub-stepped at 1 s for turn stability.
void step_agent(AircraftAgent& agent, double dt_s);

struct NoiseModel {
    double lat_deg = 0.0;
    double lon_deg = 0.0;
    double altitude_ft = 0.0;
    double speed_kt = 0.0;
    double track_deg = 0.0;
    double vertical_rate_fpm = 0.0;
};

struct SensorModel {
    double lat_deg = 0.0;
    double lon_deg = 0.0;
    double max_range_km = 370.0;
    double dropout_prob = 0.0;
    NoiseModel noise;
};

enum class EmitResult { Emitted, RangeDropped, DropoutDropped, BehaviorDropped };

// Noisy observation of the agent at its current clock; ghost=true produces
// the spoof attack's displaced copy. Returns nullopt (with the reason) when
// the report is out of range, lost to dropout, or suppressed by behavior.
std::optional<adsb::AdsbRecord> emit_report(AircraftAgent& agent, const SensorModel& sensor,
                                            Rng& rng, bool ghost, EmitResult& result);

struct FeedbackConfig {
    double tick_s = 5.0;
    double high_water = 100.0;
    double low_water = 20.0;
    double max_scale = 8.0;
};

struct FeedbackMetrics {
    double fog_queue_len = 0.0;
    double edge_cpu_proxy = 0.0;
};

struct FeedbackTuning {
    double report_period_scale = 1.0;
    bool threshold_unchanged = true;  // the alert threshold stays ATC-owned
};

// Load shedding with hysteresis: above high water the reporting period
// doubles (capped), below low water it returns to 1, in between it holds.
class FeedbackController {
public:
    explicit FeedbackController(FeedbackConfig config = {}) : config_(config) {}

    FeedbackTuning tick(const FeedbackMetrics& metrics);
    double scale() const { return scale_; }
    const FeedbackConfig& config() const { return config_; }

private:
    FeedbackConfig config_;
    double scale_ = 1.0;
};

}  // namespace airtrust::sim
