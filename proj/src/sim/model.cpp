#include "airtrust/sim/model.hpp"

#include <cmath>

#include "airtrust/common/geo.hpp"

namespace airtrust::sim {

namespace {

void substep(AircraftAgent& a, double dt) {
    if (!a.waypoints.empty()) {
        const Waypoint& wp = a.waypoints.front();
        double dist_m = geo::haversine_m(a.state.lat_deg, a.state.lon_deg, wp.lat_deg, wp.lon_deg);
        if (dist_m <= kWaypointCaptureNm * geo::kMetersPerNm) {
            a.waypoints.erase(a.waypoints.begin());
            if (a.waypoints.empty()) a.arrived = true;
        } else {
            double want = geo::initial_bearing_deg(a.state.lat_deg, a.state.lon_deg,
                                                   wp.lat_deg, wp.lon_deg);
            double delta = geo::heading_delta(a.state.track_deg, want);
            double max_turn = kMaxTurnRateDegS * dt;
            if (std::fabs(delta) > max_turn) delta = std::copysign(max_turn, delta);
            a.state.track_deg = geo::wrap360(a.state.track_deg + delta);
        }
    }

    if (a.arrived) return;  // holds at the final waypoint

    double dist_m = a.state.ground_speed_kt * geo::kKnotMps * dt;
    if (dist_m > 0) {
        auto next = geo::advance(a.state.lat_deg, a.state.lon_deg, a.state.track_deg, dist_m);
        a.state.lat_deg = next.lat_deg;
        a.state.lon_deg = next.lon_deg;
    }
    a.state.altitude_ft += a.state.vertical_rate_fpm * dt / 60.0;
}

}  // namespace

void step_agent(AircraftAgent& agent, double dt_s) {
    if (dt_s <= 0) throw BadParams("step requires dt > 0");
    double remaining = dt_s;
    while (remaining > 1e-12) {
        double dt = std::min(remaining, 1.0);
        substep(agent, dt);
        remaining -= dt;
    }
    agent.clock_s += dt_s;
}

std::optional<adsb::AdsbRecord> emit_report(AircraftAgent& agent, const SensorModel& sensor,
                                            Rng& rng, bool ghost, EmitResult& result) {
    double t = agent.clock_s;
    const Behavior& b = agent.behavior;

    AgentState observed = agent.state;

    if (!ghost) {
        if (b.kind == BehaviorKind::Silent && t >= b.from_s && t < b.to_s) {
            result = EmitResult::BehaviorDropped;
            return std::nullopt;
        }
        if (b.kind == BehaviorKind::Replayed && t >= b.at_s) {
            // Rebroadcast of the state captured delay_s ago; nothing that old
            // yet means nothing to replay.
            const AgentState* past = nullptr;
            for (auto it = agent.history.rbegin(); it != agent.history.rend(); ++it) {
                if (it->first <= t - b.delay_s) {
                    past = &it->second;
                    break;
                }
            }
            if (!past) {
                result = EmitResult::BehaviorDropped;
                return std::nullopt;
            }
            observed = *past;
        }
        agent.history.emplace_back(t, agent.state);
    } else {
        auto jumped = geo::advance(observed.lat_deg, observed.lon_deg, b.jump_bearing_deg,
                                   b.jump_km * 1000.0);
        observed.lat_deg = jumped.lat_deg;
        observed.lon_deg = jumped.lon_deg;
    }

    double range_m =
        geo::haversine_m(sensor.lat_deg, sensor.lon_deg, observed.lat_deg, observed.lon_deg);
    if (range_m > sensor.max_range_km * 1000.0) {
        result = EmitResult::RangeDropped;
        return std::nullopt;
    }
    if (sensor.dropout_prob > 0 && rng.uniform() < sensor.dropout_prob) {
        result = EmitResult::DropoutDropped;
        return std::nullopt;
    }

    adsb::AdsbRecord r;
    r.icao = agent.icao;
    if (!agent.callsign.empty()) r.callsign = agent.callsign;
    r.timestamp = t;
    r.lat_deg = observed.lat_deg + rng.gaussian(0, sensor.noise.lat_deg);
    r.lon_deg = observed.lon_deg + rng.gaussian(0, sensor.noise.lon_deg);
    r.altitude_ft = static_cast<int>(
        std::lround(observed.altitude_ft + rng.gaussian(0, sensor.noise.altitude_ft)));
    r.ground_speed_kt =
        std::max(0.0, observed.ground_speed_kt + rng.gaussian(0, sensor.noise.speed_kt));
    r.track_deg = geo::wrap360(observed.track_deg + rng.gaussian(0, sensor.noise.track_deg));
    r.vertical_rate_fpm = static_cast<int>(
        std::lround(observed.vertical_rate_fpm + rng.gaussian(0, sensor.noise.vertical_rate_fpm)));

    result = EmitResult::Emitted;
    return r;
}

FeedbackTuning FeedbackController::tick(const FeedbackMetrics& metrics) {
    if (metrics.fog_queue_len > config_.high_water)
        scale_ = std::min(scale_ * 2.0, config_.max_scale);
    else if (metrics.fog_queue_len < config_.low_water)
        scale_ = 1.0;
    FeedbackTuning tuning;
    tuning.report_period_scale = scale_;
    tuning.threshold_unchanged = true;
    return tuning;
}

}  // namespace airtrust::sim
