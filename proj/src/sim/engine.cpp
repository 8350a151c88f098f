#include "airtrust/sim/engine.hpp"

#include <cmath>
#include <queue>

#include "airtrust/adsb/csv.hpp"
#include "airtrust/common/geo.hpp"
#include "airtrust/common/numfmt.hpp"

namespace airtrust::sim {

using nlohmann::json;

namespace {

Behavior behavior_from_json(const json& j) {
    Behavior b;
    std::string kind = j.value("kind", "normal");
    if (kind == "normal") {
        b.kind = BehaviorKind::Normal;
    } else if (kind == "spoofed") {
        b.kind = BehaviorKind::Spoofed;
        b.jump_km = j.at("jump_km").get<double>();
        b.jump_bearing_deg = j.value("bearing_deg", 0.0);
        b.ghost_offset_s = j.value("ghost_offset_s", 0.4);
        b.at_s = j.at("at_s").get<double>();
    } else if (kind == "replayed") {
        b.kind = BehaviorKind::Replayed;
        b.delay_s = j.at("delay_s").get<double>();
        b.at_s = j.value("at_s", 0.0);
    } else if (kind == "silent") {
        b.kind = BehaviorKind::Silent;
        b.from_s = j.at("from_s").get<double>();
        b.to_s = j.at("to_s").get<double>();
    } else {
        throw ScenarioError("unknown behavior kind: " + kind);
    }
    return b;
}

json behavior_to_json(const Behavior& b) {
    json j;
    switch (b.kind) {
        case BehaviorKind::Normal: j["kind"] = "normal"; break;
        case BehaviorKind::Spoofed:
            j["kind"] = "spoofed";
            j["jump_km"] = b.jump_km;
            j["bearing_deg"] = b.jump_bearing_deg;
            j["ghost_offset_s"] = b.ghost_offset_s;
            j["at_s"] = b.at_s;
            break;
        case BehaviorKind::Replayed:
            j["kind"] = "replayed";
            j["delay_s"] = b.delay_s;
            j["at_s"] = b.at_s;
            break;
        case BehaviorKind::Silent:
            j["kind"] = "silent";
            j["from_s"] = b.from_s;
            j["to_s"] = b.to_s;
            break;
    }
    return j;
}

}  // namespace

Scenario scenario_from_json(const std::string& text) {
    json j = json::parse(text);
    Scenario s;
    s.horizon_s = j.value("horizon_s", 120.0);

    if (j.contains("sensor")) {
        const auto& sj = j.at("sensor");
        s.sensor.lat_deg = sj.value("lat", 0.0);
        s.sensor.lon_deg = sj.value("lon", 0.0);
        s.sensor.max_range_km = sj.value("max_range_km", 370.0);
        s.sensor.dropout_prob = sj.value("dropout_prob", 0.0);
        if (sj.contains("noise")) {
            const auto& nj = sj.at("noise");
            s.sensor.noise.lat_deg = nj.value("lat_deg", 0.0);
            s.sensor.noise.lon_deg = nj.value("lon_deg", 0.0);
            s.sensor.noise.altitude_ft = nj.value("altitude_ft", 0.0);
            s.sensor.noise.speed_kt = nj.value("speed_kt", 0.0);
            s.sensor.noise.track_deg = nj.value("track_deg", 0.0);
            s.sensor.noise.vertical_rate_fpm = nj.value("vertical_rate_fpm", 0.0);
        }
    }

    if (j.contains("box")) {
        const auto& bj = j.at("box");
        s.box.lat_min = bj.at("lat_min").get<double>();
        s.box.lat_max = bj.at("lat_max").get<double>();
        s.box.lon_min = bj.at("lon_min").get<double>();
        s.box.lon_max = bj.at("lon_max").get<double>();
    }

    for (const auto& aj : j.value("agents", json::array())) {
        AircraftAgent a;
        a.icao = aj.at("icao").get<std::string>();
        a.callsign = aj.value("callsign", "");
        a.state.lat_deg = aj.at("lat").get<double>();
        a.state.lon_deg = aj.at("lon").get<double>();
        a.state.altitude_ft = aj.value("altitude_ft", 30000.0);
        a.state.ground_speed_kt = aj.value("ground_speed_kt", 400.0);
        a.state.track_deg = aj.value("track_deg", 90.0);
        a.state.vertical_rate_fpm = aj.value("vertical_rate_fpm", 0.0);
        a.report_period_s = aj.value("report_period_s", 1.0);
        if (a.report_period_s <= 0) throw ScenarioError("report_period_s must be positive");
        for (const auto& wj : aj.value("waypoints", json::array()))
            a.waypoints.push_back({wj.at("lat").get<double>(), wj.at("lon").get<double>()});
        if (aj.contains("behavior")) a.behavior = behavior_from_json(aj.at("behavior"));
        s.agents.push_back(std::move(a));
    }

    for (const auto& fj : j.value("dos_floods", json::array())) {
        DosFlood f;
        f.at_s = fj.at("at_s").get<double>();
        f.rate_per_s = fj.at("rate_per_s").get<double>();
        f.duration_s = fj.at("duration_s").get<double>();
        s.floods.push_back(f);
    }

    if (j.contains("feedback")) {
        const auto& fj = j.at("feedback");
        FeedbackConfig fc;
        fc.tick_s = fj.value("tick_s", 5.0);
        fc.high_water = fj.value("high_water", 100.0);
        fc.low_water = fj.value("low_water", 20.0);
        fc.max_scale = fj.value("max_scale", 8.0);
        s.feedback = fc;
    }

    for (const auto& aj : j.value("attacks", json::array())) {
        // Attack list entries are applied through the injector so the same
        // validation runs for file-driven and programmatic scenarios.
        json params = aj;
        std::string kind = aj.at("kind").get<std::string>();
        params.erase("kind");
        inject_attack(s, kind, params);
    }
    return s;
}

std::string scenario_to_json(const Scenario& s) {
    json j;
    j["horizon_s"] = s.horizon_s;
    j["sensor"] = {{"lat", s.sensor.lat_deg},
                   {"lon", s.sensor.lon_deg},
                   {"max_range_km", s.sensor.max_range_km},
                   {"dropout_prob", s.sensor.dropout_prob},
                   {"noise",
                    {{"lat_deg", s.sensor.noise.lat_deg},
                     {"lon_deg", s.sensor.noise.lon_deg},
                     {"altitude_ft", s.sensor.noise.altitude_ft},
                     {"speed_kt", s.sensor.noise.speed_kt},
                     {"track_deg", s.sensor.noise.track_deg},
                     {"vertical_rate_fpm", s.sensor.noise.vertical_rate_fpm}}}};
    j["box"] = {{"lat_min", s.box.lat_min},
                {"lat_max", s.box.lat_max},
                {"lon_min", s.box.lon_min},
                {"lon_max", s.box.lon_max}};
    j["agents"] = json::array();
    for (const auto& a : s.agents) {
        json aj;
        aj["icao"] = a.icao;
        if (!a.callsign.empty()) aj["callsign"] = a.callsign;
        aj["lat"] = a.state.lat_deg;
        aj["lon"] = a.state.lon_deg;
        aj["altitude_ft"] = a.state.altitude_ft;
        aj["ground_speed_kt"] = a.state.ground_speed_kt;
        aj["track_deg"] = a.state.track_deg;
        aj["vertical_rate_fpm"] = a.state.vertical_rate_fpm;
        aj["report_period_s"] = a.report_period_s;
        aj["waypoints"] = json::array();
        for (const auto& w : a.waypoints) aj["waypoints"].push_back({{"lat", w.lat_deg}, {"lon", w.lon_deg}});
        aj["behavior"] = behavior_to_json(a.behavior);
        j["agents"].push_back(aj);
    }
    j["dos_floods"] = json::array();
    for (const auto& f : s.floods)
        j["dos_floods"].push_back(
            {{"at_s", f.at_s}, {"rate_per_s", f.rate_per_s}, {"duration_s", f.duration_s}});
    if (s.feedback) {
        j["feedback"] = {{"tick_s", s.feedback->tick_s},
                         {"high_water", s.feedback->high_water},
                         {"low_water", s.feedback->low_water},
                         {"max_scale", s.feedback->max_scale}};
    }
    return j.dump(2);
}

void inject_attack(Scenario& scenario, const std::string& kind, const json& params) {
    auto find_agent = [&](const std::string& icao) -> AircraftAgent& {
        for (auto& a : scenario.agents)
            if (a.icao == icao) return a;
        throw UnknownAgent("no agent with icao " + icao);
    };

    if (kind == "spoof") {
        if (!params.contains("icao") || !params.contains("jump_km"))
            throw BadParams("spoof needs icao and jump_km");
        double jump = params.at("jump_km").get<double>();
        if (jump <= 0) throw BadParams("spoof jump_km must be positive");
        AircraftAgent& a = find_agent(params.at("icao").get<std::string>());
        a.behavior.kind = BehaviorKind::Spoofed;
        a.behavior.jump_km = jump;
        a.behavior.jump_bearing_deg = params.value("bearing_deg", 0.0);
        a.behavior.ghost_offset_s = params.value("ghost_offset_s", 0.4);
        a.behavior.at_s = params.value("at_s", 0.0);
        scenario.attacks.push_back({"spoof", a.icao, a.behavior.at_s});
        return;
    }
    if (kind == "replay") {
        if (!params.contains("icao") || !params.contains("delay_s"))
            throw BadParams("replay needs icao and delay_s");
        double delay = params.at("delay_s").get<double>();
        if (delay <= 0) throw BadParams("replay delay_s must be positive");
        AircraftAgent& a = find_agent(params.at("icao").get<std::string>());
        a.behavior.kind = BehaviorKind::Replayed;
        a.behavior.delay_s = delay;
        a.behavior.at_s = params.value("at_s", 0.0);
        scenario.attacks.push_back({"replay", a.icao, a.behavior.at_s});
        return;
    }
    if (kind == "dos_flood") {
        DosFlood f;
        f.at_s = params.value("at_s", 0.0);
        f.rate_per_s = params.value("rate_per_s", 0.0);
        f.duration_s = params.value("duration_s", 0.0);
        if (f.rate_per_s <= 0 || f.duration_s <= 0)
            throw BadParams("dos_flood needs positive rate_per_s and duration_s");
        scenario.floods.push_back(f);
        scenario.attacks.push_back({"dos_flood", "", f.at_s});
        return;
    }
    throw BadParams("unknown attack kind: " + kind);
}

namespace {

enum class EventKind { EmitReport, GhostEmit, WaypointReached, AttackTrigger, DosMessage, FeedbackTick };

struct Event {
    double t;
    uint64_t seq;
    EventKind kind;
    size_t agent = 0;
    int waypoints_left = 0;
    std::string note;
};

struct EventOrder {
    bool operator()(const Event& a, const Event& b) const {
        return std::tie(a.t, a.seq) > std::tie(b.t, b.seq);
    }
};

const char* kind_name(EventKind k) {
    switch (k) {
        case EventKind::EmitReport:
        case EventKind::GhostEmit: return "emit_report";
        case EventKind::WaypointReached: return "waypoint_reached";
        case EventKind::AttackTrigger:
        case EventKind::DosMessage: return "attack_trigger";
        case EventKind::FeedbackTick: return "feedback_tick";
    }
    return "?";
}

const char* emit_outcome(EmitResult r) {
    switch (r) {
        case EmitResult::Emitted: return "emitted";
        case EmitResult::RangeDropped: return "range_drop";
        case EmitResult::DropoutDropped: return "dropout";
        case EmitResult::BehaviorDropped: return "silent";
    }
    return "?";
}

}  // namespace

std::string RunResult::event_log_text() const {
    std::string out;
    for (const auto& line : event_log) {
        out += line;
        out += '\n';
    }
    return out;
}

std::string RunResult::records_csv() const { return adsb::records_to_csv(records); }

RunResult run(const Scenario& scenario, uint64_t seed, double horizon_s, const RunHooks* hooks) {
    RunResult result;
    std::vector<AircraftAgent> agents = scenario.agents;
    Rng rng(seed);
    FeedbackController feedback(scenario.feedback.value_or(FeedbackConfig{}));
    double period_scale = 1.0;

    std::priority_queue<Event, std::vector<Event>, EventOrder> queue;
    uint64_t seq = 0;
    double now = 0.0;

    auto schedule = [&](double t, EventKind kind, size_t agent_idx, int wp_left = 0,
                        std::string note = "") {
        if (t < now) throw ScheduleError("event scheduled in the past");
        queue.push({t, seq++, kind, agent_idx, wp_left, std::move(note)});
    };

    for (size_t i = 0; i < agents.size(); ++i) {
        const AircraftAgent& a = agents[i];
        if (a.report_period_s <= 0) throw ScenarioError("report_period_s must be positive");
        if ((a.behavior.kind == BehaviorKind::Spoofed ||
             a.behavior.kind == BehaviorKind::Replayed) &&
            a.behavior.at_s < 0)
            throw ScheduleError("attack scheduled before the run starts");
        schedule(a.report_period_s, EventKind::EmitReport, i);
        if (a.behavior.kind == BehaviorKind::Spoofed || a.behavior.kind == BehaviorKind::Replayed)
            schedule(a.behavior.at_s, EventKind::AttackTrigger, i,
                     0, a.behavior.kind == BehaviorKind::Spoofed ? "spoof" : "replay");
    }
    for (const auto& f : scenario.floods) {
        if (f.at_s < 0) throw ScheduleError("dos flood scheduled before the run starts");
        auto count = static_cast<uint64_t>(std::llround(f.rate_per_s * f.duration_s));
        for (uint64_t k = 0; k < count; ++k)
            schedule(f.at_s + static_cast<double>(k) / f.rate_per_s, EventKind::DosMessage, 0);
    }
    if (scenario.feedback) schedule(scenario.feedback->tick_s, EventKind::FeedbackTick, 0);

    auto log_line = [&](const Event& e, const std::string& extra) {
        std::string line = "{";
        if (!extra.empty()) line += extra + ",";
        line += "\"kind\":\"" + std::string(kind_name(e.kind)) + "\"";
        line += ",\"seq\":" + std::to_string(e.seq);
        line += ",\"t\":" + format_fixed(e.t, 3);
        line += "}";
        result.event_log.push_back(std::move(line));
        result.counters.events++;
    };

    auto handle_emit = [&](const Event& e, bool ghost) {
        AircraftAgent& a = agents[e.agent];
        result.counters.scheduled_emits++;

        size_t wp_before = a.waypoints.size();
        if (e.t > a.clock_s) step_agent(a, e.t - a.clock_s);
        for (size_t w = wp_before; w > a.waypoints.size(); --w)
            schedule(e.t, EventKind::WaypointReached, e.agent,
                     static_cast<int>(a.waypoints.size()));

        EmitResult emit_result = EmitResult::Emitted;
        auto record = emit_report(a, scenario.sensor, rng, ghost, emit_result);

        std::string extra = "\"icao\":\"" + a.icao + "\"";
        if (ghost) extra += ",\"ghost\":true";
        extra += ",\"outcome\":\"" + std::string(emit_outcome(emit_result)) + "\"";
        if (record) {
            extra += ",\"lat\":" + format_fixed(record->lat_deg, 6);
            extra += ",\"lon\":" + format_fixed(record->lon_deg, 6);
        }
        log_line(e, extra);

        switch (emit_result) {
            case EmitResult::Emitted:
                result.counters.emitted++;
                result.records.push_back(*record);
                if (hooks && hooks->on_record) hooks->on_record(*record);
                break;
            case EmitResult::RangeDropped: result.counters.range_drops++; break;
            case EmitResult::DropoutDropped: result.counters.dropout_drops++; break;
            case EmitResult::BehaviorDropped: result.counters.behavior_drops++; break;
        }

        if (!ghost) {
            schedule(e.t + a.report_period_s * period_scale, EventKind::EmitReport, e.agent);
            if (a.behavior.kind == BehaviorKind::Spoofed && e.t >= a.behavior.at_s)
                schedule(e.t + a.behavior.ghost_offset_s, EventKind::GhostEmit, e.agent);
        }
    };

    while (!queue.empty()) {
        Event e = queue.top();
        if (e.t > horizon_s) break;
        queue.pop();
        now = e.t;

        switch (e.kind) {
            case EventKind::EmitReport: handle_emit(e, false); break;
            case EventKind::GhostEmit: handle_emit(e, true); break;
            case EventKind::WaypointReached: {
                log_line(e, "\"icao\":\"" + agents[e.agent].icao + "\",\"remaining\":" +
                                std::to_string(e.waypoints_left));
                break;
            }
            case EventKind::AttackTrigger: {
                log_line(e, "\"attack\":\"" + e.note + "\",\"icao\":\"" + agents[e.agent].icao +
                                "\"");
                break;
            }
            case EventKind::DosMessage: {
                result.counters.dos_messages++;
                log_line(e, "\"attack\":\"dos_flood\",\"target\":\"gateway\"");
                break;
            }
            case EventKind::FeedbackTick: {
                FeedbackMetrics metrics;
                if (hooks && hooks->metrics) metrics = hooks->metrics();
                FeedbackTuning tuning = feedback.tick(metrics);
                period_scale = tuning.report_period_scale;
                log_line(e, "\"queue\":" + format_fixed(metrics.fog_queue_len, 3) +
                                ",\"scale\":" + format_fixed(period_scale, 3));
                schedule(e.t + feedback.config().tick_s, EventKind::FeedbackTick, 0);
                break;
            }
        }
    }

    result.final_agents = std::move(agents);
    return result;
}

Scenario make_nominal_scenario(int n_agents, double horizon_s, double report_period_s) {
    Scenario s;
    s.horizon_s = horizon_s;
    s.sensor.lat_deg = 52.0;
    s.sensor.lon_deg = 4.0;
    s.box = {49.0, 55.0, -1.0, 9.0};

    for (int i = 0; i < n_agents; ++i) {
        AircraftAgent a;
        char icao[8];
        std::snprintf(icao, sizeof(icao), "A%05X", 0x10000 + i * 7);
        a.icao = icao;
        a.callsign = "TST" + std::to_string(100 + i);
        // Spread across the box on a ring around the receiver.
        double angle = 360.0 * i / std::max(n_agents, 1);
        auto pos = geo::advance(52.0, 4.0, angle, 60000.0 + 900.0 * (i % 40));
        a.state.lat_deg = pos.lat_deg;
        a.state.lon_deg = pos.lon_deg;
        a.state.altitude_ft = 28000 + 500.0 * (i % 8);
        a.state.ground_speed_kt = 380 + 10.0 * (i % 7);
        a.state.track_deg = geo::wrap360(angle + 90.0);
        a.report_period_s = report_period_s;
        s.agents.push_back(std::move(a));
    }
    return s;
}

Scenario make_spoof_scenario() {
    Scenario s = make_nominal_scenario(3, 90.0);
    nlohmann::json params;
    params["icao"] = s.agents[1].icao;
    params["at_s"] = 30.0;
    params["jump_km"] = 100.0;
    params["bearing_deg"] = 0.0;
    inject_attack(s, "spoof", params);
    return s;
}

}  // namespace airtrust::sim
