#pragma once

#include <functional>

#include <json.hpp>

#include "airtrust/edge/tracker.hpp"
#include "airtrust/sim/model.hpp"

namespace airtrust::sim {

struct DosFlood {
    double at_s = 0.0;
    double rate_per_s = 0.0;
    double duration_s = 0.0;
};

struct AttackNote {
    std::string kind;  // spoof | replay | dos_flood
    std::string icao;  // empty for dos_flood
    double at_s = 0.0;
};

struct Scenario {
    double horizon_s = 120.0;
    SensorModel sensor;
    edge::AirspaceBox box;
    std::vector<AircraftAgent> agents;
    std::vector<DosFlood> floods;
    std::optional<FeedbackConfig> feedback;
    std::vector<AttackNote> attacks;
};

Scenario scenario_from_json(const std::string& text);
std::string scenario_to_json(const Scenario& scenario);

// Mutates the scenario before a run. kinds: spoof {icao, at_s, jump_km,
// bearing_deg?, ghost_offset_s?}, replay {icao, at_s, delay_s},
// dos_flood {at_s, rate_per_s, duration_s}.
void inject_attack(Scenario& scenario, const std::string& kind, const nlohmann::json& params);

struct RunCounters {
    uint64_t events = 0;
    uint64_t scheduled_emits = 0;
    uint64_t emitted = 0;
    uint64_t range_drops = 0;
    uint64_t dropout_drops = 0;
    uint64_t behavior_drops = 0;
    uint64_t dos_messages = 0;
};

struct RunResult {
    std::vector<std::string> event_log;  // canonical NDJSON lines
    std::vector<adsb::AdsbRecord> records;
    RunCounters counters;
    std::vector<AircraftAgent> final_agents;

    std::string event_log_text() const;
    std::string records_csv() const;
};

// Live taps into the run: per-record delivery and the metrics sampled at
// feedback ticks.
struct RunHooks {
    std::function<void(const adsb::AdsbRecord&)> on_record;
    std::function<FeedbackMetrics()> metrics;
};

// Single-threaded event loop; (scenario, seed) fixes every emitted octet.
RunResult run(const Scenario& scenario, uint64_t seed, double horizon_s,
              const RunHooks* hooks = nullptr);

// Canned scenario builders used by the CLI defaults and the experiments.
Scenario make_nominal_scenario(int n_agents, double horizon_s, double report_period_s = 1.0);
Scenario make_spoof_scenario();

}  // namespace airtrust::sim
