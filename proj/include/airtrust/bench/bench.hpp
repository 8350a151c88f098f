#pragma once

#include <optional>
#include <string>
#include <vector>

#include "airtrust/fog/dispatch.hpp"
#include "airtrust/gateway/fabric.hpp"
#include "airtrust/sim/engine.hpp"

namespace airtrust::bench {

struct ServiceDown : std::runtime_error {
    explicit ServiceDown(const std::string& what) : std::runtime_error(what) {}
};
struct ChainStalled : std::runtime_error {
    explicit ChainStalled(const std::string& what) : std::runtime_error(what) {}
};
struct QueueOverflow : std::runtime_error {
    QueueOverflow(int batch, const std::string& what) : std::runtime_error(what), batch_index(batch) {}
    int batch_index;
};
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

enum class AcMode { Off, BlendCac };

struct ExperimentConfig {
    gateway::ArchMode arch = gateway::ArchMode::Micro;
    AcMode ac = AcMode::Off;
    int n_requests = 1000;
    int warmup_requests = 50;
    double link_delay_ms = 0.0;
    uint64_t seed = 1;
    int service_work_iters = 12000;
};

struct LatencySample {
    std::string request_id;
    double total_ms = 0.0;
    double transport_ms = 0.0;
    double auth_ms = 0.0;
    double access_ms = 0.0;
    double service_ms = 0.0;
};

struct LatencySummary {
    size_t samples = 0;
    double mean_ms = 0.0;
    double p50_ms = 0.0;
    double p95_ms = 0.0;
    double mean_transport_ms = 0.0;
    double mean_auth_ms = 0.0;
    double mean_access_ms = 0.0;
    double mean_service_ms = 0.0;
};

struct LatencyReport {
    ExperimentConfig config;
    std::vector<LatencySample> samples;  // post-warmup only
    LatencySummary summary;
};

LatencySummary summarize(const std::vector<LatencySample>& samples);

// Keeps one fabric alive across experiment configurations so micro/mono and
// access-control comparisons run against identical state.
class LatencyHarness {
public:
    explicit LatencyHarness(int service_work_iters = 12000);
    ~LatencyHarness();

    // Deploys contracts, registers the client and provider VIDs and issues
    // the client's execute capability; idempotent.
    void setup_access_control();

    LatencyReport run(const ExperimentConfig& config);

    gateway::ServiceFabric& fabric() { return *fabric_; }

private:
    std::string rpc(const std::string& method, const nlohmann::json& params);
    std::string submit_and_confirm(const chain::Account& account, uint64_t nonce,
                                   const Bytes& payload);

    std::unique_ptr<gateway::ServiceFabric> fabric_;
    bool access_ready_ = false;
};

// Standalone single-configuration run (CLI path).
LatencyReport run_latency(const ExperimentConfig& config);

// Violations of the documented per-sample properties; empty means clean.
std::vector<std::string> check_latency_invariants(const LatencyReport& report);

// --- message pipeline experiments ------------------------------------------

struct PipelineConfig {
    double suspicion_threshold = 0.80;
    fog::RuleConfig rules;
    int grid_rows = 4;
    int grid_cols = 4;
    int security_level = 1;
    size_t queue_capacity = 4096;
};

// decode -> track -> features -> fusion, fed record by record.
class AnalyticsPipeline {
public:
    AnalyticsPipeline(const edge::AirspaceBox& box, const PipelineConfig& config = {});

    // Returns the alert decided for this record, if any (pre-dedup).
    std::optional<fog::Alert> process(const adsb::AdsbRecord& record);

    uint64_t processed() const { return processed_; }
    const std::vector<fog::Alert>& alerts() const { return alerts_; }
    const edge::TrackStore& tracker() const { return tracker_; }
    const fog::DispatchStats& dispatch_stats() const { return dispatcher_.stats(); }
    std::shared_ptr<fog::MemorySink> sink() const { return sink_; }

private:
    PipelineConfig config_;
    edge::TrackStore tracker_;
    fog::GridConfig grid_;
    fog::RuleSet rules_;
    std::shared_ptr<fog::MemorySink> sink_;
    fog::AlertDispatcher dispatcher_;
    uint64_t processed_ = 0;
    std::vector<fog::Alert> alerts_;
};

struct ThroughputRow {
    int batch = 0;
    int processed = 0;
    double wall_ms = 0.0;
    double cpu_utilization = 0.0;  // process CPU time / wall time
};

struct ThroughputReport {
    std::vector<ThroughputRow> rows;
    uint64_t total_processed = 0;
    uint64_t alerts = 0;
    bool zero_loss = false;
};

ThroughputReport run_throughput(const sim::Scenario& scenario, uint64_t seed, int batches = 15,
                                int batch_size = 100, const PipelineConfig& pipeline = {});

struct E2eAttackVerdict {
    std::string kind;
    std::string icao;
    double at_s = 0.0;
    bool alert_fired = false;
    double detection_latency_s = -1.0;
    double report_period_s = 1.0;
};

struct E2eReport {
    std::vector<E2eAttackVerdict> attacks;
    int nominal_flights = 0;
    uint64_t nominal_alerts = 0;
    bool all_attacks_detected = false;
};

E2eReport run_scenario_e2e(const sim::Scenario& scenario, uint64_t seed,
                           const PipelineConfig& pipeline = {});

// --- report files -----------------------------------------------------------

// Deterministic CSV: header + one row per sample; identical samples give
// byte-identical files. Throws IoError when the file cannot be written.
void emit_report(const std::vector<LatencySample>& samples, const std::string& path);
void emit_report(const std::vector<ThroughputRow>& rows, const std::string& path);
void emit_report(const E2eReport& report, const std::string& path);

std::vector<LatencySample> parse_latency_csv(const std::string& text);

}  // namespace airtrust::bench
