#include "airtrust/bench/bench.hpp"

#include <sys/resource.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "airtrust/common/numfmt.hpp"

namespace airtrust::bench {

using nlohmann::json;

namespace {

double quantile(std::vector<double> sorted, double q) {
    if (sorted.empty()) return 0.0;
    size_t idx = static_cast<size_t>(q * static_cast<double>(sorted.size() - 1) + 0.5);
    return sorted[std::min(idx, sorted.size() - 1)];
}

double process_cpu_seconds() {
    rusage usage{};
    getrusage(RUSAGE_SELF, &usage);
    auto tv = [](const timeval& t) {
        return static_cast<double>(t.tv_sec) + static_cast<double>(t.tv_usec) * 1e-6;
    };
    return tv(usage.ru_utime) + tv(usage.ru_stime);
}

}  // namespace

LatencySummary summarize(const std::vector<LatencySample>& samples) {
    LatencySummary s;
    s.samples = samples.size();
    if (samples.empty()) return s;
    std::vector<double> totals;
    totals.reserve(samples.size());
    for (const auto& x : samples) {
        totals.push_back(x.total_ms);
        s.mean_ms += x.total_ms;
        s.mean_transport_ms += x.transport_ms;
        s.mean_auth_ms += x.auth_ms;
        s.mean_access_ms += x.access_ms;
        s.mean_service_ms += x.service_ms;
    }
    double n = static_cast<double>(samples.size());
    s.mean_ms /= n;
    s.mean_transport_ms /= n;
    s.mean_auth_ms /= n;
    s.mean_access_ms /= n;
    s.mean_service_ms /= n;
    std::sort(totals.begin(), totals.end());
    s.p50_ms = quantile(totals, 0.50);
    s.p95_ms = quantile(totals, 0.95);
    return s;
}

LatencyHarness::LatencyHarness(int service_work_iters) {
    gateway::FabricConfig config;
    config.enforcement = false;
    config.decision_cache = false;
    config.service_work_iters = service_work_iters;
    fabric_ = std::make_unique<gateway::ServiceFabric>(config);
    fabric_->start();
}

LatencyHarness::~LatencyHarness() = default;

std::string LatencyHarness::rpc(const std::string& method, const json& params) {
    httplib::Client client("127.0.0.1", fabric_->chain_rpc_port());
    client.set_connection_timeout(2, 0);
    json req;
    req["method"] = method;
    req["params"] = params;
    auto res = client.Post("/rpc", req.dump(), "application/json");
    if (!res || res->status != 200) throw ServiceDown("chain rpc unreachable");
    return res->body;
}

std::string LatencyHarness::submit_and_confirm(const chain::Account& account, uint64_t nonce,
                                               const Bytes& payload) {
    chain::Transaction tx;
    tx.sender = account.address;
    tx.nonce = nonce;
    tx.payload = payload;
    Bytes unsigned_bytes = tx.encode_unsigned();
    tx.signature = chain::default_signer().sign(
        account.key, std::span<const uint8_t>(unsigned_bytes.data(), unsigned_bytes.size()));

    json submit = json::parse(rpc("submit_tx", {{"tx", to_hex(tx.encode())}}));
    if (!submit.contains("result") || submit["result"].value("status", "") != "Queued")
        throw ChainStalled("transaction not queued: " + submit.dump());
    std::string id = submit["result"]["id"].get<std::string>();

    for (int i = 0; i < 200; ++i) {
        json st = json::parse(rpc("tx_status", {{"id", id}}));
        if (st.contains("result") && st["result"].value("state", "") == "confirmed") return id;
        std::this_thread::sleep_for(std::chrono::milliseconds(25));
    }
    throw ChainStalled("transaction " + id + " never confirmed");
}

void LatencyHarness::setup_access_control() {
    if (access_ready_) return;

    // Liveness probe first: the rest of the setup blocks on confirmations.
    uint64_t h0 = fabric_->node().head_height();
    for (int i = 0; i < 100 && fabric_->node().head_height() == h0; ++i)
        std::this_thread::sleep_for(std::chrono::milliseconds(20));
    if (fabric_->node().head_height() == h0) throw ChainStalled("no block production");

    const auto& manager = fabric_->account("service-manager");
    const auto& provider = fabric_->account("provider-1");
    const auto& client = fabric_->account("client-1");

    using contracts::CodeId;
    using contracts::ContractEngine;
    uint64_t nonce = 0;
    submit_and_confirm(manager, ++nonce, ContractEngine::encode_deploy(CodeId::Registration));
    chain::Address reg = ContractEngine::contract_address(manager.address, nonce);
    submit_and_confirm(manager, ++nonce, ContractEngine::encode_deploy(CodeId::Capability));
    chain::Address cap = ContractEngine::contract_address(manager.address, nonce);

    submit_and_confirm(manager, ++nonce,
                       ContractEngine::encode_call(reg, "register",
                                                   {{"vid", "vid-client-1"},
                                                    {"address", chain::hex(client.address)}}));
    submit_and_confirm(manager, ++nonce,
                       ContractEngine::encode_call(reg, "register",
                                                   {{"vid", "vid-provider-1"},
                                                    {"address", chain::hex(provider.address)}}));
    submit_and_confirm(manager, ++nonce,
                       ContractEngine::encode_call(cap, "set_owner",
                                                   {{"resource", "/service/*"},
                                                    {"owner", chain::hex(provider.address)}}));
    submit_and_confirm(
        provider, 1,
        ContractEngine::encode_call(cap, "issue",
                                    {{"subject", chain::hex(client.address)},
                                     {"resource", "/service/*"},
                                     {"actions", json::array({"execute"})},
                                     {"ttl_blocks", 1000000},
                                     {"delegation_depth", 2}}));
    access_ready_ = true;
}

LatencyReport LatencyHarness::run(const ExperimentConfig& config) {
    LatencyReport report;
    report.config = config;

    if (config.ac == AcMode::BlendCac) setup_access_control();
    fabric_->set_enforcement(config.ac == AcMode::BlendCac);
    fabric_->set_mode({config.arch, config.link_delay_ms});

    httplib::Client client("127.0.0.1", fabric_->gateway_port());
    client.set_connection_timeout(5, 0);
    client.set_read_timeout(30, 0);
    client.set_keep_alive(true);

    auto health = client.Get("/v1/health");
    if (!health || health->status != 200) throw ServiceDown("gateway health check failed");

    httplib::Headers headers = {{"X-VID", "vid-client-1"}};

    for (int i = 0; i < config.n_requests; ++i) {
        auto t0 = std::chrono::steady_clock::now();
        auto res = client.Post("/v1/service/navigation", headers, "{}", "application/json");
        auto t1 = std::chrono::steady_clock::now();
        if (!res) throw ServiceDown("request failed mid-run");
        if (res->status != 200)
            throw ServiceDown("unexpected status " + std::to_string(res->status) + ": " +
                              res->body);
        if (i < config.warmup_requests) continue;

        auto header_ms = [&](const char* name) {
            std::string v = res->get_header_value(name);
            return v.empty() ? 0.0 : std::stod(v) / 1000.0;
        };
        LatencySample s;
        s.request_id = "req-" + std::to_string(i);
        s.total_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        s.auth_ms = header_ms("X-Auth-Us");
        s.access_ms = header_ms("X-Access-Us");
        s.service_ms = header_ms("X-Service-Us");
        s.transport_ms = std::max(0.0, s.total_ms - s.auth_ms - s.access_ms - s.service_ms);
        report.samples.push_back(std::move(s));
    }

    report.summary = summarize(report.samples);
    return report;
}

LatencyReport run_latency(const ExperimentConfig& config) {
    LatencyHarness harness(config.service_work_iters);
    return harness.run(config);
}

std::vector<std::string> check_latency_invariants(const LatencyReport& report) {
    std::vector<std::string> violations;
    for (const auto& s : report.samples) {
        double sum = s.transport_ms + s.auth_ms + s.access_ms + s.service_ms;
        if (std::fabs(sum - s.total_ms) > 1.0)
            violations.push_back(s.request_id + ": stage sum off by more than 1 ms");
        if (report.config.ac == AcMode::Off && (s.auth_ms != 0.0 || s.access_ms != 0.0))
            violations.push_back(s.request_id + ": nonzero decision time with ac=off");
    }
    if (report.config.arch == gateway::ArchMode::Micro && report.config.link_delay_ms > 0) {
        double floor_ms = 2.0 * report.config.link_delay_ms;
        if (report.summary.mean_ms < floor_ms)
            violations.push_back("mean below injected delay floor");
    }
    return violations;
}

// --- pipeline ----------------------------------------------------------------

AnalyticsPipeline::AnalyticsPipeline(const edge::AirspaceBox& box, const PipelineConfig& config)
    : config_(config),
      tracker_(32, box),
      rules_(fog::default_rules(config.rules)),
      sink_(std::make_shared<fog::MemorySink>()),
      dispatcher_(sink_, "alerts.deadletter") {
    grid_.box = box;
    grid_.rows = config.grid_rows;
    grid_.cols = config.grid_cols;
    grid_.security_level = config.security_level;
}

std::optional<fog::Alert> AnalyticsPipeline::process(const adsb::AdsbRecord& record) {
    processed_++;
    edge::UpdateOutcome outcome = tracker_.update(record);
    if (outcome == edge::UpdateOutcome::RejectedOutOfOrder ||
        outcome == edge::UpdateOutcome::IgnoredOutOfBox ||
        outcome == edge::UpdateOutcome::TrackClosed)
        return std::nullopt;

    const edge::Track* track = tracker_.find(record.icao);
    if (!track || track->points.size() < 2) return std::nullopt;

    edge::FeatureVector fv = edge::extract_features(*track);
    fog::Context ctx = fog::contextualize(fv, record.timestamp, grid_);
    fog::SuspicionReport report = fog::score(fv, ctx, rules_, record.timestamp);
    auto alert = fog::decide(report, config_.suspicion_threshold);
    if (alert) {
        alerts_.push_back(*alert);
        dispatcher_.dispatch(*alert);
    }
    return alert;
}

ThroughputReport run_throughput(const sim::Scenario& scenario, uint64_t seed, int batches,
                                int batch_size, const PipelineConfig& pipeline_config) {
    sim::RunResult sim_run = sim::run(scenario, seed, scenario.horizon_s);
    const size_t needed = static_cast<size_t>(batches) * static_cast<size_t>(batch_size);
    if (sim_run.records.size() < needed)
        throw sim::ScenarioError("scenario produced " + std::to_string(sim_run.records.size()) +
                                 " records, need " + std::to_string(needed));

    AnalyticsPipeline pipeline(scenario.box, pipeline_config);
    ThroughputReport report;

    size_t cursor = 0;
    for (int b = 0; b < batches; ++b) {
        std::deque<adsb::AdsbRecord> queue;
        for (int k = 0; k < batch_size; ++k) {
            if (queue.size() >= pipeline_config.queue_capacity)
                throw QueueOverflow(b, "pipeline queue overflow in batch " + std::to_string(b));
            queue.push_back(sim_run.records[cursor++]);
        }

        ThroughputRow row;
        row.batch = b;
        auto t0 = std::chrono::steady_clock::now();
        double cpu0 = process_cpu_seconds();
        while (!queue.empty()) {
            pipeline.process(queue.front());
            queue.pop_front();
            row.processed++;
        }
        double cpu1 = process_cpu_seconds();
        auto t1 = std::chrono::steady_clock::now();
        row.wall_ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
        double wall_s = std::max(row.wall_ms / 1000.0, 1e-9);
        row.cpu_utilization = std::max(0.0, (cpu1 - cpu0) / wall_s);
        report.rows.push_back(row);
        report.total_processed += static_cast<uint64_t>(row.processed);
    }

    report.alerts = pipeline.alerts().size();
    report.zero_loss = report.total_processed == needed && pipeline.processed() == needed;
    return report;
}

E2eReport run_scenario_e2e(const sim::Scenario& scenario, uint64_t seed,
                           const PipelineConfig& pipeline_config) {
    if (scenario.attacks.empty())
        throw sim::ScenarioError("e2e scenario must include at least one attack");

    AnalyticsPipeline pipeline(scenario.box, pipeline_config);
    sim::RunHooks hooks;
    hooks.on_record = [&](const adsb::AdsbRecord& r) { pipeline.process(r); };
    sim::run(scenario, seed, scenario.horizon_s, &hooks);

    E2eReport report;
    std::set<std::string> attacked;
    for (const auto& note : scenario.attacks) {
        if (!note.icao.empty()) attacked.insert(note.icao);

        E2eAttackVerdict verdict;
        verdict.kind = note.kind;
        verdict.icao = note.icao;
        verdict.at_s = note.at_s;
        for (const auto& agent : scenario.agents) {
            if (agent.icao == note.icao) verdict.report_period_s = agent.report_period_s;
        }
        for (const auto& alert : pipeline.alerts()) {
            if (alert.icao == note.icao && alert.decided_at >= note.at_s) {
                verdict.alert_fired = true;
                verdict.detection_latency_s = alert.decided_at - note.at_s;
                break;
            }
        }
        report.attacks.push_back(verdict);
    }

    for (const auto& agent : scenario.agents) {
        if (attacked.count(agent.icao)) continue;
        report.nominal_flights++;
        for (const auto& alert : pipeline.alerts())
            if (alert.icao == agent.icao) report.nominal_alerts++;
    }

    report.all_attacks_detected = true;
    for (const auto& v : report.attacks) {
        if (v.kind == "spoof" && !v.alert_fired) report.all_attacks_detected = false;
    }
    return report;
}

// --- reports -----------------------------------------------------------------

namespace {

void write_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::trunc | std::ios::binary);
    if (!out) throw IoError("cannot open " + path);
    out << content;
    if (!out) throw IoError("write failed on " + path);
}

}  // namespace

void emit_report(const std::vector<LatencySample>& samples, const std::string& path) {
    if (samples.empty()) throw std::invalid_argument("no samples to report");
    std::string csv = "request_id,total_ms,transport_ms,auth_ms,access_ms,service_ms\n";
    for (const auto& s : samples) {
        csv += s.request_id + "," + format_fixed(s.total_ms, 6) + "," +
               format_fixed(s.transport_ms, 6) + "," + format_fixed(s.auth_ms, 6) + "," +
               format_fixed(s.access_ms, 6) + "," + format_fixed(s.service_ms, 6) + "\n";
    }
    write_file(path, csv);
}

void emit_report(const std::vector<ThroughputRow>& rows, const std::string& path) {
    if (rows.empty()) throw std::invalid_argument("no rows to report");
    std::string csv = "batch,processed,wall_ms,cpu_utilization\n";
    for (const auto& r : rows) {
        csv += std::to_string(r.batch) + "," + std::to_string(r.processed) + "," +
               format_fixed(r.wall_ms, 6) + "," + format_fixed(r.cpu_utilization, 6) + "\n";
    }
    write_file(path, csv);
}

void emit_report(const E2eReport& report, const std::string& path) {
    std::string csv = "kind,icao,at_s,alert_fired,detection_latency_s\n";
    for (const auto& v : report.attacks) {
        csv += v.kind + "," + v.icao + "," + format_fixed(v.at_s, 3) + "," +
               (v.alert_fired ? "1" : "0") + "," + format_fixed(v.detection_latency_s, 3) + "\n";
    }
    csv += "nominal," + std::to_string(report.nominal_flights) + ",0," +
           (report.nominal_alerts == 0 ? "0" : std::to_string(report.nominal_alerts)) + ",-1\n";
    write_file(path, csv);
}

std::vector<LatencySample> parse_latency_csv(const std::string& text) {
    std::vector<LatencySample> out;
    std::istringstream in(text);
    std::string line;
    bool header = true;
    while (std::getline(in, line)) {
        if (header) {
            header = false;
            continue;
        }
        if (line.empty()) continue;
        std::stringstream row(line);
        std::string field;
        LatencySample s;
        std::getline(row, s.request_id, ',');
        std::getline(row, field, ',');
        s.total_ms = std::stod(field);
        std::getline(row, field, ',');
        s.transport_ms = std::stod(field);
        std::getline(row, field, ',');
        s.auth_ms = std::stod(field);
        std::getline(row, field, ',');
        s.access_ms = std::stod(field);
        std::getline(row, field, ',');
        s.service_ms = std::stod(field);
        out.push_back(std::move(s));
    }
    return out;
}

}  // namespace airtrust::bench
