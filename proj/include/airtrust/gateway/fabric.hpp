#pragma once

#include <atomic>
#include <deque>
#include <functional>
#include <memory>
#include <thread>

#include "airtrust/contracts/host.hpp"
#include "airtrust/edge/tracker.hpp"

namespace airtrust::gateway {

enum class ArchMode { Micro, Mono };

struct DeploymentMode {
    ArchMode mode = ArchMode::Micro;
    double link_delay_ms = 0.0;  // per hop; applied in micro mode only
};

struct BusyError : std::runtime_error {
    explicit BusyError(const std::string& what) : std::runtime_error(what) {}
};

struct FabricConfig {
    DeploymentMode deployment;
    bool enforcement = true;
    bool decision_cache = false;  // optimization only; off for measurements
    size_t feature_queue_capacity = 1024;
    size_t max_body_bytes = 1024 * 1024;
    uint64_t block_interval_ms = 200;
    // Fixed iteration count of the navigation service's deterministic
    // workload; sized so one request costs a few milliseconds.
    int service_work_iters = 12000;
    int extra_client_accounts = 0;
};

struct AccessLogEntry {
    std::string request_id;
    std::string vid;
    std::string resource;
    std::string action;
    bool granted = false;
    std::string detail;  // token id or deny reason
};

struct GatewayStats {
    uint64_t grants = 0;
    uint64_t denies = 0;
    uint64_t auth_failures = 0;
    uint64_t features_accepted = 0;
};

// One-process deployment of the whole service layer: gateway front, the
// application service unit, and the blockchain node with its RPC server.
// In micro mode app-service calls cross a real loopback socket (plus any
// injected per-hop delay); in mono mode they are direct calls. The chain
// RPC crosses a socket in both modes, mirroring a blockchain client that
// always runs as its own unit.
class ServiceFabric {
public:
    explicit ServiceFabric(FabricConfig config);
    ~ServiceFabric();

    void start();
    void stop();

    int gateway_port() const { return gateway_port_; }
    int chain_rpc_port() const { return chain_rpc_port_; }

    // Throw BusyError while requests are in flight.
    void set_mode(const DeploymentMode& mode);
    void set_enforcement(bool on);

    DeploymentMode mode() const;
    bool enforcement() const { return enforcement_.load(); }

    chain::ChainNode& node() { return *node_; }
    contracts::ContractHost& contracts() { return *host_; }
    const chain::GenesisConfig& genesis() const { return genesis_; }

    // Direct invocation of a registered service, bypassing the gateway.
    std::pair<int, std::string> call_service_direct(const std::string& name,
                                                    const std::string& body);

    std::vector<edge::FeatureMap> drain_features();
    size_t feature_queue_depth() const;

    std::vector<AccessLogEntry> access_log() const;
    GatewayStats stats() const;

    const chain::Account& account(const std::string& name) const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;

    FabricConfig config_;
    chain::GenesisConfig genesis_;
    std::unique_ptr<chain::ChainNode> node_;
    std::unique_ptr<contracts::ContractHost> host_;

    int gateway_port_ = 0;
    int service_port_ = 0;
    int chain_rpc_port_ = 0;

    std::atomic<bool> running_{false};
    std::atomic<bool> enforcement_{true};
    std::thread proposer_thread_;
};

// The navigation service's deterministic workload; exposed for calibration.
double navigation_workload(int iterations);

}  // namespace airtrust::gateway
