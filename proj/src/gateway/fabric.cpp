#include "airtrust/gateway/fabric.hpp"

#include <chrono>

#include <httplib.h>
#include <json.hpp>

#include "airtrust/adsb/frame.hpp"
#include "airtrust/common/geo.hpp"

namespace airtrust::gateway {

using nlohmann::json;

namespace {

uint64_t steady_ms() {
    return static_cast<uint64_t>(std::chrono::duration_cast<std::chrono::milliseconds>(
                                     std::chrono::steady_clock::now().time_since_epoch())
                                     .count());
}

struct InFlightGuard {
    explicit InFlightGuard(std::atomic<int>& counter) : counter_(counter) { ++counter_; }
    ~InFlightGuard() { --counter_; }
    std::atomic<int>& counter_;
};

}  // namespace

double navigation_workload(int iterations) {
    double acc = 0.0;
    double lat = 52.0, lon = 4.0;
    static const std::string frame = "8D485020994409940838175B284F";
    for (int i = 0; i < iterations; ++i) {
        auto msg = adsb::parse_frame(frame, 1.0);
        const auto& v = std::get<adsb::AirborneVelocity>(msg.payload);
        auto p = geo::advance(lat, lon, v.track_deg + (i % 11), 400.0 + (i % 7) * 40.0);
        acc += geo::haversine_m(lat, lon, p.lat_deg, p.lon_deg);
        lat = p.lat_deg;
        lon = p.lon_deg;
        if (lat < 50.5 || lat > 53.5) {
            lat = 52.0;
            lon = 4.0;
        }
    }
    return acc;
}

struct ServiceFabric::Impl {
    ServiceFabric* fabric = nullptr;

    httplib::Server gateway;
    httplib::Server service_unit;
    httplib::Server chain_rpc;
    std::thread gateway_thread;
    std::thread service_thread;
    std::thread chain_thread;

    mutable std::mutex mode_mutex;
    DeploymentMode deployment;

    std::atomic<int> in_flight{0};
    std::atomic<uint64_t> request_seq{0};

    mutable std::mutex fog_mutex;
    std::deque<edge::FeatureMap> fog_queue;

    mutable std::mutex log_mutex;
    std::vector<AccessLogEntry> access_log;
    GatewayStats stats;

    std::mutex cache_mutex;
    std::map<std::string, std::pair<bool, std::string>> decision_cache;

    DeploymentMode current_mode() const {
        std::lock_guard<std::mutex> lock(mode_mutex);
        return deployment;
    }

    void hop_delay() {
        DeploymentMode m = current_mode();
        if (m.mode == ArchMode::Micro && m.link_delay_ms > 0)
            std::this_thread::sleep_for(
                std::chrono::microseconds(static_cast<int64_t>(m.link_delay_ms * 1000)));
    }

    // --- services ---------------------------------------------------------

    std::pair<int, std::string> run_service(const std::string& name, const std::string& body) {
        if (name == "navigation") {
            double acc = navigation_workload(fabric->config_.service_work_iters);
            json out;
            out["service"] = "navigation";
            out["work"] = acc;
            return {200, out.dump()};
        }
        if (name == "echo") {
            return {200, body.empty() ? "{}" : body};
        }
        if (name == "slow") {
            int sleep_ms = 100;
            try {
                if (!body.empty()) sleep_ms = json::parse(body).value("sleep_ms", 100);
            } catch (...) {}
            std::this_thread::sleep_for(std::chrono::milliseconds(sleep_ms));
            return {200, "{\"ok\":true}"};
        }
        return {404, "{\"error\":\"UnknownService\"}"};
    }

    bool push_features(edge::FeatureMap map) {
        std::lock_guard<std::mutex> lock(fog_mutex);
        if (fog_queue.size() >= fabric->config_.feature_queue_capacity) return false;
        fog_queue.push_back(std::move(map));
        return true;
    }

    // --- chain RPC --------------------------------------------------------

    json rpc_execute(const json& request) {
        json response;
        response["height"] = fabric->node_->head_height();
        std::string method = request.value("method", "");
        json params = request.value("params", json::object());

        try {
            if (method == "submit_tx") {
                auto bytes = from_hex(params.at("tx").get<std::string>());
                if (!bytes) throw std::invalid_argument("bad tx hex");
                chain::Transaction tx = chain::Transaction::decode(
                    std::span<const uint8_t>(bytes->data(), bytes->size()));
                chain::SubmitResult r = fabric->node_->submit_tx(tx);
                response["result"] = {{"status", chain::to_string(r)},
                                      {"id", chain::hex(tx.id())}};
            } else if (method == "head") {
                auto h = fabric->node_->head();
                response["result"] = {{"height", h.height},
                                      {"hash", chain::hex(h.hash())},
                                      {"parent_hash", chain::hex(h.parent_hash)},
                                      {"merkle_root", chain::hex(h.merkle_root)},
                                      {"timestamp_ms", h.timestamp_ms},
                                      {"proposer", chain::hex(h.proposer)}};
            } else if (method == "block") {
                std::optional<chain::Block> b;
                if (params.contains("height"))
                    b = fabric->node_->block_by_height(params.at("height").get<uint64_t>());
                else if (params.contains("hash"))
                    b = fabric->node_->block_by_hash(
                        chain::digest_from_hex(params.at("hash").get<std::string>()));
                if (!b)
                    response["error"] = "NotFound";
                else
                    response["result"] = json::parse(chain::block_to_json(*b));
            } else if (method == "tx_status") {
                auto st = fabric->node_->tx_status(
                    chain::digest_from_hex(params.at("id").get<std::string>()));
                json r;
                switch (st.state) {
                    case chain::TxStatus::State::Pending: r["state"] = "pending"; break;
                    case chain::TxStatus::State::Confirmed:
                        r["state"] = "confirmed";
                        r["confirmed_height"] = st.height;
                        break;
                    case chain::TxStatus::State::Rejected:
                        r["state"] = "rejected";
                        r["reason"] = chain::to_string(st.reject_reason);
                        break;
                    case chain::TxStatus::State::Unknown: r["state"] = "unknown"; break;
                }
                if (st.state == chain::TxStatus::State::Unknown)
                    response["error"] = "UnknownTx";
                else
                    response["result"] = r;
            } else if (method == "contract_query") {
                std::optional<contracts::Address> addr;
                if (params.contains("address")) {
                    addr = chain::address_from_hex(params.at("address").get<std::string>());
                } else {
                    std::string code = params.value("code", "");
                    if (code == "registration")
                        addr = fabric->host_->address_of(contracts::CodeId::Registration);
                    else if (code == "capability")
                        addr = fabric->host_->address_of(contracts::CodeId::Capability);
                }
                if (!addr) {
                    response["error"] = "UnknownContract";
                } else {
                    contracts::CallResult r;
                    std::string fn = params.at("fn").get<std::string>();
                    json args = params.value("args", json::object());
                    if (params.contains("at_height"))
                        r = fabric->host_->query_at(*addr, fn, args,
                                                    params.at("at_height").get<uint64_t>());
                    else
                        r = fabric->host_->query(*addr, fn, args);
                    if (r.ok)
                        response["result"] = r.value;
                    else
                        response["error"] = r.error;
                }
            } else {
                response["error"] = "UnknownMethod";
            }
        } catch (const std::exception& e) {
            response["error"] = std::string("ArgumentError: ") + e.what();
        }
        return response;
    }

    // Gateway-side RPC bridge: always a real socket to the chain unit.
    json rpc_call(const std::string& method, const json& params) {
        httplib::Client client("127.0.0.1", fabric->chain_rpc_port_);
        client.set_connection_timeout(2, 0);
        json req;
        req["method"] = method;
        req["params"] = params;
        auto res = client.Post("/rpc", req.dump(), "application/json");
        if (!res || res->status != 200) {
            json err;
            err["error"] = "ChainUnavailable";
            return err;
        }
        return json::parse(res->body);
    }

    // --- handlers ---------------------------------------------------------

    void handle_features(const httplib::Request& req, httplib::Response& res) {
        InFlightGuard guard(in_flight);
        if (req.body.size() > fabric->config_.max_body_bytes) {
            res.status = 413;
            res.set_content("{\"error\":\"TooLarge\"}", "application/json");
            return;
        }
        edge::FeatureMap map;
        try {
            map = edge::parse_features(req.body);
        } catch (const std::exception& e) {
            res.status = 400;
            json err;
            err["error"] = "SchemaError";
            err["detail"] = e.what();
            res.set_content(err.dump(), "application/json");
            return;
        }

        size_t count = map.entries.size();
        bool accepted;
        if (current_mode().mode == ArchMode::Micro) {
            hop_delay();
            httplib::Client client("127.0.0.1", fabric->service_port_);
            client.set_connection_timeout(2, 0);
            auto fwd = client.Post("/internal/features", req.body, "application/json");
            hop_delay();
            if (!fwd || fwd->status == 503) {
                accepted = false;
            } else if (fwd->status != 200) {
                res.status = 502;
                res.set_content("{\"error\":\"ServiceUnavailable\"}", "application/json");
                return;
            } else {
                accepted = true;
            }
        } else {
            accepted = push_features(std::move(map));
        }

        if (!accepted) {
            res.status = 503;
            res.set_content("{\"error\":\"QueueFull\"}", "application/json");
            return;
        }
        {
            std::lock_guard<std::mutex> lock(log_mutex);
            stats.features_accepted += count;
        }
        json out;
        out["accepted"] = count;
        res.set_content(out.dump(), "application/json");
    }

    void handle_service(const httplib::Request& req, httplib::Response& res) {
        InFlightGuard guard(in_flight);
        auto t_start = std::chrono::steady_clock::now();

        std::string name = req.path_params.at("name");
        std::string request_id = req.get_header_value("X-Request-Id");
        if (request_id.empty())
            request_id = "req-" + std::to_string(request_seq.fetch_add(1));

        std::string resource = "/service/" + name;
        std::string action = "execute";
        if (!req.body.empty()) {
            try {
                json body = json::parse(req.body);
                if (body.is_object()) {
                    resource = body.value("resource", resource);
                    action = body.value("action", action);
                }
            } catch (...) {}
        }

        int64_t auth_us = 0, access_us = 0, service_us = 0;
        res.set_header("X-Request-Id", request_id);

        if (fabric->enforcement_.load()) {
            // Stage 1: identity. VID resolves to its bound account address,
            // then the pair is authenticated against the registration
            // contract at the confirmed head.
            auto t_auth = std::chrono::steady_clock::now();
            std::string vid = req.get_header_value("X-VID");
            std::string address_hex;
            bool authenticated = false;
            if (!vid.empty()) {
                json lookup = rpc_call("contract_query",
                                       {{"code", "registration"},
                                        {"fn", "lookup"},
                                        {"args", {{"vid", vid}}}});
                if (lookup.contains("result") && lookup["result"].value("registered", false)) {
                    address_hex = lookup["result"].value("address", "");
                    json auth = rpc_call("contract_query",
                                         {{"code", "registration"},
                                          {"fn", "authenticate"},
                                          {"args", {{"vid", vid}, {"address", address_hex}}}});
                    authenticated = auth.contains("result") &&
                                    auth["result"].value("authenticated", false);
                }
            }
            auth_us = std::chrono::duration_cast<std::chrono::microseconds>(
                          std::chrono::steady_clock::now() - t_auth)
                          .count();

            if (!authenticated) {
                std::lock_guard<std::mutex> lock(log_mutex);
                stats.auth_failures++;
                res.status = 401;
                res.set_header("X-Auth-Us", std::to_string(auth_us));
                res.set_header("X-Access-Us", "0");
                res.set_header("X-Service-Us", "0");
                res.set_header("X-Decision-Us", std::to_string(auth_us));
                res.set_content("{\"error\":\"AuthFailed\"}", "application/json");
                return;
            }

            // Stage 2: capability check, deny by default.
            auto t_access = std::chrono::steady_clock::now();
            std::string token_header = req.get_header_value("X-Token-Id");
            bool granted = false;
            std::string detail;

            std::string cache_key;
            bool cached = false;
            if (fabric->config_.decision_cache) {
                json head = rpc_call("head", json::object());
                cache_key = vid + "|" + token_header + "|" + resource + "|" + action + "|" +
                            std::to_string(head.value("height", 0));
                std::lock_guard<std::mutex> lock(cache_mutex);
                auto it = decision_cache.find(cache_key);
                if (it != decision_cache.end()) {
                    granted = it->second.first;
                    detail = it->second.second;
                    cached = true;
                }
            }
            if (!cached) {
                json verify = rpc_call("contract_query",
                                       {{"code", "capability"},
                                        {"fn", "verify"},
                                        {"args",
                                         {{"subject", address_hex},
                                          {"resource", resource},
                                          {"action", action}}}});
                if (verify.contains("result")) {
                    granted = verify["result"].value("granted", false);
                    detail = granted ? verify["result"].value("token_id", "")
                                     : verify["result"].value("reason", "NoToken");
                } else {
                    detail = verify.value("error", "ChainUnavailable");
                }
                if (fabric->config_.decision_cache) {
                    std::lock_guard<std::mutex> lock(cache_mutex);
                    decision_cache[cache_key] = {granted, detail};
                }
            }
            access_us = std::chrono::duration_cast<std::chrono::microseconds>(
                            std::chrono::steady_clock::now() - t_access)
                            .count();

            {
                std::lock_guard<std::mutex> lock(log_mutex);
                access_log.push_back({request_id, vid, resource, action, granted, detail});
                if (granted)
                    stats.grants++;
                else
                    stats.denies++;
            }

            if (!granted) {
                res.status = 403;
                res.set_header("X-Auth-Us", std::to_string(auth_us));
                res.set_header("X-Access-Us", std::to_string(access_us));
                res.set_header("X-Service-Us", "0");
                res.set_header("X-Decision-Us", std::to_string(auth_us + access_us));
                json err;
                err["error"] = "AccessDenied";
                err["reason"] = detail;
                res.set_content(err.dump(), "application/json");
                return;
            }
        }

        // Stage 3: the service itself, direct in mono, over the wire in micro.
        auto t_service = std::chrono::steady_clock::now();
        int status;
        std::string body;
        if (current_mode().mode == ArchMode::Micro) {
            hop_delay();
            httplib::Client client("127.0.0.1", fabric->service_port_);
            client.set_connection_timeout(2, 0);
            auto fwd =
                client.Post("/internal/service/" + name, req.body, "application/json");
            hop_delay();
            if (!fwd) {
                res.status = 502;
                res.set_content("{\"error\":\"ServiceUnavailable\"}", "application/json");
                return;
            }
            status = fwd->status;
            body = fwd->body;
        } else {
            auto out = run_service(name, req.body);
            status = out.first;
            body = std::move(out.second);
        }
        service_us = std::chrono::duration_cast<std::chrono::microseconds>(
                         std::chrono::steady_clock::now() - t_service)
                         .count();

        (void)t_start;
        res.status = status;
        res.set_header("X-Auth-Us", std::to_string(auth_us));
        res.set_header("X-Access-Us", std::to_string(access_us));
        res.set_header("X-Service-Us", std::to_string(service_us));
        res.set_header("X-Decision-Us", std::to_string(auth_us + access_us));
        res.set_content(body, "application/json");
    }
};

ServiceFabric::ServiceFabric(FabricConfig config) : config_(std::move(config)) {
    genesis_.params.block_interval_ms = config_.block_interval_ms;
    genesis_.params.block_capacity = 128;
    genesis_.genesis_time_ms = 0;
    genesis_.accounts.push_back(chain::make_account("authority-0", true, true));
    genesis_.accounts.push_back(chain::make_account("service-manager", false, true));
    genesis_.accounts.push_back(chain::make_account("provider-1"));
    genesis_.accounts.push_back(chain::make_account("client-1"));
    for (int i = 0; i < config_.extra_client_accounts; ++i)
        genesis_.accounts.push_back(chain::make_account("client-x" + std::to_string(i)));

    node_ = std::make_unique<chain::ChainNode>(genesis_, genesis_.accounts[0].address,
                                               chain::NodeRole::Miner);
    host_ = std::make_unique<contracts::ContractHost>(*node_);

    impl_ = std::make_unique<Impl>();
    impl_->fabric = this;
    impl_->deployment = config_.deployment;
    enforcement_.store(config_.enforcement);
}

ServiceFabric::~ServiceFabric() { stop(); }

void ServiceFabric::start() {
    if (running_.exchange(true)) return;

    auto& impl = *impl_;

    impl.chain_rpc.Post("/rpc", [this](const httplib::Request& req, httplib::Response& res) {
        json request;
        try {
            request = json::parse(req.body);
        } catch (const std::exception&) {
            res.status = 400;
            res.set_content("{\"error\":\"BadRequest\"}", "application/json");
            return;
        }
        res.set_content(impl_->rpc_execute(request).dump(), "application/json");
    });

    impl.service_unit.Post("/internal/service/:name",
                           [this](const httplib::Request& req, httplib::Response& res) {
                               auto out = impl_->run_service(req.path_params.at("name"), req.body);
                               res.status = out.first;
                               res.set_content(out.second, "application/json");
                           });
    impl.service_unit.Post("/internal/features",
                           [this](const httplib::Request& req, httplib::Response& res) {
                               try {
                                   auto map = edge::parse_features(req.body);
                                   if (!impl_->push_features(std::move(map))) {
                                       res.status = 503;
                                       res.set_content("{\"error\":\"QueueFull\"}",
                                                       "application/json");
                                       return;
                                   }
                               } catch (const std::exception&) {
                                   res.status = 400;
                                   res.set_content("{\"error\":\"SchemaError\"}",
                                                   "application/json");
                                   return;
                               }
                               res.set_content("{\"ok\":true}", "application/json");
                           });

    impl.gateway.Get("/v1/health", [this](const httplib::Request&, httplib::Response& res) {
        json out;
        out["ok"] = true;
        out["mode"] = impl_->current_mode().mode == ArchMode::Micro ? "micro" : "mono";
        out["height"] = node_->head_height();
        res.set_content(out.dump(), "application/json");
    });
    impl.gateway.Post("/v1/features", [this](const httplib::Request& req, httplib::Response& res) {
        impl_->handle_features(req, res);
    });
    impl.gateway.Post("/v1/service/:name",
                      [this](const httplib::Request& req, httplib::Response& res) {
                          impl_->handle_service(req, res);
                      });
    impl.gateway.Post("/v1/rpc", [this](const httplib::Request& req, httplib::Response& res) {
        InFlightGuard guard(impl_->in_flight);
        json request;
        try {
            request = json::parse(req.body);
        } catch (const std::exception&) {
            res.status = 400;
            res.set_content("{\"error\":\"BadRequest\"}", "application/json");
            return;
        }
        std::string method = request.value("method", "");
        json params = request.value("params", json::object());
        res.set_content(impl_->rpc_call(method, params).dump(), "application/json");
    });

    chain_rpc_port_ = impl.chain_rpc.bind_to_any_port("127.0.0.1");
    service_port_ = impl.service_unit.bind_to_any_port("127.0.0.1");
    gateway_port_ = impl.gateway.bind_to_any_port("127.0.0.1");

    impl.chain_thread = std::thread([&impl] { impl.chain_rpc.listen_after_bind(); });
    impl.service_thread = std::thread([&impl] { impl.service_unit.listen_after_bind(); });
    impl.gateway_thread = std::thread([&impl] { impl.gateway.listen_after_bind(); });

    impl.chain_rpc.wait_until_ready();
    impl.service_unit.wait_until_ready();
    impl.gateway.wait_until_ready();

    proposer_thread_ = std::thread([this] {
        uint64_t t0 = steady_ms();
        while (running_.load()) {
            node_->tick(steady_ms() - t0 + 1);
            std::this_thread::sleep_for(
                std::chrono::milliseconds(std::max<uint64_t>(config_.block_interval_ms / 4, 5)));
        }
    });
}

void ServiceFabric::stop() {
    if (!running_.exchange(false)) return;
    auto& impl = *impl_;
    impl.gateway.stop();
    impl.service_unit.stop();
    impl.chain_rpc.stop();
    if (impl.gateway_thread.joinable()) impl.gateway_thread.join();
    if (impl.service_thread.joinable()) impl.service_thread.join();
    if (impl.chain_thread.joinable()) impl.chain_thread.join();
    if (proposer_thread_.joinable()) proposer_thread_.join();
}

void ServiceFabric::set_mode(const DeploymentMode& mode) {
    if (impl_->in_flight.load() != 0)
        throw BusyError("mode change requires a quiesced gateway");
    std::lock_guard<std::mutex> lock(impl_->mode_mutex);
    impl_->deployment = mode;
}

void ServiceFabric::set_enforcement(bool on) {
    if (impl_->in_flight.load() != 0)
        throw BusyError("enforcement change requires a quiesced gateway");
    enforcement_.store(on);
}

DeploymentMode ServiceFabric::mode() const { return impl_->current_mode(); }

std::pair<int, std::string> ServiceFabric::call_service_direct(const std::string& name,
                                                               const std::string& body) {
    return impl_->run_service(name, body);
}

std::vector<edge::FeatureMap> ServiceFabric::drain_features() {
    std::lock_guard<std::mutex> lock(impl_->fog_mutex);
    std::vector<edge::FeatureMap> out(impl_->fog_queue.begin(), impl_->fog_queue.end());
    impl_->fog_queue.clear();
    return out;
}

size_t ServiceFabric::feature_queue_depth() const {
    std::lock_guard<std::mutex> lock(impl_->fog_mutex);
    return impl_->fog_queue.size();
}

std::vector<AccessLogEntry> ServiceFabric::access_log() const {
    std::lock_guard<std::mutex> lock(impl_->log_mutex);
    return impl_->access_log;
}

GatewayStats ServiceFabric::stats() const {
    std::lock_guard<std::mutex> lock(impl_->log_mutex);
    return impl_->stats;
}

const chain::Account& ServiceFabric::account(const std::string& name) const {
    for (const auto& a : genesis_.accounts)
        if (a.name == name) return a;
    throw std::out_of_range("no account named " + name);
}

}  // namespace airtrust::gateway
