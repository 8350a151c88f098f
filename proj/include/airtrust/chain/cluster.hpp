#pragma once

#include <queue>

#include "airtrust/chain/node.hpp"
#include "airtrust/common/rng.hpp"

namespace airtrust::chain {

// Deterministic multi-replica network: simulated clock, per-message random
// link delays, gossip flooding with duplicate suppression. Single-threaded so
// a (config, seed) pair fully fixes every byte of every chain.
struct ClusterConfig {
    int miners = 6;
    int observers = 6;
    uint64_t seed = 1;
    double max_link_delay_ms = 100.0;
    uint64_t tick_every_ms = 100;
    ChainParams params;
    std::vector<int> crashed;  // node indices that never run or receive
    int client_accounts = 4;
};

class Cluster {
public:
    explicit Cluster(const ClusterConfig& config);

    size_t size() const { return nodes_.size(); }
    ChainNode& node(size_t i) { return *nodes_[i]; }
    const ChainNode& node(size_t i) const { return *nodes_[i]; }
    bool is_crashed(size_t i) const;
    const GenesisConfig& genesis() const { return genesis_; }
    const std::vector<Account>& clients() const { return clients_; }

    Transaction make_client_tx(size_t client_idx, const Bytes& payload);

    // Schedules a submission at simulated time t to the given node.
    void submit_at(uint64_t t_ms, size_t node_idx, const Transaction& tx);

    void run_until(uint64_t t_end_ms);
    uint64_t now_ms() const { return now_ms_; }

    struct TxTiming {
        uint64_t submit_ms = 0;
        uint64_t submit_head_height = 0;
        std::optional<uint64_t> confirm_height;
    };
    // Confirm heights resolved against the first live node's canonical chain.
    std::map<Digest, TxTiming> tx_timings() const;

    bool heads_equal() const;
    bool chains_identical() const;
    bool confirmed_logs_identical() const;

    // Set when any node ever saw a finalized transaction drop back out of its
    // log; checked continuously during the run.
    bool finality_violated() const { return finality_violated_; }

private:
    struct Event {
        uint64_t t;
        uint64_t seq;
        int kind;  // 0 tick, 1 deliver block, 2 deliver tx, 3 submit tx
        size_t node;
        Block block;
        Transaction tx;
    };
    struct EventOrder {
        bool operator()(const Event& a, const Event& b) const {
            return std::tie(a.t, a.seq) > std::tie(b.t, b.seq);
        }
    };

    void schedule(Event e);
    void broadcast_block(size_t from, const Block& block);
    void broadcast_tx(size_t from, const Transaction& tx);
    void handle(const Event& e);
    void check_finality(size_t node_idx);

    ClusterConfig config_;
    GenesisConfig genesis_;
    std::vector<std::unique_ptr<ChainNode>> nodes_;
    std::vector<Account> clients_;
    std::map<Address, uint64_t> client_nonces_;

    Rng rng_;
    std::priority_queue<Event, std::vector<Event>, EventOrder> events_;
    uint64_t seq_ = 0;
    uint64_t now_ms_ = 0;

    std::map<Digest, TxTiming> timings_;
    std::vector<std::vector<Digest>> finalized_;  // per node, in confirmed order
    bool finality_violated_ = false;
};

}  // namespace airtrust::chain
