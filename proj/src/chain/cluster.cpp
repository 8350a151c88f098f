#include "airtrust/chain/cluster.hpp"

#include <algorithm>

namespace airtrust::chain {

Cluster::Cluster(const ClusterConfig& config) : config_(config), rng_(config.seed) {
    genesis_.params = config.params;
    genesis_.genesis_time_ms = 0;

    for (int i = 0; i < config.miners; ++i)
        genesis_.accounts.push_back(make_account("miner-" + std::to_string(i), true));
    for (int i = 0; i < config.observers; ++i)
        genesis_.accounts.push_back(make_account("observer-" + std::to_string(i)));
    for (int i = 0; i < config.client_accounts; ++i) {
        Account c = make_account("client-" + std::to_string(i));
        genesis_.accounts.push_back(c);
        clients_.push_back(c);
    }

    for (int i = 0; i < config.miners; ++i) {
        nodes_.push_back(std::make_unique<ChainNode>(
            genesis_, genesis_.accounts[i].address, NodeRole::Miner));
    }
    for (int i = 0; i < config.observers; ++i) {
        nodes_.push_back(std::make_unique<ChainNode>(
            genesis_, genesis_.accounts[config.miners + i].address, NodeRole::NonMiner));
    }
    finalized_.resize(nodes_.size());

    for (size_t i = 0; i < nodes_.size(); ++i) {
        if (is_crashed(i)) continue;
        schedule({config_.tick_every_ms, seq_++, 0, i, {}, {}});
    }
}

bool Cluster::is_crashed(size_t i) const {
    return std::find(config_.crashed.begin(), config_.crashed.end(), static_cast<int>(i)) !=
           config_.crashed.end();
}

Transaction Cluster::make_client_tx(size_t client_idx, const Bytes& payload) {
    const Account& client = clients_.at(client_idx);
    Transaction tx;
    tx.sender = client.address;
    tx.nonce = ++client_nonces_[client.address];
    tx.payload = payload;
    Bytes unsigned_bytes = tx.encode_unsigned();
    tx.signature = default_signer().sign(
        client.key, std::span<const uint8_t>(unsigned_bytes.data(), unsigned_bytes.size()));
    return tx;
}

void Cluster::schedule(Event e) { events_.push(std::move(e)); }

void Cluster::submit_at(uint64_t t_ms, size_t node_idx, const Transaction& tx) {
    schedule({t_ms, seq_++, 3, node_idx, {}, tx});
}

void Cluster::broadcast_block(size_t from, const Block& block) {
    for (size_t i = 0; i < nodes_.size(); ++i) {
        if (i == from || is_crashed(i)) continue;
        uint64_t delay = 1 + static_cast<uint64_t>(rng_.uniform(0.0, config_.max_link_delay_ms));
        schedule({now_ms_ + delay, seq_++, 1, i, block, {}});
    }
}

void Cluster::broadcast_tx(size_t from, const Transaction& tx) {
    for (size_t i = 0; i < nodes_.size(); ++i) {
        if (i == from || is_crashed(i)) continue;
        uint64_t delay = 1 + static_cast<uint64_t>(rng_.uniform(0.0, config_.max_link_delay_ms));
        schedule({now_ms_ + delay, seq_++, 2, i, {}, tx});
    }
}

void Cluster::check_finality(size_t node_idx) {
    std::vector<Digest> now_final =
        nodes_[node_idx]->confirmed_tx_ids(config_.params.finality_depth);
    std::vector<Digest>& prev = finalized_[node_idx];
    if (now_final.size() < prev.size() ||
        !std::equal(prev.begin(), prev.end(), now_final.begin()))
        finality_violated_ = true;
    prev = std::move(now_final);
}

void Cluster::handle(const Event& e) {
    ChainNode& n = *nodes_[e.node];
    switch (e.kind) {
        case 0: {  // tick
            if (auto block = n.tick(now_ms_)) {
                broadcast_block(e.node, *block);
                check_finality(e.node);
            }
            schedule({now_ms_ + config_.tick_every_ms, seq_++, 0, e.node, {}, {}});
            break;
        }
        case 1: {  // deliver block
            auto ingest = n.on_block(e.block);
            if (ingest == ChainNode::Ingest::Accepted) {
                broadcast_block(e.node, e.block);
                check_finality(e.node);
            }
            break;
        }
        case 2: {  // gossip tx
            if (n.submit_tx(e.tx) == SubmitResult::Queued) broadcast_tx(e.node, e.tx);
            break;
        }
        case 3: {  // external submission
            TxTiming timing;
            timing.submit_ms = now_ms_;
            timing.submit_head_height = n.head_height();
            timings_[e.tx.id()] = timing;
            if (n.submit_tx(e.tx) == SubmitResult::Queued) broadcast_tx(e.node, e.tx);
            break;
        }
        default: break;
    }
}

void Cluster::run_until(uint64_t t_end_ms) {
    while (!events_.empty()) {
        Event e = events_.top();
        if (e.t > t_end_ms) break;
        events_.pop();
        now_ms_ = e.t;
        handle(e);
    }
    now_ms_ = t_end_ms;
}

std::map<Digest, Cluster::TxTiming> Cluster::tx_timings() const {
    std::map<Digest, TxTiming> out = timings_;
    size_t reference = 0;
    while (reference < nodes_.size() && is_crashed(reference)) ++reference;
    if (reference >= nodes_.size()) return out;
    for (const Block& b : nodes_[reference]->canonical_chain()) {
        for (const Transaction& tx : b.transactions) {
            auto it = out.find(tx.id());
            if (it != out.end()) it->second.confirm_height = b.header.height;
        }
    }
    return out;
}

bool Cluster::heads_equal() const {
    std::optional<Digest> expected;
    for (size_t i = 0; i < nodes_.size(); ++i) {
        if (is_crashed(i)) continue;
        Digest h = nodes_[i]->head_hash();
        if (!expected) expected = h;
        else if (*expected != h) return false;
    }
    return true;
}

bool Cluster::chains_identical() const {
    std::optional<Bytes> expected;
    for (size_t i = 0; i < nodes_.size(); ++i) {
        if (is_crashed(i)) continue;
        Bytes b = nodes_[i]->canonical_chain_bytes();
        if (!expected) expected = std::move(b);
        else if (*expected != b) return false;
    }
    return true;
}

bool Cluster::confirmed_logs_identical() const {
    std::optional<Bytes> expected;
    for (size_t i = 0; i < nodes_.size(); ++i) {
        if (is_crashed(i)) continue;
        Bytes b = nodes_[i]->confirmed_log_bytes();
        if (!expected) expected = std::move(b);
        else if (*expected != b) return false;
    }
    return true;
}

}  // namespace airtrust::chain
