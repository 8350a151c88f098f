#pragma once

#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <variant>

#include "airtrust/chain/mempool.hpp"
#include "airtrust/chain/merkle.hpp"
#include "airtrust/chain/signer.hpp"
#include "airtrust/chain/types.hpp"

namespace airtrust::chain {

struct ChainParams {
    uint64_t block_interval_ms = 500;
    size_t block_capacity = 128;
    int liveness_bound = 3;   // blocks until a queued tx must confirm
    int finality_depth = 2;   // descendants after which a tx never reorgs out
};

struct Account {
    std::string name;
    Address address{};
    Bytes key;  // verification key; doubles as the harness signing secret
    bool authority = false;
    bool service_manager = false;
};

Account make_account(const std::string& name, bool authority = false,
                     bool service_manager = false);

struct GenesisConfig {
    std::vector<Account> accounts;
    ChainParams params;
    uint64_t genesis_time_ms = 0;

    std::vector<Address> authorities() const;
    const Account* find(const Address& addr) const;
    Block genesis_block() const;
};

enum class SubmitResult { Queued, BadSignature, UnknownSender, NonceGap, DuplicateTx };
const char* to_string(SubmitResult r);

enum class RejectReason {
    None,
    UnknownParent,
    BadHeight,
    NonMonotoneTime,
    WrongProposer,
    BadProposerSignature,
    OverCapacity,
    BadMerkleRoot,
    BadTx,
};
const char* to_string(RejectReason r);

struct ValidationResult {
    bool ok = false;
    RejectReason reason = RejectReason::None;
    int bad_tx_index = -1;
};

enum class ProposeError { NotMyTurn, IntervalNotElapsed };

struct TxStatus {
    enum class State { Pending, Confirmed, Rejected, Unknown } state = State::Unknown;
    uint64_t height = 0;          // confirmed only
    SubmitResult reject_reason = SubmitResult::Queued;
};

// One replica: block store with longest-chain fork choice (ties break to the
// lexicographically lower head digest), round-robin proof-of-authority
// proposing with skip certificates, and mempool admission. All mutations are
// serialized behind one mutex; readers get copies.
class ChainNode {
public:
    ChainNode(GenesisConfig genesis, Address self, NodeRole role);

    SubmitResult submit_tx(const Transaction& tx);

    // Proposes when this node owns the current slot and its deadline passed.
    std::variant<Block, ProposeError> propose_block(uint64_t now_ms);

    // propose_block + self-accept; nullopt when not due.
    std::optional<Block> tick(uint64_t now_ms);

    ValidationResult validate_block(const Block& block) const;

    enum class Ingest { Accepted, Duplicate, Orphaned, Rejected };
    Ingest on_block(const Block& block, ValidationResult* verdict = nullptr);

    TxStatus tx_status(const Digest& txid) const;

    BlockHeader head() const;
    uint64_t head_height() const;
    Digest head_hash() const;
    std::optional<Block> block_by_height(uint64_t height) const;
    std::optional<Block> block_by_hash(const Digest& hash) const;
    std::vector<Block> canonical_chain() const;

    Bytes canonical_chain_bytes() const;
    Bytes confirmed_log_bytes() const;
    // Confirmed tx ids in (height, index) order, trimmed to entries with at
    // least `min_depth` descendant blocks.
    std::vector<Digest> confirmed_tx_ids(int min_depth = 0) const;

    size_t mempool_size() const;
    const GenesisConfig& genesis() const { return genesis_; }
    Address self() const { return self_; }
    NodeRole role() const { return role_; }

    // Invoked with the canonical chain after every head change.
    void set_head_listener(std::function<void()> fn) { head_listener_ = std::move(fn); }

private:
    struct StoredBlock {
        Block block;
        Digest hash{};
        // Cumulative per-sender confirmed nonces up to and including this block.
        std::shared_ptr<std::map<Address, uint64_t>> nonces;
    };

    ValidationResult validate_locked(const Block& block) const;
    void accept_locked(const Block& block, const Digest& hash);
    void recompute_confirmed_locked();
    void process_orphans_locked(const Digest& parent);
    std::vector<Digest> canonical_hashes_locked() const;

    GenesisConfig genesis_;
    std::vector<Address> authorities_;
    Address self_{};
    NodeRole role_;
    const Signer& signer_;
    Bytes self_key_;

    mutable std::mutex mutex_;
    std::map<Digest, StoredBlock> blocks_;
    std::map<Digest, std::vector<Block>> orphans_;  // parent hash -> waiting blocks
    Digest head_{};
    uint64_t last_proposed_height_ = 0;

    Mempool mempool_;
    std::map<Digest, std::pair<uint64_t, uint32_t>> confirmed_;  // txid -> (height, index)
    std::map<Digest, SubmitResult> rejected_;
    std::function<void()> head_listener_;
};

}  // namespace airtrust::chain
