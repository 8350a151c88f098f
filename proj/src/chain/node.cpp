#include "airtrust/chain/node.hpp"

#include <algorithm>

namespace airtrust::chain {

Account make_account(const std::string& name, bool authority, bool service_manager) {
    Account a;
    a.name = name;
    a.key = secret_from_name(name);
    a.address = address_from_secret(a.key);
    a.authority = authority;
    a.service_manager = service_manager;
    return a;
}

std::vector<Address> GenesisConfig::authorities() const {
    std::vector<Address> out;
    for (const auto& a : accounts)
        if (a.authority) out.push_back(a.address);
    return out;
}

const Account* GenesisConfig::find(const Address& addr) const {
    for (const auto& a : accounts)
        if (a.address == addr) return &a;
    return nullptr;
}

Block GenesisConfig::genesis_block() const {
    Block g;
    g.header.parent_hash = kZeroDigest;
    g.header.height = 0;
    g.header.merkle_root = merkle_root({});
    g.header.timestamp_ms = genesis_time_ms;
    g.header.proposer = Address{};
    return g;
}

const char* to_string(SubmitResult r) {
    switch (r) {
        case SubmitResult::Queued: return "Queued";
        case SubmitResult::BadSignature: return "BadSignature";
        case SubmitResult::UnknownSender: return "UnknownSender";
        case SubmitResult::NonceGap: return "NonceGap";
        case SubmitResult::DuplicateTx: return "DuplicateTx";
    }
    return "?";
}

const char* to_string(RejectReason r) {
    switch (r) {
        case RejectReason::None: return "None";
        case RejectReason::UnknownParent: return "UnknownParent";
        case RejectReason::BadHeight: return "BadHeight";
        case RejectReason::NonMonotoneTime: return "NonMonotoneTime";
        case RejectReason::WrongProposer: return "WrongProposer";
        case RejectReason::BadProposerSignature: return "BadProposerSignature";
        case RejectReason::OverCapacity: return "OverCapacity";
        case RejectReason::BadMerkleRoot: return "BadMerkleRoot";
        case RejectReason::BadTx: return "BadTx";
    }
    return "?";
}

ChainNode::ChainNode(GenesisConfig genesis, Address self, NodeRole role)
    : genesis_(std::move(genesis)),
      authorities_(genesis_.authorities()),
      self_(self),
      role_(role),
      signer_(default_signer()) {
    if (const Account* acct = genesis_.find(self_)) self_key_ = acct->key;
    Block g = genesis_.genesis_block();
    Digest gh = g.header.hash();
    StoredBlock sb;
    sb.block = g;
    sb.hash = gh;
    sb.nonces = std::make_shared<std::map<Address, uint64_t>>();
    blocks_.emplace(gh, std::move(sb));
    head_ = gh;
}

SubmitResult ChainNode::submit_tx(const Transaction& tx) {
    std::lock_guard<std::mutex> lock(mutex_);

    Digest id = tx.id();
    if (mempool_.contains(id) || confirmed_.count(id)) return SubmitResult::DuplicateTx;

    const Account* sender = genesis_.find(tx.sender);
    if (!sender) {
        rejected_[id] = SubmitResult::UnknownSender;
        return SubmitResult::UnknownSender;
    }
    Bytes unsigned_bytes = tx.encode_unsigned();
    if (!signer_.verify(sender->key,
                        std::span<const uint8_t>(unsigned_bytes.data(), unsigned_bytes.size()),
                        tx.signature)) {
        rejected_[id] = SubmitResult::BadSignature;
        return SubmitResult::BadSignature;
    }

    const auto& head_nonces = *blocks_.at(head_).nonces;
    uint64_t confirmed_nonce = 0;
    if (auto it = head_nonces.find(tx.sender); it != head_nonces.end()) confirmed_nonce = it->second;
    uint64_t required = confirmed_nonce + mempool_.pending_for(tx.sender) + 1;
    if (tx.nonce != required) {
        rejected_[id] = SubmitResult::NonceGap;
        return SubmitResult::NonceGap;
    }

    mempool_.add(tx);
    return SubmitResult::Queued;
}

std::variant<Block, ProposeError> ChainNode::propose_block(uint64_t now_ms) {
    std::lock_guard<std::mutex> lock(mutex_);

    auto self_it = std::find(authorities_.begin(), authorities_.end(), self_);
    if (role_ != NodeRole::Miner || self_it == authorities_.end())
        return ProposeError::NotMyTurn;

    const StoredBlock& head_block = blocks_.at(head_);
    uint64_t h = head_block.block.header.height + 1;
    if (last_proposed_height_ >= h && last_proposed_height_ != 0)
        return ProposeError::IntervalNotElapsed;

    size_t n = authorities_.size();
    size_t self_index = static_cast<size_t>(self_it - authorities_.begin());
    // Slot s owner is authorities[(h + s) mod n]; slot s opens after s+1
    // intervals past the parent, which is what skips an offline proposer
    // after its 2x-interval timeout.
    size_t slot = (self_index + n - (h % n)) % n;
    uint64_t interval = genesis_.params.block_interval_ms;
    uint64_t due = head_block.block.header.timestamp_ms + interval * (slot + 1);
    if (now_ms < due)
        return slot == 0 ? ProposeError::IntervalNotElapsed : ProposeError::NotMyTurn;

    Block b;
    b.header.parent_hash = head_;
    b.header.height = h;
    b.header.timestamp_ms = std::max(now_ms, head_block.block.header.timestamp_ms + 1);
    b.header.proposer = self_;
    for (size_t j = 0; j < slot; ++j) {
        SkipEntry e;
        e.skipped_proposer = authorities_[(h + j) % n];
        e.waited_ms = interval * (j + 1);
        b.header.skip_certificate.push_back(e);
    }
    b.transactions = mempool_.first(genesis_.params.block_capacity);
    b.header.merkle_root = merkle_root(b.transactions);
    Bytes unsigned_bytes = b.header.encode_unsigned();
    b.header.proposer_signature = signer_.sign(
        self_key_, std::span<const uint8_t>(unsigned_bytes.data(), unsigned_bytes.size()));

    last_proposed_height_ = h;
    return b;
}

std::optional<Block> ChainNode::tick(uint64_t now_ms) {
    auto result = propose_block(now_ms);
    if (std::holds_alternative<ProposeError>(result)) return std::nullopt;
    Block b = std::get<Block>(result);
    on_block(b);
    return b;
}

ValidationResult ChainNode::validate_block(const Block& block) const {
    std::lock_guard<std::mutex> lock(mutex_);
    return validate_locked(block);
}

ValidationResult ChainNode::validate_locked(const Block& block) const {
    ValidationResult out;

    auto parent_it = blocks_.find(block.header.parent_hash);
    if (parent_it == blocks_.end()) {
        out.reason = RejectReason::UnknownParent;
        return out;
    }
    const Block& parent = parent_it->second.block;

    if (block.header.height != parent.header.height + 1) {
        out.reason = RejectReason::BadHeight;
        return out;
    }
    if (block.header.timestamp_ms <= parent.header.timestamp_ms) {
        out.reason = RejectReason::NonMonotoneTime;
        return out;
    }

    size_t n = authorities_.size();
    size_t skips = block.header.skip_certificate.size();
    if (n == 0 || skips >= n) {
        out.reason = RejectReason::WrongProposer;
        return out;
    }
    Address expected = authorities_[(block.header.height + skips) % n];
    if (block.header.proposer != expected) {
        out.reason = RejectReason::WrongProposer;
        return out;
    }
    for (size_t j = 0; j < skips; ++j) {
        if (block.header.skip_certificate[j].skipped_proposer !=
            authorities_[(block.header.height + j) % n]) {
            out.reason = RejectReason::WrongProposer;
            return out;
        }
    }

    const Account* proposer = genesis_.find(block.header.proposer);
    Bytes unsigned_bytes = block.header.encode_unsigned();
    if (!proposer ||
        !signer_.verify(proposer->key,
                        std::span<const uint8_t>(unsigned_bytes.data(), unsigned_bytes.size()),
                        block.header.proposer_signature)) {
        out.reason = RejectReason::BadProposerSignature;
        return out;
    }

    if (block.transactions.size() > genesis_.params.block_capacity) {
        out.reason = RejectReason::OverCapacity;
        return out;
    }
    if (merkle_root(block.transactions) != block.header.merkle_root) {
        out.reason = RejectReason::BadMerkleRoot;
        return out;
    }

    std::map<Address, uint64_t> nonces = *parent_it->second.nonces;
    for (size_t i = 0; i < block.transactions.size(); ++i) {
        const Transaction& tx = block.transactions[i];
        const Account* sender = genesis_.find(tx.sender);
        Bytes tx_unsigned = tx.encode_unsigned();
        if (!sender ||
            !signer_.verify(sender->key,
                            std::span<const uint8_t>(tx_unsigned.data(), tx_unsigned.size()),
                            tx.signature) ||
            tx.nonce != nonces[tx.sender] + 1) {
            out.reason = RejectReason::BadTx;
            out.bad_tx_index = static_cast<int>(i);
            return out;
        }
        nonces[tx.sender] = tx.nonce;
    }

    out.ok = true;
    return out;
}

ChainNode::Ingest ChainNode::on_block(const Block& block, ValidationResult* verdict) {
    std::unique_lock<std::mutex> lock(mutex_);

    Digest hash = block.header.hash();
    if (blocks_.count(hash)) return Ingest::Duplicate;

    ValidationResult v = validate_locked(block);
    if (verdict) *verdict = v;
    if (!v.ok) {
        if (v.reason == RejectReason::UnknownParent) {
            auto& waiting = orphans_[block.header.parent_hash];
            for (const auto& w : waiting)
                if (w.header.hash() == hash) return Ingest::Duplicate;
            if (waiting.size() < 64) waiting.push_back(block);
            return Ingest::Orphaned;
        }
        return Ingest::Rejected;
    }

    accept_locked(block, hash);
    process_orphans_locked(hash);

    bool notify = head_listener_ != nullptr;
    lock.unlock();
    if (notify) head_listener_();
    return Ingest::Accepted;
}

void ChainNode::accept_locked(const Block& block, const Digest& hash) {
    const StoredBlock& parent = blocks_.at(block.header.parent_hash);
    StoredBlock sb;
    sb.block = block;
    sb.hash = hash;
    auto nonces = std::make_shared<std::map<Address, uint64_t>>(*parent.nonces);
    for (const auto& tx : block.transactions) (*nonces)[tx.sender] = tx.nonce;
    sb.nonces = std::move(nonces);
    blocks_.emplace(hash, std::move(sb));

    // Longest chain wins; equal length resolves to the lower head digest so
    // every node picks the same branch.
    const StoredBlock& current = blocks_.at(head_);
    const StoredBlock& candidate = blocks_.at(hash);
    bool better = candidate.block.header.height > current.block.header.height ||
                  (candidate.block.header.height == current.block.header.height &&
                   candidate.hash < current.hash);
    if (!better) return;

    bool branch_switch = block.header.parent_hash != head_;
    std::vector<Transaction> abandoned;
    if (branch_switch) {
        for (const Digest& h : canonical_hashes_locked()) {
            const Block& b = blocks_.at(h).block;
            abandoned.insert(abandoned.end(), b.transactions.begin(), b.transactions.end());
        }
    }

    head_ = hash;
    recompute_confirmed_locked();

    if (branch_switch) {
        // Transactions from the losing branch go back to the queue when they
        // still continue the confirmed nonce sequence.
        std::sort(abandoned.begin(), abandoned.end(), [](const auto& a, const auto& b) {
            return std::tie(a.sender, a.nonce) < std::tie(b.sender, b.nonce);
        });
        const auto& head_nonces = *blocks_.at(head_).nonces;
        for (const auto& tx : abandoned) {
            Digest id = tx.id();
            if (confirmed_.count(id) || mempool_.contains(id)) continue;
            uint64_t confirmed_nonce = 0;
            if (auto it = head_nonces.find(tx.sender); it != head_nonces.end())
                confirmed_nonce = it->second;
            if (tx.nonce == confirmed_nonce + mempool_.pending_for(tx.sender) + 1)
                mempool_.add(tx);
        }
    }
}

void ChainNode::process_orphans_locked(const Digest& parent) {
    auto it = orphans_.find(parent);
    if (it == orphans_.end()) return;
    std::vector<Block> waiting = std::move(it->second);
    orphans_.erase(it);
    for (const auto& block : waiting) {
        Digest hash = block.header.hash();
        if (blocks_.count(hash)) continue;
        ValidationResult v = validate_locked(block);
        if (v.ok) {
            accept_locked(block, hash);
            process_orphans_locked(hash);
        }
    }
}

void ChainNode::recompute_confirmed_locked() {
    confirmed_.clear();
    std::set<Digest> confirmed_ids;
    for (const Digest& h : canonical_hashes_locked()) {
        const Block& b = blocks_.at(h).block;
        for (uint32_t i = 0; i < b.transactions.size(); ++i) {
            Digest id = b.transactions[i].id();
            confirmed_.emplace(id, std::make_pair(b.header.height, i));
            confirmed_ids.insert(id);
        }
    }
    mempool_.remove_confirmed(confirmed_ids);
}

std::vector<Digest> ChainNode::canonical_hashes_locked() const {
    std::vector<Digest> rev;
    Digest cur = head_;
    while (true) {
        rev.push_back(cur);
        const StoredBlock& sb = blocks_.at(cur);
        if (sb.block.header.height == 0) break;
        cur = sb.block.header.parent_hash;
    }
    std::reverse(rev.begin(), rev.end());
    return rev;
}

TxStatus ChainNode::tx_status(const Digest& txid) const {
    std::lock_guard<std::mutex> lock(mutex_);
    TxStatus st;
    if (auto it = confirmed_.find(txid); it != confirmed_.end()) {
        st.state = TxStatus::State::Confirmed;
        st.height = it->second.first;
        return st;
    }
    if (mempool_.contains(txid)) {
        st.state = TxStatus::State::Pending;
        return st;
    }
    if (auto it = rejected_.find(txid); it != rejected_.end()) {
        st.state = TxStatus::State::Rejected;
        st.reject_reason = it->second;
        return st;
    }
    return st;
}

BlockHeader ChainNode::head() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return blocks_.at(head_).block.header;
}

uint64_t ChainNode::head_height() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return blocks_.at(head_).block.header.height;
}

Digest ChainNode::head_hash() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return head_;
}

std::optional<Block> ChainNode::block_by_height(uint64_t height) const {
    std::lock_guard<std::mutex> lock(mutex_);
    for (const Digest& h : canonical_hashes_locked()) {
        const Block& b = blocks_.at(h).block;
        if (b.header.height == height) return b;
    }
    return std::nullopt;
}

std::optional<Block> ChainNode::block_by_hash(const Digest& hash) const {
    std::lock_guard<std::mutex> lock(mutex_);
    auto it = blocks_.find(hash);
    if (it == blocks_.end()) return std::nullopt;
    return it->second.block;
}

std::vector<Block> ChainNode::canonical_chain() const {
    std::lock_guard<std::mutex> lock(mutex_);
    std::vector<Block> out;
    for (const Digest& h : canonical_hashes_locked()) out.push_back(blocks_.at(h).block);
    return out;
}

Bytes ChainNode::canonical_chain_bytes() const {
    Bytes out;
    for (const Block& b : canonical_chain()) {
        Bytes eb = b.encode();
        out.insert(out.end(), eb.begin(), eb.end());
    }
    return out;
}

Bytes ChainNode::confirmed_log_bytes() const {
    Bytes out;
    for (const Block& b : canonical_chain()) {
        for (const Transaction& tx : b.transactions) {
            Bytes et = tx.encode();
            out.insert(out.end(), et.begin(), et.end());
        }
    }
    return out;
}

std::vector<Digest> ChainNode::confirmed_tx_ids(int min_depth) const {
    std::vector<Block> chain = canonical_chain();
    std::vector<Digest> out;
    if (chain.empty()) return out;
    uint64_t head_h = chain.back().header.height;
    for (const Block& b : chain) {
        if (min_depth > 0 &&
            head_h < b.header.height + static_cast<uint64_t>(min_depth))
            continue;
        for (const Transaction& tx : b.transactions) out.push_back(tx.id());
    }
    return out;
}

size_t ChainNode::mempool_size() const {
    std::lock_guard<std::mutex> lock(mutex_);
    return mempool_.size();
}

}  // namespace airtrust::chain
