#include "airtrust/contracts/host.hpp"

namespace airtrust::contracts {

namespace {

std::vector<chain::Address> managers_of(const chain::GenesisConfig& genesis) {
    std::vector<chain::Address> out;
    for (const auto& a : genesis.accounts)
        if (a.service_manager) out.push_back(a.address);
    return out;
}

}  // namespace

ContractHost::ContractHost(chain::ChainNode& node)
    : node_(node), engine_(node.genesis().authorities(), managers_of(node.genesis())) {
    sync();
}

ContractEngine ContractHost::fresh_engine() const {
    return ContractEngine(node_.genesis().authorities(), managers_of(node_.genesis()));
}

void ContractHost::apply_block(ContractEngine& engine, const chain::Block& block,
                               std::map<uint64_t, Digest>* roots) const {
    for (const auto& tx : block.transactions) engine.apply_tx(tx, block.header.height);
    if (roots) (*roots)[block.header.height] = engine.combined_root();
}

void ContractHost::sync() {
    std::lock_guard<std::mutex> lock(mutex_);
    std::vector<chain::Block> canonical = node_.canonical_chain();

    bool extension = canonical.size() >= applied_hashes_.size();
    if (extension) {
        for (size_t i = 0; i < applied_hashes_.size(); ++i) {
            if (canonical[i].header.hash() != applied_hashes_[i]) {
                extension = false;
                break;
            }
        }
    }

    if (!extension) {
        engine_ = fresh_engine();
        root_history_.clear();
        applied_hashes_.clear();
    }

    for (size_t i = applied_hashes_.size(); i < canonical.size(); ++i) {
        apply_block(engine_, canonical[i], &root_history_);
        applied_hashes_.push_back(canonical[i].header.hash());
    }
}

uint64_t ContractHost::applied_height() {
    sync();
    std::lock_guard<std::mutex> lock(mutex_);
    return applied_hashes_.empty() ? 0 : applied_hashes_.size() - 1;
}

CallResult ContractHost::query(const Address& contract, const std::string& function,
                               const nlohmann::json& args) {
    sync();
    std::lock_guard<std::mutex> lock(mutex_);
    uint64_t height = applied_hashes_.empty() ? 0 : applied_hashes_.size() - 1;
    return engine_.query(contract, function, args, height);
}

CallResult ContractHost::query_at(const Address& contract, const std::string& function,
                                  const nlohmann::json& args, uint64_t height) {
    sync();
    {
        std::lock_guard<std::mutex> lock(mutex_);
        uint64_t head_height = applied_hashes_.empty() ? 0 : applied_hashes_.size() - 1;
        if (height >= head_height) return engine_.query(contract, function, args, head_height);
    }
    ContractEngine past = replay_to(height);
    return past.query(contract, function, args, height);
}

std::optional<Address> ContractHost::address_of(CodeId code_id) {
    sync();
    std::lock_guard<std::mutex> lock(mutex_);
    return engine_.address_of(code_id);
}

Digest ContractHost::combined_root() {
    sync();
    std::lock_guard<std::mutex> lock(mutex_);
    return engine_.combined_root();
}

std::map<uint64_t, Digest> ContractHost::root_history() {
    sync();
    std::lock_guard<std::mutex> lock(mutex_);
    return root_history_;
}

std::map<std::string, Digest> ContractHost::storage_roots() {
    sync();
    std::lock_guard<std::mutex> lock(mutex_);
    return engine_.storage_roots();
}

ContractEngine ContractHost::replay_to(uint64_t height) {
    ContractEngine engine = fresh_engine();
    for (const auto& block : node_.canonical_chain()) {
        if (block.header.height > height) break;
        apply_block(engine, block, nullptr);
    }
    return engine;
}

}  // namespace airtrust::contracts
