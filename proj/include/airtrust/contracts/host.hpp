#pragma once

#include <mutex>

#include "airtrust/contracts/engine.hpp"

namespace airtrust::contracts {

// Binds a contract engine to a replica's canonical chain: applies confirmed
// transactions in (height, index) order, rebuilds from genesis after a
// reorg, and keeps the per-height root history the replay audit checks.
class ContractHost {
public:
    explicit ContractHost(chain::ChainNode& node);

    // Catches the engine up with the node's canonical chain.
    void sync();

    uint64_t applied_height();

    // Read-only query against the engine at the current head (after sync).
    CallResult query(const Address& contract, const std::string& function,
                     const nlohmann::json& args);
    CallResult query_at(const Address& contract, const std::string& function,
                        const nlohmann::json& args, uint64_t height);

    std::optional<Address> address_of(CodeId code_id);
    Digest combined_root();
    std::map<uint64_t, Digest> root_history();
    std::map<std::string, Digest> storage_roots();

    // Fresh engine built by replaying the canonical prefix up to `height`.
    ContractEngine replay_to(uint64_t height);

private:
    ContractEngine fresh_engine() const;
    void apply_block(ContractEngine& engine, const chain::Block& block,
                     std::map<uint64_t, Digest>* roots) const;

    chain::ChainNode& node_;
    std::mutex mutex_;
    ContractEngine engine_;
    std::vector<Digest> applied_hashes_;  // genesis first
    std::map<uint64_t, Digest> root_history_;
};

}  // namespace airtrust::contracts
