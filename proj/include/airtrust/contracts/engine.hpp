#pragma once

#include <map>
#include <string>

#include <json.hpp>

#include "airtrust/chain/merkle.hpp"
#include "airtrust/chain/node.hpp"

namespace airtrust::contracts {

using chain::Address;
using chain::Digest;

enum class CodeId : uint8_t { Registration = 1, Capability = 2 };

// Key-value storage of one contract account; std::map keeps iteration (and
// therefore the commitment) deterministic.
struct ContractStorage {
    std::map<std::string, std::string> kv;

    Digest root() const;
};

struct ContractAccount {
    Address address{};
    CodeId code_id = CodeId::Registration;
    ContractStorage storage;
};

struct CallContext {
    Address caller{};
    uint64_t height = 0;
};

struct CallResult {
    bool ok = false;
    std::string error;  // machine-readable code: NotOwner, VidTaken, ...
    nlohmann::json value;
    // Writes applied by this call, in application order.
    std::vector<std::pair<std::string, std::string>> delta;
};

// Native deterministic contract modules selected by code_id. Execution
// happens only inside the ledger's ordered command stream, so the engine is
// single-threaded by construction; queries run on const state.
class ContractEngine {
public:
    ContractEngine(std::vector<Address> authorities, std::vector<Address> service_managers)
        : authorities_(std::move(authorities)), service_managers_(std::move(service_managers)) {}

    static Address contract_address(const Address& creator, uint64_t nonce);

    CallResult deploy(const Address& creator, CodeId code_id, uint64_t nonce, uint64_t height);
    CallResult call(const Address& contract, const std::string& function,
                    const nlohmann::json& args, const CallContext& ctx);
    // Read-only; never touches state, UnknownFunction for mutators.
    CallResult query(const Address& contract, const std::string& function,
                     const nlohmann::json& args, uint64_t height) const;

    // Payload codec for carrying calls inside transactions.
    static Bytes encode_deploy(CodeId code_id);
    static Bytes encode_call(const Address& contract, const std::string& function,
                             const nlohmann::json& args);

    // Applies one confirmed transaction; contract failures become error
    // receipts, never exceptions, so every replica agrees.
    CallResult apply_tx(const chain::Transaction& tx, uint64_t height);

    const ContractAccount* find(const Address& address) const;
    std::optional<Address> address_of(CodeId code_id) const;
    Digest storage_root(const Address& address) const;
    std::map<std::string, Digest> storage_roots() const;  // contract hex -> root
    Digest combined_root() const;

private:
    CallResult dispatch(ContractAccount& account, const std::string& function,
                        const nlohmann::json& args, const CallContext& ctx, bool read_only);

    CallResult registration_call(ContractAccount& account, const std::string& function,
                                 const nlohmann::json& args, const CallContext& ctx,
                                 bool read_only);
    CallResult capability_call(ContractAccount& account, const std::string& function,
                               const nlohmann::json& args, const CallContext& ctx,
                               bool read_only);

    bool is_registered_subject(const std::string& address_hex) const;

    std::vector<Address> authorities_;
    std::vector<Address> service_managers_;
    std::map<Address, ContractAccount> accounts_;
    std::map<uint8_t, Address> by_code_;  // first deployment per code id
};

}  // namespace airtrust::contracts
