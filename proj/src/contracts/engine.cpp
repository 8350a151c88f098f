#include "airtrust/contracts/engine.hpp"

#include <algorithm>
#include <sstream>

namespace airtrust::contracts {

using nlohmann::json;

namespace {

constexpr const char* kActions[] = {"read", "write", "execute"};

bool valid_action(const std::string& a) {
    return std::find(std::begin(kActions), std::end(kActions), a) != std::end(kActions);
}

// Slash-delimited pattern; '*' matches exactly one segment.
bool pattern_matches(const std::string& pattern, const std::string& path) {
    std::vector<std::string> p, q;
    std::stringstream ps(pattern), qs(path);
    std::string seg;
    while (std::getline(ps, seg, '/')) p.push_back(seg);
    while (std::getline(qs, seg, '/')) q.push_back(seg);
    if (p.size() != q.size()) return false;
    for (size_t i = 0; i < p.size(); ++i)
        if (p[i] != "*" && p[i] != q[i]) return false;
    return true;
}

CallResult fail(const std::string& code) {
    CallResult r;
    r.error = code;
    return r;
}

CallResult success(json value = {}) {
    CallResult r;
    r.ok = true;
    r.value = std::move(value);
    return r;
}

struct TokenRecord {
    std::string issuer;
    std::string subject;
    std::string resource;
    std::vector<std::string> actions;
    uint64_t issued_at = 0;
    uint64_t expires_at = 0;
    int depth = 0;
    std::string parent;  // empty for a root token
    bool revoked = false;
    uint64_t seq = 0;

    static TokenRecord from_json(const json& j) {
        TokenRecord t;
        t.issuer = j.at("issuer").get<std::string>();
        t.subject = j.at("subject").get<std::string>();
        t.resource = j.at("resource").get<std::string>();
        t.actions = j.at("actions").get<std::vector<std::string>>();
        t.issued_at = j.at("issued_at").get<uint64_t>();
        t.expires_at = j.at("expires_at").get<uint64_t>();
        t.depth = j.at("depth").get<int>();
        t.parent = j.at("parent").get<std::string>();
        t.revoked = j.at("revoked").get<bool>();
        t.seq = j.at("seq").get<uint64_t>();
        return t;
    }

    json to_json() const {
        json j;
        j["issuer"] = issuer;
        j["subject"] = subject;
        j["resource"] = resource;
        j["actions"] = actions;
        j["issued_at"] = issued_at;
        j["expires_at"] = expires_at;
        j["depth"] = depth;
        j["parent"] = parent;
        j["revoked"] = revoked;
        j["seq"] = seq;
        return j;
    }

    std::string id_hex() const {
        std::string canonical = "cap:" + issuer + "|" + subject + "|" + resource + "|";
        for (const auto& a : actions) canonical += a + ",";
        canonical += "|" + std::to_string(issued_at) + "|" + std::to_string(expires_at) + "|" +
                     std::to_string(depth) + "|" + parent + "|" + std::to_string(seq);
        return chain::hex(chain::digest256(canonical));
    }
};

std::optional<TokenRecord> load_token(const ContractStorage& st, const std::string& id_hex) {
    auto it = st.kv.find("tok/" + id_hex);
    if (it == st.kv.end()) return std::nullopt;
    return TokenRecord::from_json(json::parse(it->second));
}

bool revoked_transitively(const ContractStorage& st, const TokenRecord& t) {
    if (t.revoked) return true;
    std::string parent = t.parent;
    int guard = 0;
    while (!parent.empty() && guard++ < 64) {
        auto p = load_token(st, parent);
        if (!p) return true;  // dangling ancestry denies
        if (p->revoked) return true;
        parent = p->parent;
    }
    return false;
}

}  // namespace

Digest ContractStorage::root() const {
    std::vector<Digest> leaves;
    leaves.reserve(kv.size());
    for (const auto& [k, v] : kv) {
        chain::Encoder enc;
        enc.put_string(k);
        enc.put_string(v);
        leaves.push_back(chain::digest256(enc.bytes()));
    }
    return chain::merkle_root_of_leaves(std::move(leaves));
}

Address ContractEngine::contract_address(const Address& creator, uint64_t nonce) {
    chain::Encoder enc;
    enc.put_fixed(creator);
    enc.put_u64(nonce);
    return chain::truncate20(chain::digest256(enc.bytes()));
}

CallResult ContractEngine::deploy(const Address& creator, CodeId code_id, uint64_t nonce,
                                  uint64_t height) {
    bool authorized =
        std::find(authorities_.begin(), authorities_.end(), creator) != authorities_.end() ||
        std::find(service_managers_.begin(), service_managers_.end(), creator) !=
            service_managers_.end();
    if (!authorized) return fail("Unauthorized");

    Address addr = contract_address(creator, nonce);
    if (accounts_.count(addr)) return fail("AddressCollision");

    ContractAccount account;
    account.address = addr;
    account.code_id = code_id;
    account.storage.kv["deployer"] = chain::hex(creator);
    account.storage.kv["deployed_at"] = std::to_string(height);
    accounts_.emplace(addr, std::move(account));
    if (!by_code_.count(static_cast<uint8_t>(code_id)))
        by_code_[static_cast<uint8_t>(code_id)] = addr;

    json v;
    v["address"] = chain::hex(addr);
    return success(v);
}

const ContractAccount* ContractEngine::find(const Address& address) const {
    auto it = accounts_.find(address);
    return it == accounts_.end() ? nullptr : &it->second;
}

std::optional<Address> ContractEngine::address_of(CodeId code_id) const {
    auto it = by_code_.find(static_cast<uint8_t>(code_id));
    if (it == by_code_.end()) return std::nullopt;
    return it->second;
}

Digest ContractEngine::storage_root(const Address& address) const {
    auto it = accounts_.find(address);
    if (it == accounts_.end()) return chain::kZeroDigest;
    return it->second.storage.root();
}

std::map<std::string, Digest> ContractEngine::storage_roots() const {
    std::map<std::string, Digest> out;
    for (const auto& [addr, account] : accounts_) out[chain::hex(addr)] = account.storage.root();
    return out;
}

Digest ContractEngine::combined_root() const {
    std::vector<Digest> leaves;
    for (const auto& [addr, account] : accounts_) {
        chain::Encoder enc;
        enc.put_fixed(addr);
        enc.put_fixed(account.storage.root());
        leaves.push_back(chain::digest256(enc.bytes()));
    }
    return chain::merkle_root_of_leaves(std::move(leaves));
}

CallResult ContractEngine::call(const Address& contract, const std::string& function,
                                const nlohmann::json& args, const CallContext& ctx) {
    auto it = accounts_.find(contract);
    if (it == accounts_.end()) return fail("UnknownContract");
    return dispatch(it->second, function, args, ctx, /*read_only=*/false);
}

CallResult ContractEngine::query(const Address& contract, const std::string& function,
                                 const nlohmann::json& args, uint64_t height) const {
    auto it = accounts_.find(contract);
    if (it == accounts_.end()) return fail("UnknownContract");
    CallContext ctx;
    ctx.height = height;
    // Queries run on const state; the dispatcher rejects mutators in
    // read-only mode before any write could happen.
    auto& self = const_cast<ContractEngine&>(*this);
    auto& account = const_cast<ContractAccount&>(it->second);
    return self.dispatch(account, function, args, ctx, /*read_only=*/true);
}

CallResult ContractEngine::dispatch(ContractAccount& account, const std::string& function,
                                    const nlohmann::json& args, const CallContext& ctx,
                                    bool read_only) {
    switch (account.code_id) {
        case CodeId::Registration:
            return registration_call(account, function, args, ctx, read_only);
        case CodeId::Capability:
            return capability_call(account, function, args, ctx, read_only);
    }
    return fail("UnknownFunction");
}

bool ContractEngine::is_registered_subject(const std::string& address_hex) const {
    auto reg = address_of(CodeId::Registration);
    if (!reg) return false;
    const ContractAccount* account = find(*reg);
    return account && account->storage.kv.count("adr/" + address_hex) > 0;
}

CallResult ContractEngine::registration_call(ContractAccount& account,
                                             const std::string& function,
                                             const nlohmann::json& args, const CallContext&,
                                             bool read_only) {
    auto& kv = account.storage.kv;

    if (function == "register") {
        if (read_only) return fail("UnknownFunction");
        if (!args.contains("vid") || !args.contains("address")) return fail("ArgumentError");
        std::string vid = args.at("vid").get<std::string>();
        std::string addr = args.at("address").get<std::string>();
        if (vid.empty() || vid.size() > 64) return fail("ArgumentError");
        if (addr.size() != 40) return fail("ArgumentError");
        if (kv.count("vid/" + vid)) return fail("VidTaken");
        if (kv.count("adr/" + addr)) return fail("AddressTaken");

        CallResult r = success();
        kv["vid/" + vid] = addr;
        kv["adr/" + addr] = vid;
        r.delta.push_back({"vid/" + vid, addr});
        r.delta.push_back({"adr/" + addr, vid});
        return r;
    }

    if (function == "authenticate") {
        if (!args.contains("vid") || !args.contains("address")) return fail("ArgumentError");
        auto it = kv.find("vid/" + args.at("vid").get<std::string>());
        bool ok = it != kv.end() && it->second == args.at("address").get<std::string>();
        json v;
        v["authenticated"] = ok;
        return success(v);
    }

    if (function == "lookup") {
        if (!args.contains("vid")) return fail("ArgumentError");
        auto it = kv.find("vid/" + args.at("vid").get<std::string>());
        json v;
        v["registered"] = it != kv.end();
        if (it != kv.end()) v["address"] = it->second;
        return success(v);
    }

    return fail("UnknownFunction");
}

CallResult ContractEngine::capability_call(ContractAccount& account, const std::string& function,
                                           const nlohmann::json& args, const CallContext& ctx,
                                           bool read_only) {
    auto& kv = account.storage.kv;
    std::string caller_hex = chain::hex(ctx.caller);

    auto store_token = [&](const TokenRecord& t, CallResult& r) {
        std::string key = "tok/" + t.id_hex();
        std::string value = t.to_json().dump();
        kv[key] = value;
        r.delta.push_back({key, value});
    };

    if (function == "set_owner") {
        if (read_only) return fail("UnknownFunction");
        bool manager = std::find(service_managers_.begin(), service_managers_.end(),
                                 ctx.caller) != service_managers_.end();
        if (!manager && kv.count("deployer") && kv.at("deployer") != caller_hex)
            return fail("Unauthorized");
        if (!args.contains("resource") || !args.contains("owner")) return fail("ArgumentError");
        std::string resource = args.at("resource").get<std::string>();
        std::string owner = args.at("owner").get<std::string>();
        CallResult r = success();
        kv["own/" + resource] = owner;
        r.delta.push_back({"own/" + resource, owner});
        return r;
    }

    if (function == "issue") {
        if (read_only) return fail("UnknownFunction");
        for (const char* k : {"subject", "resource", "actions", "ttl_blocks", "delegation_depth"})
            if (!args.contains(k)) return fail("ArgumentError");

        std::string resource = args.at("resource").get<std::string>();
        auto owner = kv.find("own/" + resource);
        if (owner == kv.end() || owner->second != caller_hex) return fail("NotOwner");

        std::string subject = args.at("subject").get<std::string>();
        if (!is_registered_subject(subject)) return fail("UnknownSubject");

        uint64_t ttl = args.at("ttl_blocks").get<uint64_t>();
        if (ttl == 0) return fail("BadTtl");

        TokenRecord t;
        t.issuer = caller_hex;
        t.subject = subject;
        t.resource = resource;
        t.actions = args.at("actions").get<std::vector<std::string>>();
        std::sort(t.actions.begin(), t.actions.end());
        t.actions.erase(std::unique(t.actions.begin(), t.actions.end()), t.actions.end());
        if (t.actions.empty()) return fail("ArgumentError");
        for (const auto& a : t.actions)
            if (!valid_action(a)) return fail("ArgumentError");
        t.issued_at = ctx.height;
        t.expires_at = ctx.height + ttl;
        t.depth = args.at("delegation_depth").get<int>();
        if (t.depth < 0) return fail("ArgumentError");
        t.seq = kv.count("seq") ? std::stoull(kv.at("seq")) + 1 : 1;

        CallResult r = success();
        kv["seq"] = std::to_string(t.seq);
        r.delta.push_back({"seq", kv["seq"]});
        store_token(t, r);
        r.value["token_id"] = t.id_hex();
        r.value["expires_at"] = t.expires_at;
        return r;
    }

    if (function == "delegate") {
        if (read_only) return fail("UnknownFunction");
        for (const char* k : {"parent_token", "new_subject", "actions", "ttl_blocks"})
            if (!args.contains(k)) return fail("ArgumentError");

        auto parent = load_token(account.storage, args.at("parent_token").get<std::string>());
        if (!parent) return fail("UnknownToken");
        if (parent->subject != caller_hex) return fail("NotSubject");
        if (revoked_transitively(account.storage, *parent)) return fail("ParentRevoked");
        if (ctx.height >= parent->expires_at) return fail("ParentExpired");
        if (parent->depth < 1) return fail("DepthExhausted");

        std::string subject = args.at("new_subject").get<std::string>();
        if (!is_registered_subject(subject)) return fail("UnknownSubject");

        auto actions = args.at("actions").get<std::vector<std::string>>();
        std::sort(actions.begin(), actions.end());
        actions.erase(std::unique(actions.begin(), actions.end()), actions.end());
        if (actions.empty()) return fail("ArgumentError");
        for (const auto& a : actions) {
            if (!valid_action(a)) return fail("ArgumentError");
            if (std::find(parent->actions.begin(), parent->actions.end(), a) ==
                parent->actions.end())
                return fail("SupersetActions");
        }

        uint64_t ttl = args.at("ttl_blocks").get<uint64_t>();
        if (ttl == 0) return fail("BadTtl");

        TokenRecord t;
        t.issuer = caller_hex;
        t.subject = subject;
        t.resource = parent->resource;
        t.actions = actions;
        t.issued_at = ctx.height;
        t.expires_at = std::min(parent->expires_at, ctx.height + ttl);
        t.depth = parent->depth - 1;
        t.parent = args.at("parent_token").get<std::string>();
        t.seq = kv.count("seq") ? std::stoull(kv.at("seq")) + 1 : 1;

        CallResult r = success();
        kv["seq"] = std::to_string(t.seq);
        r.delta.push_back({"seq", kv["seq"]});
        store_token(t, r);
        r.value["token_id"] = t.id_hex();
        r.value["expires_at"] = t.expires_at;
        r.value["depth"] = t.depth;
        return r;
    }

    if (function == "revoke") {
        if (read_only) return fail("UnknownFunction");
        if (!args.contains("token_id")) return fail("ArgumentError");
        std::string id = args.at("token_id").get<std::string>();
        auto token = load_token(account.storage, id);
        if (!token) return fail("UnknownToken");

        // Issuer of the token or of any ancestor may revoke.
        bool allowed = token->issuer == caller_hex;
        std::string parent = token->parent;
        int guard = 0;
        while (!allowed && !parent.empty() && guard++ < 64) {
            auto p = load_token(account.storage, parent);
            if (!p) break;
            if (p->issuer == caller_hex) allowed = true;
            parent = p->parent;
        }
        if (!allowed) return fail("NotRevocable");

        token->revoked = true;
        CallResult r = success();
        store_token(*token, r);
        return r;
    }

    if (function == "verify") {
        for (const char* k : {"subject", "resource", "action"})
            if (!args.contains(k)) return fail("ArgumentError");
        std::string subject = args.at("subject").get<std::string>();
        std::string resource = args.at("resource").get<std::string>();
        std::string action = args.at("action").get<std::string>();
        uint64_t h = ctx.height;

        std::optional<TokenRecord> best;
        bool any_match = false, any_expired = false;
        for (const auto& [key, value] : kv) {
            if (key.rfind("tok/", 0) != 0) continue;
            TokenRecord t = TokenRecord::from_json(json::parse(value));
            if (t.subject != subject) continue;
            if (std::find(t.actions.begin(), t.actions.end(), action) == t.actions.end())
                continue;
            if (!pattern_matches(t.resource, resource)) continue;
            any_match = true;
            if (revoked_transitively(account.storage, t)) continue;
            if (h >= t.expires_at) {  // expiry boundary is exclusive
                any_expired = true;
                continue;
            }
            // Newest issued_at wins; ties break to the smaller token id.
            if (!best || t.issued_at > best->issued_at ||
                (t.issued_at == best->issued_at && t.id_hex() < best->id_hex()))
                best = t;
        }

        json v;
        if (best) {
            v["granted"] = true;
            v["token_id"] = best->id_hex();
        } else {
            v["granted"] = false;
            v["reason"] = !any_match ? "NoToken" : (any_expired ? "Expired" : "Revoked");
        }
        return success(v);
    }

    if (function == "get_token") {
        if (!args.contains("token_id")) return fail("ArgumentError");
        auto token = load_token(account.storage, args.at("token_id").get<std::string>());
        if (!token) return fail("UnknownToken");
        return success(token->to_json());
    }

    return fail("UnknownFunction");
}

Bytes ContractEngine::encode_deploy(CodeId code_id) {
    chain::Encoder enc;
    enc.put_u8(0x01);
    enc.put_u8(static_cast<uint8_t>(code_id));
    return enc.take();
}

Bytes ContractEngine::encode_call(const Address& contract, const std::string& function,
                                  const nlohmann::json& args) {
    chain::Encoder enc;
    enc.put_u8(0x02);
    enc.put_fixed(contract);
    enc.put_string(function);
    enc.put_string(args.dump());
    return enc.take();
}

CallResult ContractEngine::apply_tx(const chain::Transaction& tx, uint64_t height) {
    try {
        chain::Decoder dec(std::span<const uint8_t>(tx.payload.data(), tx.payload.size()));
        uint8_t tag = dec.get_u8();
        if (tag == 0x01) {
            auto code = static_cast<CodeId>(dec.get_u8());
            if (code != CodeId::Registration && code != CodeId::Capability)
                return fail("UnknownCode");
            return deploy(tx.sender, code, tx.nonce, height);
        }
        if (tag == 0x02) {
            Address contract = dec.get_fixed<20>();
            std::string function = dec.get_string();
            json args = json::parse(dec.get_string());
            CallContext ctx;
            ctx.caller = tx.sender;
            ctx.height = height;
            return call(contract, function, args, ctx);
        }
        return fail("UnknownPayload");
    } catch (const std::exception&) {
        return fail("MalformedPayload");
    }
}

}  // namespace airtrust::contracts
