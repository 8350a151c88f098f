#pragma once

#include <optional>
#include <string>
#include <vector>

#include "airtrust/chain/encoding.hpp"
#include "airtrust/chain/hash.hpp"

namespace airtrust::chain {

struct Transaction {
    Address sender{};
    uint64_t nonce = 0;  // strictly increasing per sender, starts at 1
    Bytes payload;
    Bytes signature;  // over the unsigned canonical encoding

    Bytes encode_unsigned() const;
    Bytes encode() const;
    static Transaction decode(std::span<const uint8_t> data);

    // Transaction id: digest of the full signed encoding.
    Digest id() const;
};

struct SkipEntry {
    Address skipped_proposer{};
    uint64_t waited_ms = 0;
};

struct BlockHeader {
    Digest parent_hash{};  // 32 zero octets at genesis
    uint64_t height = 0;
    Digest merkle_root{};
    uint64_t timestamp_ms = 0;
    Address proposer{};
    // Offline proposers are skipped after a timeout; the certificate lists who
    // was skipped so the slot owner check stays verifiable.
    std::vector<SkipEntry> skip_certificate;
    Bytes proposer_signature;

    Bytes encode_unsigned() const;
    Bytes encode() const;
    static BlockHeader decode(Decoder& dec);

    Digest hash() const;  // digest of the signed encoding
};

struct Block {
    BlockHeader header;
    std::vector<Transaction> transactions;

    Bytes encode() const;
    static Block decode(std::span<const uint8_t> data);
};

enum class NodeRole { Miner, NonMiner };

// Debug rendering exposed next to the canonical binary form.
std::string tx_to_json(const Transaction& tx);
std::string block_to_json(const Block& block);

}  // namespace airtrust::chain
