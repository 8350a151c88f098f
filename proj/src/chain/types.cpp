#include "airtrust/chain/types.hpp"

#include <json.hpp>

namespace airtrust::chain {

Bytes Transaction::encode_unsigned() const {
    Encoder enc;
    enc.put_fixed(sender);
    enc.put_u64(nonce);
    enc.put_bytes(payload);
    return enc.take();
}

Bytes Transaction::encode() const {
    Encoder enc;
    enc.put_fixed(sender);
    enc.put_u64(nonce);
    enc.put_bytes(payload);
    enc.put_bytes(signature);
    return enc.take();
}

Transaction Transaction::decode(std::span<const uint8_t> data) {
    Decoder dec(data);
    Transaction tx;
    tx.sender = dec.get_fixed<20>();
    tx.nonce = dec.get_u64();
    tx.payload = dec.get_bytes();
    tx.signature = dec.get_bytes();
    return tx;
}

Digest Transaction::id() const { return digest256(encode()); }

Bytes BlockHeader::encode_unsigned() const {
    Encoder enc;
    enc.put_fixed(parent_hash);
    enc.put_u64(height);
    enc.put_fixed(merkle_root);
    enc.put_u64(timestamp_ms);
    enc.put_fixed(proposer);
    enc.put_u32(static_cast<uint32_t>(skip_certificate.size()));
    for (const auto& s : skip_certificate) {
        enc.put_fixed(s.skipped_proposer);
        enc.put_u64(s.waited_ms);
    }
    return enc.take();
}

Bytes BlockHeader::encode() const {
    Bytes out = encode_unsigned();
    Encoder enc;
    enc.put_bytes(proposer_signature);
    Bytes sig = enc.take();
    out.insert(out.end(), sig.begin(), sig.end());
    return out;
}

BlockHeader BlockHeader::decode(Decoder& dec) {
    BlockHeader h;
    h.parent_hash = dec.get_fixed<32>();
    h.height = dec.get_u64();
    h.merkle_root = dec.get_fixed<32>();
    h.timestamp_ms = dec.get_u64();
    h.proposer = dec.get_fixed<20>();
    uint32_t skips = dec.get_u32();
    for (uint32_t i = 0; i < skips; ++i) {
        SkipEntry s;
        s.skipped_proposer = dec.get_fixed<20>();
        s.waited_ms = dec.get_u64();
        h.skip_certificate.push_back(s);
    }
    h.proposer_signature = dec.get_bytes();
    return h;
}

Digest BlockHeader::hash() const { return digest256(encode()); }

Bytes Block::encode() const {
    Encoder enc;
    Bytes header_bytes = header.encode();
    enc.put_bytes(header_bytes);
    enc.put_u32(static_cast<uint32_t>(transactions.size()));
    for (const auto& tx : transactions) enc.put_bytes(tx.encode());
    return enc.take();
}

Block Block::decode(std::span<const uint8_t> data) {
    Decoder dec(data);
    Block b;
    Bytes header_bytes = dec.get_bytes();
    Decoder hdec(std::span<const uint8_t>(header_bytes.data(), header_bytes.size()));
    b.header = BlockHeader::decode(hdec);
    uint32_t n = dec.get_u32();
    for (uint32_t i = 0; i < n; ++i) {
        Bytes tx_bytes = dec.get_bytes();
        b.transactions.push_back(
            Transaction::decode(std::span<const uint8_t>(tx_bytes.data(), tx_bytes.size())));
    }
    return b;
}

std::string tx_to_json(const Transaction& tx) {
    nlohmann::json j;
    j["sender"] = hex(tx.sender);
    j["nonce"] = tx.nonce;
    j["payload"] = to_hex(tx.payload);
    j["signature"] = to_hex(tx.signature);
    j["id"] = hex(tx.id());
    return j.dump();
}

std::string block_to_json(const Block& block) {
    nlohmann::json j;
    j["hash"] = hex(block.header.hash());
    j["parent_hash"] = hex(block.header.parent_hash);
    j["height"] = block.header.height;
    j["merkle_root"] = hex(block.header.merkle_root);
    j["timestamp_ms"] = block.header.timestamp_ms;
    j["proposer"] = hex(block.header.proposer);
    j["skips"] = block.header.skip_certificate.size();
    auto txs = nlohmann::json::array();
    for (const auto& tx : block.transactions) txs.push_back(nlohmann::json::parse(tx_to_json(tx)));
    j["transactions"] = txs;
    return j.dump();
}

}  // namespace airtrust::chain
