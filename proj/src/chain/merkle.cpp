#include "airtrust/chain/merkle.hpp"

namespace airtrust::chain {

namespace {

Digest hash_pair(const Digest& left, const Digest& right) {
    Bytes buf;
    buf.reserve(64);
    buf.insert(buf.end(), left.begin(), left.end());
    buf.insert(buf.end(), right.begin(), right.end());
    return digest256(buf);
}

}  // namespace

Digest tx_leaf(const Transaction& tx) { return digest256(tx.encode()); }

Digest merkle_root_of_leaves(std::vector<Digest> level) {
    if (level.empty()) return digest256(std::string());
    while (level.size() > 1) {
        std::vector<Digest> next;
        next.reserve((level.size() + 1) / 2);
        for (size_t i = 0; i < level.size(); i += 2) {
            const Digest& left = level[i];
            const Digest& right = (i + 1 < level.size()) ? level[i + 1] : level[i];
            next.push_back(hash_pair(left, right));
        }
        level = std::move(next);
    }
    return level[0];
}

Digest merkle_root(const std::vector<Transaction>& txs) {
    std::vector<Digest> leaves;
    leaves.reserve(txs.size());
    for (const auto& tx : txs) leaves.push_back(tx_leaf(tx));
    return merkle_root_of_leaves(std::move(leaves));
}

MerkleProof merkle_proof(const std::vector<Transaction>& txs, size_t index) {
    if (index >= txs.size()) throw IndexOutOfRange("index " + std::to_string(index));

    MerkleProof proof;
    proof.index = index;

    std::vector<Digest> level;
    level.reserve(txs.size());
    for (const auto& tx : txs) level.push_back(tx_leaf(tx));

    size_t pos = index;
    while (level.size() > 1) {
        size_t sibling = (pos % 2 == 0) ? pos + 1 : pos - 1;
        if (sibling >= level.size()) sibling = pos;  // self-paired odd node
        proof.siblings.push_back(level[sibling]);

        std::vector<Digest> next;
        next.reserve((level.size() + 1) / 2);
        for (size_t i = 0; i < level.size(); i += 2) {
            const Digest& left = level[i];
            const Digest& right = (i + 1 < level.size()) ? level[i + 1] : level[i];
            next.push_back(hash_pair(left, right));
        }
        level = std::move(next);
        pos /= 2;
    }
    return proof;
}

bool verify_proof(const Digest& root, const Digest& leaf, const MerkleProof& proof) {
    Digest node = leaf;
    size_t pos = proof.index;
    for (const Digest& sibling : proof.siblings) {
        node = (pos % 2 == 0) ? hash_pair(node, sibling) : hash_pair(sibling, node);
        pos /= 2;
    }
    return node == root;
}

}  // namespace airtrust::chain
