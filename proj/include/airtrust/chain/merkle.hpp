#pragma once

#include <vector>

#include "airtrust/chain/types.hpp"

namespace airtrust::chain {

struct IndexOutOfRange : std::runtime_error {
    explicit IndexOutOfRange(const std::string& what) : std::runtime_error(what) {}
};

// Bottom-up binary tree over hash(canonical tx encoding). An odd node at a
// level pairs with itself. Empty list -> hash(""); a single-leaf tree's root
// is the leaf hash itself.
Digest merkle_root(const std::vector<Transaction>& txs);
Digest merkle_root_of_leaves(std::vector<Digest> level);

Digest tx_leaf(const Transaction& tx);

struct MerkleProof {
    size_t index = 0;               // leaf position, fixes sibling sides
    std::vector<Digest> siblings;   // bottom-up
};

MerkleProof merkle_proof(const std::vector<Transaction>& txs, size_t index);
bool verify_proof(const Digest& root, const Digest& leaf, const MerkleProof& proof);

}  // namespace airtrust::chain
