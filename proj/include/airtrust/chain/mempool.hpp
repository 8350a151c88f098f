#pragma once

#include <map>
#include <set>
#include <tuple>
#include <vector>

#include "airtrust/chain/types.hpp"

namespace airtrust::chain {

// Pending transactions ordered by (sender, nonce) then arrival. Admission
// rules live on the node; this is just the ordered store.
class Mempool {
public:
    bool contains(const Digest& id) const { return ids_.count(id) > 0; }

    size_t pending_for(const Address& sender) const {
        auto it = pending_count_.find(sender);
        return it == pending_count_.end() ? 0 : it->second;
    }

    void add(const Transaction& tx) {
        Digest id = tx.id();
        entries_.emplace(Key{tx.sender, tx.nonce, next_seq_++}, tx);
        ids_.insert(id);
        pending_count_[tx.sender]++;
    }

    std::vector<Transaction> first(size_t n) const {
        std::vector<Transaction> out;
        for (const auto& [key, tx] : entries_) {
            if (out.size() >= n) break;
            out.push_back(tx);
        }
        return out;
    }

    void remove_confirmed(const std::set<Digest>& confirmed) {
        for (auto it = entries_.begin(); it != entries_.end();) {
            Digest id = it->second.id();
            if (confirmed.count(id)) {
                ids_.erase(id);
                auto pc = pending_count_.find(it->second.sender);
                if (pc != pending_count_.end() && --pc->second == 0) pending_count_.erase(pc);
                it = entries_.erase(it);
            } else {
                ++it;
            }
        }
    }

    size_t size() const { return entries_.size(); }
    bool empty() const { return entries_.empty(); }

private:
    using Key = std::tuple<Address, uint64_t, uint64_t>;
    std::map<Key, Transaction> entries_;
    std::set<Digest> ids_;
    std::map<Address, size_t> pending_count_;
    uint64_t next_seq_ = 0;
};

}  // namespace airtrust::chain
