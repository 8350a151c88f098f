#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include "airtrust/common/hex.hpp"

namespace airtrust::chain {

using Digest = std::array<uint8_t, 32>;
using Address = std::array<uint8_t, 20>;

// The single hash seam: every digest in the ledger, the contracts and their
// tests flows through here. Currently SHA-256.
Digest digest256(std::span<const uint8_t> data);
Digest digest256(const Bytes& data);
Digest digest256(const std::string& data);

// First 20 octets of a digest; used for account and contract addresses.
Address truncate20(const Digest& d);

inline std::string hex(const Digest& d) { return to_hex(d.data(), d.size()); }
inline std::string hex(const Address& a) { return to_hex(a.data(), a.size()); }

Digest digest_from_hex(const std::string& text);
Address address_from_hex(const std::string& text);

inline constexpr Digest kZeroDigest{};

}  // namespace airtrust::chain
