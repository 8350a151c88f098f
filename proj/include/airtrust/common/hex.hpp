#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace airtrust {

using Bytes = std::vector<uint8_t>;

std::string to_hex(const uint8_t* data, size_t len, bool upper = false);

inline std::string to_hex(const Bytes& b, bool upper = false) {
    return to_hex(b.data(), b.size(), upper);
}

// Accepts upper or lower case; strips spaces, tabs and '-' separators first.
// Empty result or odd digit count -> nullopt.
std::optional<Bytes> from_hex(std::string_view text);

}  // namespace airtrust
