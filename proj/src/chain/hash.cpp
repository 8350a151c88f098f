#include "airtrust/chain/hash.hpp"

#include <stdexcept>

#include <openssl/evp.h>

namespace airtrust::chain {

Digest digest256(std::span<const uint8_t> data) {
    Digest out{};
    unsigned int len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx) throw std::runtime_error("EVP_MD_CTX_new failed");
    if (EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, data.data(), data.size()) != 1 ||
        EVP_DigestFinal_ex(ctx, out.data(), &len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw std::runtime_error("SHA-256 computation failed");
    }
    EVP_MD_CTX_free(ctx);
    return out;
}

Digest digest256(const Bytes& data) {
    return digest256(std::span<const uint8_t>(data.data(), data.size()));
}

Digest digest256(const std::string& data) {
    return digest256(std::span<const uint8_t>(
        reinterpret_cast<const uint8_t*>(data.data()), data.size()));
}

Address truncate20(const Digest& d) {
    Address a{};
    std::copy(d.begin(), d.begin() + a.size(), a.begin());
    return a;
}

Digest digest_from_hex(const std::string& text) {
    auto bytes = from_hex(text);
    if (!bytes || bytes->size() != 32) throw std::invalid_argument("bad digest hex");
    Digest d{};
    std::copy(bytes->begin(), bytes->end(), d.begin());
    return d;
}

Address address_from_hex(const std::string& text) {
    auto bytes = from_hex(text);
    if (!bytes || bytes->size() != 20) throw std::invalid_argument("bad address hex");
    Address a{};
    std::copy(bytes->begin(), bytes->end(), a.begin());
    return a;
}

}  // namespace airtrust::chain
