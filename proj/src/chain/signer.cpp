#include "airtrust/chain/signer.hpp"

namespace airtrust::chain {

Bytes KeyedHashSigner::sign(const Bytes& secret, std::span<const uint8_t> message) const {
    Bytes buf;
    buf.reserve(secret.size() * 2 + message.size());
    buf.insert(buf.end(), secret.begin(), secret.end());
    buf.insert(buf.end(), message.begin(), message.end());
    buf.insert(buf.end(), secret.begin(), secret.end());
    Digest d = digest256(buf);
    return Bytes(d.begin(), d.end());
}

bool KeyedHashSigner::verify(const Bytes& verify_key, std::span<const uint8_t> message,
                             const Bytes& signature) const {
    Bytes expected = sign(verify_key, message);
    return expected == signature;
}

const Signer& default_signer() {
    static KeyedHashSigner signer;
    return signer;
}

Bytes secret_from_name(const std::string& name) {
    Digest d = digest256("secret:" + name);
    return Bytes(d.begin(), d.end());
}

Address address_from_secret(const Bytes& secret) {
    Bytes buf;
    const std::string tag = "addr:";
    buf.insert(buf.end(), tag.begin(), tag.end());
    buf.insert(buf.end(), secret.begin(), secret.end());
    return truncate20(digest256(buf));
}

}  // namespace airtrust::chain
