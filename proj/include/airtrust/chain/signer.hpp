#pragma once

#include <string>

#include "airtrust/chain/hash.hpp"

namespace airtrust::chain {

// Pluggable signature scheme. The harness signer is a keyed hash over the
// canonical encoding; the seam accepts an asymmetric scheme without touching
// callers.
class Signer {
public:
    virtual ~Signer() = default;
    virtual Bytes sign(const Bytes& secret, std::span<const uint8_t> message) const = 0;
    virtual bool verify(const Bytes& verify_key, std::span<const uint8_t> message,
                        const Bytes& signature) const = 0;
};

class KeyedHashSigner : public Signer {
public:
    Bytes sign(const Bytes& secret, std::span<const uint8_t> message) const override;
    bool verify(const Bytes& verify_key, std::span<const uint8_t> message,
                const Bytes& signature) const override;
};

const Signer& default_signer();

// Deterministic account material for harnesses: secret from a name, address
// from the secret.
Bytes secret_from_name(const std::string& name);
Address address_from_secret(const Bytes& secret);

}  // namespace airtrust::chain
