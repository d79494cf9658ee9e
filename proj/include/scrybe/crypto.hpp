// Copyright 2026 the Scrybe Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or
// at http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <sodium.h>

#include <array>
#include <mutex>
#include <optional>
#include <span>
#include <stdexcept>
#include <unordered_map>

#include "scrybe/bytes.hpp"

namespace scrybe {

// Hashing is SHA-256; signatures are Ed25519 (deterministic, 64-byte),
// both via libsodium. The free functions below are the only crypto surface
// the rest of the tree uses, so the scheme can be swapped in one place.

inline void crypto_init() {
    static const int rc = [] {
        int r = sodium_init();
        if (r < 0) throw std::runtime_error("libsodium initialization failed");
        return r;
    }();
    (void)rc;
}

inline Digest hash_bytes(std::span<const uint8_t> message) {
    crypto_init();
    Digest d;
    crypto_hash_sha256(d.bytes.data(), message.data(), message.size());
    return d;
}

inline Digest hash_bytes(std::string_view message) {
    return hash_bytes(std::span<const uint8_t>(reinterpret_cast<const uint8_t*>(message.data()),
                                               message.size()));
}

struct PublicKey {
    std::array<uint8_t, crypto_sign_PUBLICKEYBYTES> bytes{};

    auto operator<=>(const PublicKey&) const = default;
};

/// key_id is the digest of the raw public-key bytes; it names keys in the
/// registry, in signatures, and in every wire message.
inline Digest key_id_of(const PublicKey& pk) { return hash_bytes(std::span<const uint8_t>(pk.bytes)); }

struct KeyPair {
    PublicKey public_key;
    std::array<uint8_t, crypto_sign_SECRETKEYBYTES> private_key{};
    Digest key_id;
};

inline KeyPair generate_keypair(std::optional<std::span<const uint8_t>> seed = std::nullopt) {
    crypto_init();
    KeyPair kp;
    if (seed) {
        if (seed->size() != crypto_sign_SEEDBYTES)
            throw std::invalid_argument("keypair seed must be exactly 32 bytes");
        crypto_sign_seed_keypair(kp.public_key.bytes.data(), kp.private_key.data(), seed->data());
    } else {
        crypto_sign_keypair(kp.public_key.bytes.data(), kp.private_key.data());
    }
    kp.key_id = key_id_of(kp.public_key);
    return kp;
}

struct Signature {
    std::array<uint8_t, crypto_sign_BYTES> bytes{};
    Digest signer;  // key_id of the signing key

    auto operator<=>(const Signature&) const = default;
};

inline Signature sign(std::span<const uint8_t> message, const KeyPair& key) {
    crypto_init();
    Signature s;
    crypto_sign_detached(s.bytes.data(), nullptr, message.data(), message.size(),
                         key.private_key.data());
    s.signer = key.key_id;
    return s;
}

/// True iff `signature` was produced over exactly `message` by the holder
/// of the key matching `public_key`. Malformed input yields false, never
/// an exception.
inline bool verify(std::span<const uint8_t> message, const Signature& signature,
                   const PublicKey& public_key) {
    crypto_init();
    return crypto_sign_verify_detached(signature.bytes.data(), message.data(), message.size(),
                                       public_key.bytes.data()) == 0;
}

/// Memoized verify for hot paths (a broadcast envelope is verified once per
/// receiving node; the simulator runs many nodes in one process). Same
/// semantics as verify(); the cache key binds message, signature, and key.
inline bool verify_memo(std::span<const uint8_t> message, const Signature& signature,
                        const PublicKey& public_key) {
    crypto_init();
    Bytes key_input;
    key_input.reserve(message.size() + 96 + 32);
    key_input.insert(key_input.end(), public_key.bytes.begin(), public_key.bytes.end());
    key_input.insert(key_input.end(), signature.bytes.begin(), signature.bytes.end());
    key_input.insert(key_input.end(), signature.signer.bytes.begin(), signature.signer.bytes.end());
    key_input.insert(key_input.end(), message.begin(), message.end());
    Digest k = hash_bytes(key_input);

    struct Cache {
        std::mutex mu;
        std::unordered_map<std::string, bool> map;
    };
    static Cache cache;

    std::string ks(reinterpret_cast<const char*>(k.bytes.data()), k.bytes.size());
    {
        std::lock_guard<std::mutex> lock(cache.mu);
        auto it = cache.map.find(ks);
        if (it != cache.map.end()) return it->second;
    }
    bool ok = verify(message, signature, public_key);
    {
        std::lock_guard<std::mutex> lock(cache.mu);
        if (cache.map.size() > 2'000'000) cache.map.clear();
        cache.map.emplace(std::move(ks), ok);
    }
    return ok;
}

inline PublicKey public_key_from_hex(std::string_view hex) {
    Bytes raw = from_hex(hex);
    if (raw.size() != crypto_sign_PUBLICKEYBYTES)
        throw std::invalid_argument("public key must be 64 hex characters");
    PublicKey pk;
    std::memcpy(pk.bytes.data(), raw.data(), raw.size());
    return pk;
}

}  // namespace scrybe
