// Copyright 2026 the Scrybe Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or
// at http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <map>

#include "scrybe/model.hpp"

namespace scrybe {

// Commit-reveal miner selection. Each participant commits to a secret
// nonce, then reveals it; the seed hashes every revealed nonce together,
// so no single participant can bias the outcome after seeing the others.
// Everything here is a pure function of its inputs, which is what makes a
// block's mining record re-checkable by any fresh verifier.

inline Digest compute_commitment(const std::array<uint8_t, 32>& nonce, uint64_t round,
                                 uint32_t attempt) {
    ByteWriter w;
    w.raw(nonce);
    w.u64(round);
    w.u32(attempt);
    return hash_bytes(w.bytes());
}

/// Bytes a participant signs to attest its commitment for (round, attempt).
inline Bytes attestation_signing_bytes(uint64_t round, uint32_t attempt, const Digest& commitment) {
    ByteWriter w;
    w.u8(kTagAttestation);
    w.u64(round);
    w.u32(attempt);
    w.digest(commitment);
    return w.take();
}

/// seed = H(nonces sorted by miner key id || round || attempt)
inline Digest selection_seed(const std::map<Digest, std::array<uint8_t, 32>>& reveals,
                             uint64_t round, uint32_t attempt) {
    ByteWriter w;
    for (const auto& [key_id, nonce] : reveals) w.raw(nonce);
    w.u64(round);
    w.u32(attempt);
    return hash_bytes(w.bytes());
}

/// seed interpreted as a big-endian unsigned integer, reduced mod n
inline size_t seed_mod(const Digest& seed, size_t n) {
    uint64_t r = 0;
    for (uint8_t b : seed.bytes) r = (r * 256 + b) % n;
    return static_cast<size_t>(r);
}

/// Deterministic selection among the revealing miners. Requires at least
/// one reveal; quorum policy is enforced by the round state machine, not
/// here, so that embedded mining records stay re-checkable in isolation.
inline Digest select_miner(const std::map<Digest, std::array<uint8_t, 32>>& reveals, uint64_t round,
                           uint32_t attempt) {
    if (reveals.empty()) throw std::invalid_argument("select_miner requires at least one reveal");
    Digest seed = selection_seed(reveals, round, attempt);
    size_t index = seed_mod(seed, reveals.size());
    auto it = reveals.begin();
    std::advance(it, index);
    return it->first;
}

}  // namespace scrybe
