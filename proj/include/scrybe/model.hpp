// Copyright 2026 the Scrybe Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or
// at http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scrybe/codec.hpp"
#include "scrybe/crypto.hpp"

namespace scrybe {

// ---------------------------------------------------------------------------
// Off-chain: changelog entries
// ---------------------------------------------------------------------------

enum class FieldOpKind : uint8_t { Set = 0, Delete = 1 };

/// One field-level change. A sequence of these rebuilds a record store from
/// the empty state.
struct FieldOp {
    std::string record_id;
    std::string field_name;
    FieldOpKind op = FieldOpKind::Set;
    std::optional<std::string> new_value;  // present iff op == Set

    bool operator==(const FieldOp&) const = default;
};

/// A signed, sequentially numbered record mutation. The full entry lives
/// only in the changelog store; the chain carries its hash.
struct ChangelogEntry {
    uint64_t entry_id = 0;
    std::string trial_id;
    uint64_t timestamp = 0;  // UTC milliseconds since epoch
    Digest author_key_id;
    std::vector<FieldOp> mutation;
    Signature entry_signature;

    bool operator==(const ChangelogEntry&) const = default;
};

// ---------------------------------------------------------------------------
// On-chain: transactions, mining records, blocks
// ---------------------------------------------------------------------------

/// On-chain anchor of a changelog entry: hash plus metadata, never the data.
struct Transaction {
    uint64_t entry_id = 0;
    std::string trial_id;
    uint64_t timestamp = 0;
    Digest entry_hash;
    Signature entry_signature_copy;
    Digest submitter_key_id;
    Signature txn_signature;

    bool operator==(const Transaction&) const = default;
};

struct MiningParticipant {
    Digest miner_key_id;
    Digest commitment;
    std::array<uint8_t, 32> reveal{};
    Signature participant_signature;  // over (round, attempt, commitment)

    bool operator==(const MiningParticipant&) const = default;
};

/// Commit/reveal evidence embedded in each block; lets any verifier
/// recompute which miner was entitled to produce it.
struct MiningRecord {
    uint64_t round = 0;
    uint32_t attempt = 0;
    std::vector<MiningParticipant> participants;  // sorted by miner_key_id

    bool operator==(const MiningRecord&) const = default;
};

struct Block {
    uint64_t height = 0;
    Digest prev_hash;
    uint64_t timestamp = 0;
    Digest miner_key_id;
    std::vector<Transaction> transactions;
    MiningRecord mining_record;
    Signature miner_signature;

    bool operator==(const Block&) const = default;
};

/// The closed set of keys allowed to act in a given role. Instances serve
/// both as the miner registry and as the authorized-author registry.
struct MinerRegistry {
    uint64_t registry_version = 1;
    std::map<Digest, PublicKey> miners;  // key_id -> public key

    bool contains(const Digest& key_id) const { return miners.count(key_id) != 0; }

    const PublicKey* find(const Digest& key_id) const {
        auto it = miners.find(key_id);
        return it == miners.end() ? nullptr : &it->second;
    }

    size_t size() const { return miners.size(); }
};

using KeyRegistry = MinerRegistry;

// ---------------------------------------------------------------------------
// Canonical encoding
// ---------------------------------------------------------------------------

inline void encode_signature(ByteWriter& w, const Signature& s) {
    w.raw(s.bytes);
    w.digest(s.signer);
}

inline Signature decode_signature(ByteReader& r) {
    Signature s;
    auto raw = r.raw(s.bytes.size());
    std::copy(raw.begin(), raw.end(), s.bytes.begin());
    s.signer = r.digest();
    return s;
}

inline void encode_field_op(ByteWriter& w, const FieldOp& op) {
    w.str(op.record_id);
    w.str(op.field_name);
    w.u8(static_cast<uint8_t>(op.op));
    w.opt_str(op.new_value);
}

inline FieldOp decode_field_op(ByteReader& r) {
    FieldOp op;
    op.record_id = r.str();
    op.field_name = r.str();
    uint8_t kind = r.u8();
    if (kind > 1) throw CodecError("bad field op kind");
    op.op = static_cast<FieldOpKind>(kind);
    op.new_value = r.opt_str();
    return op;
}

inline void encode_entry_body(ByteWriter& w, const ChangelogEntry& e) {
    w.u8(kTagEntry);
    w.u64(e.entry_id);
    w.str(e.trial_id);
    w.u64(e.timestamp);
    w.digest(e.author_key_id);
    w.count(e.mutation.size());
    for (const auto& m : e.mutation) encode_field_op(w, m);
}

/// Bytes the author signs: everything except the signature itself.
inline Bytes entry_signing_bytes(const ChangelogEntry& e) {
    ByteWriter w;
    encode_entry_body(w, e);
    return w.take();
}

inline Bytes canonical_encode(const ChangelogEntry& e) {
    ByteWriter w;
    encode_entry_body(w, e);
    encode_signature(w, e.entry_signature);
    return w.take();
}

inline ChangelogEntry decode_entry(ByteReader& r) {
    ChangelogEntry e;
    if (r.u8() != kTagEntry) throw CodecError("not a changelog entry");
    e.entry_id = r.u64();
    e.trial_id = r.str();
    e.timestamp = r.u64();
    e.author_key_id = r.digest();
    uint32_t n = r.count();
    e.mutation.reserve(n);
    for (uint32_t i = 0; i < n; ++i) e.mutation.push_back(decode_field_op(r));
    e.entry_signature = decode_signature(r);
    return e;
}

inline ChangelogEntry decode_entry(std::span<const uint8_t> bytes) {
    ByteReader r(bytes);
    ChangelogEntry e = decode_entry(r);
    r.expect_done();
    return e;
}

inline void encode_txn_body(ByteWriter& w, const Transaction& t) {
    w.u8(kTagTransaction);
    w.u64(t.entry_id);
    w.str(t.trial_id);
    w.u64(t.timestamp);
    w.digest(t.entry_hash);
    encode_signature(w, t.entry_signature_copy);
    w.digest(t.submitter_key_id);
}

inline Bytes txn_signing_bytes(const Transaction& t) {
    ByteWriter w;
    encode_txn_body(w, t);
    return w.take();
}

inline Bytes canonical_encode(const Transaction& t) {
    ByteWriter w;
    encode_txn_body(w, t);
    encode_signature(w, t.txn_signature);
    return w.take();
}

inline Transaction decode_transaction(ByteReader& r) {
    Transaction t;
    if (r.u8() != kTagTransaction) throw CodecError("not a transaction");
    t.entry_id = r.u64();
    t.trial_id = r.str();
    t.timestamp = r.u64();
    t.entry_hash = r.digest();
    t.entry_signature_copy = decode_signature(r);
    t.submitter_key_id = r.digest();
    t.txn_signature = decode_signature(r);
    return t;
}

inline Transaction decode_transaction(std::span<const uint8_t> bytes) {
    ByteReader r(bytes);
    Transaction t = decode_transaction(r);
    r.expect_done();
    return t;
}

inline void encode_mining_record(ByteWriter& w, const MiningRecord& mr) {
    w.u64(mr.round);
    w.u32(mr.attempt);
    w.count(mr.participants.size());
    for (const auto& p : mr.participants) {
        w.digest(p.miner_key_id);
        w.digest(p.commitment);
        w.raw(p.reveal);
        encode_signature(w, p.participant_signature);
    }
}

inline MiningRecord decode_mining_record(ByteReader& r) {
    MiningRecord mr;
    mr.round = r.u64();
    mr.attempt = r.u32();
    uint32_t n = r.count();
    mr.participants.reserve(n);
    for (uint32_t i = 0; i < n; ++i) {
        MiningParticipant p;
        p.miner_key_id = r.digest();
        p.commitment = r.digest();
        auto raw = r.raw(32);
        std::copy(raw.begin(), raw.end(), p.reveal.begin());
        p.participant_signature = decode_signature(r);
        mr.participants.push_back(std::move(p));
    }
    return mr;
}

inline void encode_block_body(ByteWriter& w, const Block& b) {
    w.u8(kTagBlock);
    w.u64(b.height);
    w.digest(b.prev_hash);
    w.u64(b.timestamp);
    w.digest(b.miner_key_id);
    w.count(b.transactions.size());
    for (const auto& t : b.transactions) {
        encode_txn_body(w, t);
        encode_signature(w, t.txn_signature);
    }
    encode_mining_record(w, b.mining_record);
}

inline Bytes block_signing_bytes(const Block& b) {
    ByteWriter w;
    encode_block_body(w, b);
    return w.take();
}

inline Bytes canonical_encode(const Block& b) {
    ByteWriter w;
    encode_block_body(w, b);
    encode_signature(w, b.miner_signature);
    return w.take();
}

inline Block decode_block(ByteReader& r) {
    Block b;
    if (r.u8() != kTagBlock) throw CodecError("not a block");
    b.height = r.u64();
    b.prev_hash = r.digest();
    b.timestamp = r.u64();
    b.miner_key_id = r.digest();
    uint32_t n = r.count();
    b.transactions.reserve(n);
    for (uint32_t i = 0; i < n; ++i) b.transactions.push_back(decode_transaction(r));
    b.mining_record = decode_mining_record(r);
    b.miner_signature = decode_signature(r);
    return b;
}

inline Block decode_block(std::span<const uint8_t> bytes) {
    ByteReader r(bytes);
    Block b = decode_block(r);
    r.expect_done();
    return b;
}

// ---------------------------------------------------------------------------
// Hashes
// ---------------------------------------------------------------------------

/// Hash of the full canonical entry encoding, signature included. This is
/// the value anchored on chain.
inline Digest compute_entry_hash(const ChangelogEntry& e) { return hash_bytes(canonical_encode(e)); }

inline Digest compute_block_hash(const Block& b) { return hash_bytes(canonical_encode(b)); }

/// Pool/dedup identity of a transaction.
inline Digest compute_txn_digest(const Transaction& t) { return hash_bytes(canonical_encode(t)); }

// ---------------------------------------------------------------------------
// Construction helpers
// ---------------------------------------------------------------------------

inline void sign_entry(ChangelogEntry& e, const KeyPair& author) {
    e.entry_signature = sign(entry_signing_bytes(e), author);
}

inline void sign_transaction(Transaction& t, const KeyPair& submitter) {
    t.txn_signature = sign(txn_signing_bytes(t), submitter);
}

inline void sign_block(Block& b, const KeyPair& miner) {
    b.miner_signature = sign(block_signing_bytes(b), miner);
}

/// Anchor transaction for an entry: id, trial, and timestamp are copied
/// from the entry, the mutation payload is replaced by the entry hash.
inline Transaction make_transaction(const ChangelogEntry& e, const KeyPair& submitter) {
    Transaction t;
    t.entry_id = e.entry_id;
    t.trial_id = e.trial_id;
    t.timestamp = e.timestamp;
    t.entry_hash = compute_entry_hash(e);
    t.entry_signature_copy = e.entry_signature;
    t.submitter_key_id = submitter.key_id;
    sign_transaction(t, submitter);
    return t;
}

/// The genesis block is fixed: zero hashes, zero timestamp, no producer.
/// Every chain starts with exactly these bytes.
inline Block genesis_block() {
    Block b;
    b.height = 0;
    b.timestamp = 0;
    return b;
}

}  // namespace scrybe
