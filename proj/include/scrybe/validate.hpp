// Copyright 2026 the Scrybe Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or
// at http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <string>
#include <vector>

#include "scrybe/model.hpp"
#include "scrybe/selection.hpp"

namespace scrybe {

enum class ValidationCode {
    Ok,
    // transactions
    UnknownSubmitter,
    BadTxnSignature,
    // blocks
    UnauthorizedMiner,
    BadMinerSignature,
    BrokenLink,
    BadGenesis,
    BadHeight,
    MissingRecord,
    BadMiningRecord,
    WrongProducer,
    BadTransaction,
    // chains
    EmptyChain,
};

inline const char* validation_code_name(ValidationCode c) {
    switch (c) {
        case ValidationCode::Ok: return "OK";
        case ValidationCode::UnknownSubmitter: return "UNKNOWN_SUBMITTER";
        case ValidationCode::BadTxnSignature: return "BAD_TXN_SIGNATURE";
        case ValidationCode::UnauthorizedMiner: return "UNAUTHORIZED_MINER";
        case ValidationCode::BadMinerSignature: return "BAD_MINER_SIGNATURE";
        case ValidationCode::BrokenLink: return "BROKEN_LINK";
        case ValidationCode::BadGenesis: return "BAD_GENESIS";
        case ValidationCode::BadHeight: return "BAD_HEIGHT";
        case ValidationCode::MissingRecord: return "MISSING_RECORD";
        case ValidationCode::BadMiningRecord: return "BAD_MINING_RECORD";
        case ValidationCode::WrongProducer: return "WRONG_PRODUCER";
        case ValidationCode::BadTransaction: return "BAD_TRANSACTION";
        case ValidationCode::EmptyChain: return "EMPTY_CHAIN";
    }
    return "UNKNOWN";
}

/// Typed validation outcome naming the first violated check. `height` is
/// meaningful for block and chain results.
struct ValidationResult {
    ValidationCode code = ValidationCode::Ok;
    uint64_t height = 0;
    std::string detail;

    bool ok() const { return code == ValidationCode::Ok; }

    static ValidationResult pass() { return {}; }

    static ValidationResult fail(ValidationCode c, std::string detail = {}, uint64_t height = 0) {
        return {c, height, std::move(detail)};
    }
};

inline ValidationResult verify_transaction(const Transaction& txn, const PublicKey& submitter_key) {
    if (txn.txn_signature.signer != txn.submitter_key_id)
        return ValidationResult::fail(ValidationCode::BadTxnSignature,
                                      "signature signer differs from submitter");
    if (!verify_memo(txn_signing_bytes(txn), txn.txn_signature, submitter_key))
        return ValidationResult::fail(ValidationCode::BadTxnSignature,
                                      "transaction signature does not verify");
    return ValidationResult::pass();
}

/// Registry-aware form: an unknown submitter is reported distinctly from a
/// bad signature.
inline ValidationResult verify_transaction(const Transaction& txn, const KeyRegistry& authors) {
    const PublicKey* pk = authors.find(txn.submitter_key_id);
    if (!pk)
        return ValidationResult::fail(ValidationCode::UnknownSubmitter,
                                      "submitter key not in registry: " +
                                          to_hex(txn.submitter_key_id));
    return verify_transaction(txn, *pk);
}

namespace detail {

inline ValidationResult check_mining_record(const Block& block, const MinerRegistry& miners) {
    const MiningRecord& mr = block.mining_record;
    if (mr.participants.empty())
        return ValidationResult::fail(ValidationCode::MissingRecord, "mining record has no participants",
                                      block.height);
    if (mr.round != block.height)
        return ValidationResult::fail(ValidationCode::BadMiningRecord,
                                      "mining record round does not match block height", block.height);
    std::map<Digest, std::array<uint8_t, 32>> reveals;
    const Digest* prev_id = nullptr;
    for (const auto& p : mr.participants) {
        if (prev_id && !(*prev_id < p.miner_key_id))
            return ValidationResult::fail(ValidationCode::BadMiningRecord,
                                          "participants not sorted by key id", block.height);
        prev_id = &p.miner_key_id;
        const PublicKey* pk = miners.find(p.miner_key_id);
        if (!pk)
            return ValidationResult::fail(ValidationCode::BadMiningRecord,
                                          "participant not a registered miner", block.height);
        if (compute_commitment(p.reveal, mr.round, mr.attempt) != p.commitment)
            return ValidationResult::fail(ValidationCode::BadMiningRecord,
                                          "reveal does not match commitment", block.height);
        if (p.participant_signature.signer != p.miner_key_id ||
            !verify_memo(attestation_signing_bytes(mr.round, mr.attempt, p.commitment),
                         p.participant_signature, *pk))
            return ValidationResult::fail(ValidationCode::BadMiningRecord,
                                          "participant attestation does not verify", block.height);
        reveals.emplace(p.miner_key_id, p.reveal);
    }
    Digest selected = select_miner(reveals, mr.round, mr.attempt);
    if (selected != block.miner_key_id)
        return ValidationResult::fail(ValidationCode::WrongProducer,
                                      "selection picks " + to_hex(selected), block.height);
    return ValidationResult::pass();
}

/// Everything about a block except its linkage to the previous one.
inline ValidationResult verify_block_content(const Block& block, const MinerRegistry& miners,
                                             const KeyRegistry& authors) {
    if (block.height == 0) {
        if (block != genesis_block())
            return ValidationResult::fail(ValidationCode::BadGenesis, "genesis bytes differ", 0);
        return ValidationResult::pass();
    }
    const PublicKey* miner_pk = miners.find(block.miner_key_id);
    if (!miner_pk)
        return ValidationResult::fail(ValidationCode::UnauthorizedMiner,
                                      "miner key not in registry: " + to_hex(block.miner_key_id),
                                      block.height);
    if (block.miner_signature.signer != block.miner_key_id ||
        !verify_memo(block_signing_bytes(block), block.miner_signature, *miner_pk))
        return ValidationResult::fail(ValidationCode::BadMinerSignature,
                                      "miner signature does not verify", block.height);
    for (size_t i = 0; i < block.transactions.size(); ++i) {
        ValidationResult r = verify_transaction(block.transactions[i], authors);
        if (!r.ok())
            return ValidationResult::fail(ValidationCode::BadTransaction,
                                          "transaction " + std::to_string(i) + ": " +
                                              validation_code_name(r.code),
                                          block.height);
    }
    return detail::check_mining_record(block, miners);
}

}  // namespace detail

/// Full single-block check: linkage first, then content. `prev` must be
/// present exactly when height > 0.
inline ValidationResult verify_block(const Block& block, const Block* prev,
                                     const MinerRegistry& miners, const KeyRegistry& authors) {
    if (block.height == 0) {
        if (prev) return ValidationResult::fail(ValidationCode::BadHeight, "genesis cannot have a parent", 0);
        return detail::verify_block_content(block, miners, authors);
    }
    if (!prev)
        return ValidationResult::fail(ValidationCode::BadHeight, "non-genesis block needs a parent",
                                      block.height);
    if (block.height != prev->height + 1)
        return ValidationResult::fail(ValidationCode::BadHeight, "height not parent+1", block.height);
    if (block.prev_hash != compute_block_hash(*prev))
        return ValidationResult::fail(ValidationCode::BrokenLink,
                                      "prev_hash does not match parent block hash", block.height);
    return detail::verify_block_content(block, miners, authors);
}

/// Whole-chain check. Linkage is validated across all adjacent pairs before
/// any content check runs, so a post-hoc edit of block h is reported as a
/// broken link at h+1 rather than as a bad signature at h — the link is the
/// tamper evidence.
inline ValidationResult verify_chain(const std::vector<Block>& blocks, const MinerRegistry& miners,
                                     const KeyRegistry& authors) {
    if (blocks.empty())
        return ValidationResult::fail(ValidationCode::EmptyChain, "chain must begin at genesis");
    if (blocks[0] != genesis_block())
        return ValidationResult::fail(ValidationCode::BadGenesis, "chain does not start at genesis", 0);
    for (size_t h = 1; h < blocks.size(); ++h) {
        if (blocks[h].height != h)
            return ValidationResult::fail(ValidationCode::BadHeight, "heights not consecutive", h);
        if (blocks[h].prev_hash != compute_block_hash(blocks[h - 1]))
            return ValidationResult::fail(ValidationCode::BrokenLink,
                                          "prev_hash does not match parent block hash", h);
    }
    for (size_t h = 1; h < blocks.size(); ++h) {
        ValidationResult r = detail::verify_block_content(blocks[h], miners, authors);
        if (!r.ok()) return r;
    }
    return ValidationResult::pass();
}

}  // namespace scrybe
