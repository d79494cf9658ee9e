// Copyright 2026 the Scrybe Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or
// at http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <optional>
#include <variant>

#include "scrybe/model.hpp"

namespace scrybe {

enum class MsgType : uint8_t {
    Commit = 1,
    Reveal = 2,
    Proposal = 3,
    ChainRequest = 4,
    ChainResponse = 5,
    TxnSubmit = 6,
};

inline const char* msg_type_name(MsgType t) {
    switch (t) {
        case MsgType::Commit: return "COMMIT";
        case MsgType::Reveal: return "REVEAL";
        case MsgType::Proposal: return "PROPOSAL";
        case MsgType::ChainRequest: return "CHAIN_REQUEST";
        case MsgType::ChainResponse: return "CHAIN_RESPONSE";
        case MsgType::TxnSubmit: return "TXN_SUBMIT";
    }
    return "UNKNOWN";
}

/// Signed transport unit. The signature covers type, round, attempt, sender,
/// and payload, so no field can be reattributed in transit.
struct Envelope {
    MsgType msg_type = MsgType::Commit;
    uint64_t round = 0;
    uint32_t attempt = 0;
    Digest sender_key_id;
    Bytes payload;
    Signature signature;

    bool operator==(const Envelope&) const = default;
};

inline void encode_envelope_body(ByteWriter& w, const Envelope& e) {
    w.u8(kTagEnvelope);
    w.u8(static_cast<uint8_t>(e.msg_type));
    w.u64(e.round);
    w.u32(e.attempt);
    w.digest(e.sender_key_id);
    w.count(e.payload.size());
    w.raw(e.payload);
}

inline Bytes envelope_signing_bytes(const Envelope& e) {
    ByteWriter w;
    encode_envelope_body(w, e);
    return w.take();
}

inline Bytes canonical_encode(const Envelope& e) {
    ByteWriter w;
    encode_envelope_body(w, e);
    encode_signature(w, e.signature);
    return w.take();
}

inline Envelope decode_envelope(std::span<const uint8_t> bytes) {
    ByteReader r(bytes);
    Envelope e;
    if (r.u8() != kTagEnvelope) throw CodecError("not an envelope");
    uint8_t t = r.u8();
    if (t < 1 || t > 6) throw CodecError("unknown message type");
    e.msg_type = static_cast<MsgType>(t);
    e.round = r.u64();
    e.attempt = r.u32();
    e.sender_key_id = r.digest();
    uint32_t n = r.count();
    auto raw = r.raw(n);
    e.payload.assign(raw.begin(), raw.end());
    e.signature = decode_signature(r);
    r.expect_done();
    return e;
}

inline Envelope make_envelope(MsgType type, uint64_t round, uint32_t attempt, Bytes payload,
                              const KeyPair& sender) {
    Envelope e;
    e.msg_type = type;
    e.round = round;
    e.attempt = attempt;
    e.sender_key_id = sender.key_id;
    e.payload = std::move(payload);
    e.signature = sign(envelope_signing_bytes(e), sender);
    return e;
}

// ---------------------------------------------------------------------------
// Payloads
// ---------------------------------------------------------------------------

struct CommitPayload {
    Digest commitment;
    std::vector<Digest> txn_digests;  // sorted digests of the sender's pool
    Signature attestation;            // over (round, attempt, commitment)
};

inline Bytes encode_payload(const CommitPayload& p) {
    ByteWriter w;
    w.digest(p.commitment);
    w.count(p.txn_digests.size());
    for (const auto& d : p.txn_digests) w.digest(d);
    encode_signature(w, p.attestation);
    return w.take();
}

inline CommitPayload decode_commit_payload(std::span<const uint8_t> bytes) {
    ByteReader r(bytes);
    CommitPayload p;
    p.commitment = r.digest();
    uint32_t n = r.count();
    p.txn_digests.reserve(n);
    for (uint32_t i = 0; i < n; ++i) p.txn_digests.push_back(r.digest());
    p.attestation = decode_signature(r);
    r.expect_done();
    return p;
}

struct RevealPayload {
    std::array<uint8_t, 32> nonce{};
};

inline Bytes encode_payload(const RevealPayload& p) {
    ByteWriter w;
    w.raw(p.nonce);
    return w.take();
}

inline RevealPayload decode_reveal_payload(std::span<const uint8_t> bytes) {
    ByteReader r(bytes);
    RevealPayload p;
    auto raw = r.raw(32);
    std::copy(raw.begin(), raw.end(), p.nonce.begin());
    r.expect_done();
    return p;
}

inline Bytes encode_proposal_payload(const Block& b) { return canonical_encode(b); }

inline Block decode_proposal_payload(std::span<const uint8_t> bytes) { return decode_block(bytes); }

struct ChainRequestPayload {
    uint64_t from_height = 0;
};

inline Bytes encode_payload(const ChainRequestPayload& p) {
    ByteWriter w;
    w.u64(p.from_height);
    return w.take();
}

inline ChainRequestPayload decode_chain_request_payload(std::span<const uint8_t> bytes) {
    ByteReader r(bytes);
    ChainRequestPayload p;
    p.from_height = r.u64();
    r.expect_done();
    return p;
}

inline Bytes encode_chain_response_payload(const std::vector<Block>& blocks) {
    ByteWriter w;
    w.count(blocks.size());
    for (const auto& b : blocks) {
        encode_block_body(w, b);
        encode_signature(w, b.miner_signature);
    }
    return w.take();
}

inline std::vector<Block> decode_chain_response_payload(std::span<const uint8_t> bytes) {
    ByteReader r(bytes);
    uint32_t n = r.count();
    std::vector<Block> blocks;
    blocks.reserve(n);
    for (uint32_t i = 0; i < n; ++i) blocks.push_back(decode_block(r));
    r.expect_done();
    return blocks;
}

inline Bytes encode_txn_submit_payload(const Transaction& t) { return canonical_encode(t); }

inline Transaction decode_txn_submit_payload(std::span<const uint8_t> bytes) {
    return decode_transaction(bytes);
}

// ---------------------------------------------------------------------------
// Wire frames
// ---------------------------------------------------------------------------

constexpr size_t kMaxFrameBytes = 4 * 1024 * 1024;

struct FrameError : std::runtime_error {
    enum class Kind { TooLarge, Truncated };
    Kind kind;
    FrameError(Kind k, const std::string& what) : std::runtime_error(what), kind(k) {}
};

/// frame = u32 big-endian length + canonical envelope bytes
inline Bytes wire_encode(const Envelope& e) {
    Bytes body = canonical_encode(e);
    if (body.size() > kMaxFrameBytes)
        throw FrameError(FrameError::Kind::TooLarge, "FRAME_TOO_LARGE: envelope exceeds 4 MiB");
    Bytes frame;
    frame.reserve(4 + body.size());
    uint32_t len = static_cast<uint32_t>(body.size());
    frame.push_back(static_cast<uint8_t>(len >> 24));
    frame.push_back(static_cast<uint8_t>(len >> 16));
    frame.push_back(static_cast<uint8_t>(len >> 8));
    frame.push_back(static_cast<uint8_t>(len));
    frame.insert(frame.end(), body.begin(), body.end());
    return frame;
}

/// Decodes a complete frame. Signature verification is the caller's job.
inline Envelope wire_decode(std::span<const uint8_t> frame) {
    if (frame.size() < 4) throw FrameError(FrameError::Kind::Truncated, "TRUNCATED: frame header short");
    uint32_t len = (uint32_t(frame[0]) << 24) | (uint32_t(frame[1]) << 16) |
                   (uint32_t(frame[2]) << 8) | uint32_t(frame[3]);
    if (len > kMaxFrameBytes)
        throw FrameError(FrameError::Kind::TooLarge, "FRAME_TOO_LARGE: declared length exceeds 4 MiB");
    if (frame.size() - 4 < len)
        throw FrameError(FrameError::Kind::Truncated, "TRUNCATED: frame body short");
    if (frame.size() - 4 > len)
        throw FrameError(FrameError::Kind::Truncated, "TRUNCATED: trailing bytes after frame");
    return decode_envelope(frame.subspan(4, len));
}

/// Incremental frame splitter for stream transports.
class FrameAssembler {
  public:
    void feed(std::span<const uint8_t> data) { buf_.insert(buf_.end(), data.begin(), data.end()); }

    /// Returns the next complete frame (length prefix included), or nullopt.
    /// Throws FrameError::TooLarge on an oversized declared length, after
    /// which the stream is unusable.
    std::optional<Bytes> next() {
        if (buf_.size() < 4) return std::nullopt;
        uint32_t len = (uint32_t(buf_[0]) << 24) | (uint32_t(buf_[1]) << 16) |
                       (uint32_t(buf_[2]) << 8) | uint32_t(buf_[3]);
        if (len > kMaxFrameBytes)
            throw FrameError(FrameError::Kind::TooLarge, "FRAME_TOO_LARGE: declared length exceeds 4 MiB");
        if (buf_.size() < 4 + static_cast<size_t>(len)) return std::nullopt;
        Bytes frame(buf_.begin(), buf_.begin() + 4 + len);
        buf_.erase(buf_.begin(), buf_.begin() + 4 + len);
        return frame;
    }

  private:
    Bytes buf_;
};

}  // namespace scrybe
