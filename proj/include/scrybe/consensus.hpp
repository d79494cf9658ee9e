// Copyright 2026 the Scrybe Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or
// at http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>

#include "scrybe/chain_store.hpp"
#include "scrybe/messages.hpp"
#include "scrybe/selection.hpp"
#include "scrybe/validate.hpp"

namespace scrybe {

// One mining round per block height. Each round runs commit -> reveal ->
// produce; a timeout at any phase bumps the attempt counter and restarts
// the commit exchange among whoever is still responding. The state machine
// is single-threaded: every input (message, timer, local submission)
// arrives through one ordered event stream, and all I/O goes through the
// host interface so the same code runs under the simulator and the socket
// transport.

struct ConsensusConfig {
    uint64_t block_interval_ms = 10000;
    uint64_t commit_timeout_ms = 2000;
    uint64_t reveal_timeout_ms = 2000;
    uint64_t produce_timeout_ms = 4000;
    uint64_t first_round_delay_ms = 200;
    // Attempts >= this proceed with whatever subset responded instead of
    // requiring a majority, so a mostly-dead network still makes progress.
    uint32_t degrade_after_attempts = 2;
    size_t max_block_txns = 4096;
    size_t chain_response_max_blocks = 200;
};

/// Everything the round state machine needs from its environment.
struct NodeHost {
    virtual ~NodeHost() = default;
    virtual uint64_t now_ms() = 0;
    virtual void schedule_timer(uint64_t delay_ms, uint64_t token) = 0;
    virtual void broadcast(const Bytes& frame) = 0;
    virtual void send(const Digest& peer_key_id, const Bytes& frame) = 0;
    virtual void fill_random(std::span<uint8_t> out) = 0;
    virtual void log(const std::string& line) { (void)line; }
    /// Observation hook fired when this node learns the round's producer.
    virtual void note_selection(const Digest& selected, uint64_t round, uint32_t attempt) {
        (void)selected;
        (void)round;
        (void)attempt;
    }
};

enum class SubmitStatus { Accepted, BadSignature, UnknownSubmitter, Duplicate };

inline const char* submit_status_name(SubmitStatus s) {
    switch (s) {
        case SubmitStatus::Accepted: return "ACCEPTED";
        case SubmitStatus::BadSignature: return "BAD_SIGNATURE";
        case SubmitStatus::UnknownSubmitter: return "UNKNOWN_SUBMITTER";
        case SubmitStatus::Duplicate: return "DUPLICATE";
    }
    return "UNKNOWN";
}

struct SubmitResult {
    SubmitStatus status = SubmitStatus::Accepted;
    std::string detail;
    bool accepted() const { return status == SubmitStatus::Accepted; }
};

enum class Phase { Idle, Commit, Reveal, Produce };

class MinerNode {
  public:
    struct Stats {
        uint64_t rounds_started = 0;
        uint64_t attempts_restarted = 0;
        uint64_t blocks_produced = 0;
        uint64_t blocks_accepted = 0;  // produced by peers, adopted here
        uint64_t proposals_rejected = 0;
        uint64_t frames_dropped = 0;
        uint64_t equivocations = 0;
        uint64_t catchup_requests = 0;
        uint64_t reorged_blocks = 0;
    };

    MinerNode(NodeHost& host, ChainStore& chain, KeyPair key, MinerRegistry miners,
              KeyRegistry authors, ConsensusConfig cfg)
        : host_(host),
          chain_(chain),
          key_(std::move(key)),
          miners_(std::move(miners)),
          authors_(std::move(authors)),
          cfg_(cfg) {
        for (const auto& b : chain_.blocks())
            for (const auto& t : b.transactions) onchain_.insert(compute_txn_digest(t));
    }

    void start() {
        round_ = chain_.tip_height() + 1;
        phase_ = Phase::Idle;
        // ask peers where the chain is in case we were down
        send_catchup_request_broadcast();
        arm_timer(cfg_.first_round_delay_ms);
    }

    /// Transport delivery: raw frame in, drop or dispatch.
    void on_frame(std::span<const uint8_t> frame) {
        Envelope env;
        try {
            env = wire_decode(frame);
        } catch (const std::exception& e) {
            drop(std::string("undecodable frame: ") + e.what());
            return;
        }
        const PublicKey* sender_pk = miners_.find(env.sender_key_id);
        if (!sender_pk && env.msg_type == MsgType::TxnSubmit) sender_pk = authors_.find(env.sender_key_id);
        if (!sender_pk) {
            drop("sender not registered: " + to_hex(env.sender_key_id) + " type=" +
                 msg_type_name(env.msg_type));
            return;
        }
        if (env.signature.signer != env.sender_key_id ||
            !verify_memo(envelope_signing_bytes(env), env.signature, *sender_pk)) {
            drop("envelope signature invalid from " + to_hex(env.sender_key_id));
            return;
        }
        dispatch(std::move(env));
    }

    void on_timer(uint64_t token) {
        if (token != timer_gen_) return;  // superseded deadline
        switch (phase_) {
            case Phase::Idle: start_round(); break;
            case Phase::Commit: close_commit_phase(); break;
            case Phase::Reveal: close_reveal_phase(); break;
            case Phase::Produce:
                if (producing_self_)
                    produce_block();
                else
                    produce_timeout();
                break;
        }
    }

    /// Local submission (HTTP client or gossip path).
    SubmitResult submit_transaction(const Transaction& txn) {
        ValidationResult v = verify_transaction(txn, authors_);
        if (v.code == ValidationCode::UnknownSubmitter)
            return {SubmitStatus::UnknownSubmitter, v.detail};
        if (!v.ok()) return {SubmitStatus::BadSignature, v.detail};
        Digest d = compute_txn_digest(txn);
        if (pool_.count(d) || onchain_.count(d))
            return {SubmitStatus::Duplicate, "transaction already known"};
        pool_.emplace(d, txn);
        Envelope env = make_envelope(MsgType::TxnSubmit, round_, attempt_,
                                     encode_txn_submit_payload(txn), key_);
        host_.broadcast(wire_encode(env));
        return {SubmitStatus::Accepted, {}};
    }

    const ChainStore& chain() const { return chain_; }
    const Digest& key_id() const { return key_.key_id; }
    uint64_t round() const { return round_; }
    uint32_t attempt() const { return attempt_; }
    Phase phase() const { return phase_; }
    size_t pool_size() const { return pool_.size(); }
    const Stats& stats() const { return stats_; }
    const std::map<Digest, uint32_t>& strikes() const { return strikes_; }
    const std::set<Digest>& excluded_this_round() const { return excluded_; }

  private:
    struct CommitInfo {
        Digest commitment;
        std::vector<Digest> txn_digests;
        Signature attestation;
    };

    void drop(const std::string& why) {
        ++stats_.frames_dropped;
        host_.log("drop: " + why);
    }

    void arm_timer(uint64_t delay_ms) { host_.schedule_timer(delay_ms, ++timer_gen_); }

    void dispatch(Envelope env) {
        switch (env.msg_type) {
            case MsgType::Commit: on_commit(std::move(env)); break;
            case MsgType::Reveal: on_reveal(std::move(env)); break;
            case MsgType::Proposal: on_proposal(std::move(env)); break;
            case MsgType::ChainRequest: on_chain_request(std::move(env)); break;
            case MsgType::ChainResponse: on_chain_response(std::move(env)); break;
            case MsgType::TxnSubmit: on_txn_submit(std::move(env)); break;
        }
    }

    // ---- round lifecycle -------------------------------------------------

    void start_round() {
        round_ = chain_.tip_height() + 1;
        attempt_ = 0;
        excluded_.clear();
        ++stats_.rounds_started;
        enter_commit();
    }

    void enter_commit() {
        phase_ = Phase::Commit;
        producing_self_ = false;
        selected_.reset();
        commits_.clear();
        reveals_.clear();
        host_.fill_random(my_nonce_);
        Digest commitment = compute_commitment(my_nonce_, round_, attempt_);
        CommitPayload payload;
        payload.commitment = commitment;
        for (const auto& [digest, txn] : pool_)
            if (!onchain_.count(digest)) payload.txn_digests.push_back(digest);
        payload.attestation = sign(attestation_signing_bytes(round_, attempt_, commitment), key_);
        commits_[key_.key_id] = CommitInfo{commitment, payload.txn_digests, payload.attestation};
        Envelope env = make_envelope(MsgType::Commit, round_, attempt_, encode_payload(payload), key_);
        host_.broadcast(wire_encode(env));
        arm_timer(cfg_.commit_timeout_ms);
        drain(pending_commits_);
    }

    void enter_reveal() {
        phase_ = Phase::Reveal;
        RevealPayload payload{my_nonce_};
        reveals_[key_.key_id] = my_nonce_;
        Envelope env = make_envelope(MsgType::Reveal, round_, attempt_, encode_payload(payload), key_);
        host_.broadcast(wire_encode(env));
        arm_timer(cfg_.reveal_timeout_ms);
        drain(pending_reveals_);
        if (phase_ == Phase::Reveal && reveals_.size() == commits_.size()) close_reveal_phase();
    }

    void restart_attempt() {
        ++attempt_;
        ++stats_.attempts_restarted;
        if (excluded_.size() >= miners_.size()) excluded_.clear();
        enter_commit();
    }

    bool subset_acceptable(size_t got) const {
        if (got * 2 > miners_.size()) return true;  // strict majority of registered miners
        return attempt_ >= cfg_.degrade_after_attempts && got >= 1;
    }

    void close_commit_phase() {
        if (subset_acceptable(commits_.size()))
            enter_reveal();
        else
            restart_attempt();
    }

    void close_reveal_phase() {
        if (!subset_acceptable(reveals_.size())) {
            restart_attempt();
            return;
        }
        selected_ = select_miner(reveals_, round_, attempt_);
        phase_ = Phase::Produce;
        host_.note_selection(*selected_, round_, attempt_);
        if (*selected_ == key_.key_id) {
            producing_self_ = true;
            arm_timer(0);  // produce as a separate event
        } else {
            producing_self_ = false;
            arm_timer(cfg_.produce_timeout_ms);
        }
    }

    void produce_block() {
        Block b;
        b.height = round_;
        b.prev_hash = compute_block_hash(chain_.tip());
        b.timestamp = host_.now_ms();
        b.miner_key_id = key_.key_id;
        for (const auto& [digest, txn] : pool_) {
            if (onchain_.count(digest)) continue;
            if (b.transactions.size() >= cfg_.max_block_txns) break;
            b.transactions.push_back(txn);
        }
        b.mining_record.round = round_;
        b.mining_record.attempt = attempt_;
        for (const auto& [kid, nonce] : reveals_) {
            const CommitInfo& ci = commits_.at(kid);
            b.mining_record.participants.push_back(
                MiningParticipant{kid, ci.commitment, nonce, ci.attestation});
        }
        sign_block(b, key_);
        adopt_block(b);
        ++stats_.blocks_produced;
        Envelope env = make_envelope(MsgType::Proposal, round_, attempt_,
                                     encode_proposal_payload(b), key_);
        host_.broadcast(wire_encode(env));
        finish_round();
    }

    void produce_timeout() {
        if (selected_) {
            excluded_.insert(*selected_);
            ++strikes_[*selected_];
            host_.log("producer timed out, excluding " + to_hex(*selected_) + " for round " +
                      std::to_string(round_));
        }
        restart_attempt();
    }

    void finish_round() {
        phase_ = Phase::Idle;
        round_ = chain_.tip_height() + 1;
        attempt_ = 0;
        excluded_.clear();
        commits_.clear();
        reveals_.clear();
        selected_.reset();
        producing_self_ = false;
        prune_buffers();
        arm_timer(cfg_.block_interval_ms);
    }

    /// Durable append plus pool bookkeeping. The caller has validated.
    void adopt_block(const Block& b) {
        chain_.append(b);
        for (const auto& t : b.transactions) {
            Digest d = compute_txn_digest(t);
            onchain_.insert(d);
            pool_.erase(d);
        }
    }

    // ---- message handlers --------------------------------------------------

    enum class Gate { Process, Buffered, Ignored };

    /// Common round/attempt gating for commit and reveal traffic.
    Gate gate_round_message(const Envelope& env, std::map<uint64_t, std::vector<Envelope>>& buffer,
                            bool processable_now) {
        if (env.round < round_) return Gate::Ignored;
        if (env.round > round_) {
            maybe_request_catchup(env.sender_key_id, env.round);
            if (env.round == round_ + 1) {
                buffer[env.round].push_back(env);
                return Gate::Buffered;
            }
            return Gate::Ignored;
        }
        if (env.attempt > attempt_) {
            buffer[env.round].push_back(env);
            return Gate::Buffered;
        }
        if (env.attempt < attempt_) return Gate::Ignored;
        if (!processable_now) {
            buffer[env.round].push_back(env);
            return Gate::Buffered;
        }
        return Gate::Process;
    }

    void on_commit(Envelope env) {
        Gate g = gate_round_message(env, pending_commits_, phase_ == Phase::Commit);
        if (g != Gate::Process) return;
        process_commit(env);
    }

    void process_commit(const Envelope& env) {
        const Digest& sender = env.sender_key_id;
        if (!miners_.contains(sender)) return drop("commit from non-miner");
        if (excluded_.count(sender)) return;
        CommitPayload payload;
        try {
            payload = decode_commit_payload(env.payload);
        } catch (const std::exception& e) {
            return drop(std::string("bad commit payload: ") + e.what());
        }
        auto it = commits_.find(sender);
        if (it != commits_.end()) {
            if (it->second.commitment == payload.commitment) return;  // duplicate resend
            // two different commits for the same round and attempt
            ++stats_.equivocations;
            ++strikes_[sender];
            excluded_.insert(sender);
            commits_.erase(sender);
            reveals_.erase(sender);
            host_.log("equivocating commit from " + to_hex(sender) + ", excluded this round");
            return;
        }
        const PublicKey* pk = miners_.find(sender);
        if (payload.attestation.signer != sender ||
            !verify_memo(attestation_signing_bytes(round_, attempt_, payload.commitment),
                         payload.attestation, *pk))
            return drop("commit attestation invalid from " + to_hex(sender));
        commits_.emplace(sender,
                         CommitInfo{payload.commitment, std::move(payload.txn_digests),
                                    payload.attestation});
        if (commits_.size() == eligible_miner_count()) close_commit_phase();
    }

    void on_reveal(Envelope env) {
        Gate g = gate_round_message(env, pending_reveals_, phase_ == Phase::Reveal);
        if (g != Gate::Process) return;
        process_reveal(env);
    }

    void process_reveal(const Envelope& env) {
        const Digest& sender = env.sender_key_id;
        if (excluded_.count(sender)) return;
        auto cit = commits_.find(sender);
        if (cit == commits_.end()) return drop("reveal without prior commit from " + to_hex(sender));
        if (reveals_.count(sender)) return;
        RevealPayload payload;
        try {
            payload = decode_reveal_payload(env.payload);
        } catch (const std::exception& e) {
            return drop(std::string("bad reveal payload: ") + e.what());
        }
        if (compute_commitment(payload.nonce, round_, attempt_) != cit->second.commitment) {
            ++strikes_[sender];
            excluded_.insert(sender);
            commits_.erase(sender);
            host_.log("reveal does not match commitment from " + to_hex(sender) + ", excluded");
            return;
        }
        reveals_.emplace(sender, payload.nonce);
        if (reveals_.size() == commits_.size()) close_reveal_phase();
    }

    void on_proposal(Envelope env) {
        Block b;
        try {
            b = decode_proposal_payload(env.payload);
        } catch (const std::exception& e) {
            return drop(std::string("bad proposal payload: ") + e.what());
        }
        if (b.miner_key_id != env.sender_key_id) {
            ++stats_.proposals_rejected;
            return drop("proposal relayed by non-producer");
        }
        uint64_t tip = chain_.tip_height();
        if (b.height <= tip) return;  // already have this height
        if (b.height > tip + 1) {
            maybe_request_catchup(env.sender_key_id, b.height);
            return;
        }
        ValidationResult v = verify_block(b, &chain_.tip(), miners_, authors_);
        if (!v.ok()) {
            ++stats_.proposals_rejected;
            host_.log(std::string("REJECT proposal at height ") + std::to_string(b.height) + ": " +
                      validation_code_name(v.code) + " (" + v.detail + ")");
            return;
        }
        adopt_block(b);
        ++stats_.blocks_accepted;
        finish_round();
    }

    void on_chain_request(Envelope env) {
        ChainRequestPayload req;
        try {
            req = decode_chain_request_payload(env.payload);
        } catch (const std::exception& e) {
            return drop(std::string("bad chain request: ") + e.what());
        }
        std::vector<Block> blocks = chain_.range(req.from_height, cfg_.chain_response_max_blocks);
        Envelope resp = make_envelope(MsgType::ChainResponse, round_, attempt_,
                                      encode_chain_response_payload(blocks), key_);
        host_.send(env.sender_key_id, wire_encode(resp));
    }

    void on_chain_response(Envelope env) {
        std::vector<Block> blocks;
        try {
            blocks = decode_chain_response_payload(env.payload);
        } catch (const std::exception& e) {
            return drop(std::string("bad chain response: ") + e.what());
        }
        if (blocks.empty()) return;
        bool adopted = try_adopt_chain(blocks);
        if (adopted) finish_round();
    }

    /// Adopt the longest valid chain consistent with a shared prefix. A
    /// same-length or shorter candidate never replaces local blocks; a
    /// longer one may replace an unacknowledged local tail (a block this
    /// node produced but no peer ever saw).
    bool try_adopt_chain(const std::vector<Block>& blocks) {
        uint64_t tip = chain_.tip_height();
        uint64_t first = blocks.front().height;
        for (size_t i = 1; i < blocks.size(); ++i)
            if (blocks[i].height != first + i) return false;
        uint64_t last = blocks.back().height;
        if (last <= tip) return false;
        if (first > tip + 1) return false;  // does not connect to anything we have
        // position of the first candidate block that extends what we keep
        uint64_t fork = first;
        while (fork <= tip && fork <= last) {
            const Block& candidate = blocks[fork - first];
            if (compute_block_hash(candidate) != compute_block_hash(chain_.at(fork))) break;
            ++fork;
        }
        if (fork > last) return false;  // candidate is a prefix of ours
        // validate the candidate suffix before touching anything
        const Block* prev = &chain_.at(fork - 1);
        for (uint64_t h = fork; h <= last; ++h) {
            const Block& candidate = blocks[h - first];
            ValidationResult v = verify_block(candidate, prev, miners_, authors_);
            if (!v.ok()) {
                host_.log("catch-up chain invalid at height " + std::to_string(h) + ": " +
                          validation_code_name(v.code));
                return false;
            }
            prev = &candidate;
        }
        if (fork <= tip) {
            stats_.reorged_blocks += tip - fork + 1;
            host_.log("replacing local suffix from height " + std::to_string(fork) +
                      " with longer valid chain to " + std::to_string(last));
            chain_.replace_from(fork);
            rebuild_onchain_index();
        }
        for (uint64_t h = fork; h <= last; ++h) adopt_block(blocks[h - first]);
        return true;
    }

    void rebuild_onchain_index() {
        onchain_.clear();
        for (const auto& b : chain_.blocks())
            for (const auto& t : b.transactions) onchain_.insert(compute_txn_digest(t));
    }

    void on_txn_submit(Envelope env) {
        Transaction txn;
        try {
            txn = decode_txn_submit_payload(env.payload);
        } catch (const std::exception& e) {
            return drop(std::string("bad txn payload: ") + e.what());
        }
        ValidationResult v = verify_transaction(txn, authors_);
        if (!v.ok()) return drop("gossiped txn invalid: " + std::string(validation_code_name(v.code)));
        Digest d = compute_txn_digest(txn);
        if (pool_.count(d) || onchain_.count(d)) return;  // seen before; do not re-gossip
        pool_.emplace(d, txn);
        Envelope fwd = make_envelope(MsgType::TxnSubmit, round_, attempt_,
                                     encode_txn_submit_payload(txn), key_);
        host_.broadcast(wire_encode(fwd));
    }

    // ---- helpers -----------------------------------------------------------

    size_t eligible_miner_count() const {
        size_t excluded_registered = 0;
        for (const auto& kid : excluded_)
            if (miners_.contains(kid)) ++excluded_registered;
        return miners_.size() - excluded_registered;
    }

    void maybe_request_catchup(const Digest& peer, uint64_t their_round) {
        (void)their_round;
        if (peer.is_zero()) return;
        uint64_t now = host_.now_ms();
        if (last_catchup_ms_ && now < *last_catchup_ms_ + cfg_.commit_timeout_ms / 2) return;
        last_catchup_ms_ = now;
        ++stats_.catchup_requests;
        ChainRequestPayload req{chain_.tip_height() + 1};
        Envelope env =
            make_envelope(MsgType::ChainRequest, round_, attempt_, encode_payload(req), key_);
        host_.send(peer, wire_encode(env));
    }

    void send_catchup_request_broadcast() {
        ChainRequestPayload req{chain_.tip_height() + 1};
        Envelope env =
            make_envelope(MsgType::ChainRequest, round_, attempt_, encode_payload(req), key_);
        host_.broadcast(wire_encode(env));
    }

    void drain(std::map<uint64_t, std::vector<Envelope>>& buffer) {
        auto it = buffer.find(round_);
        if (it == buffer.end()) return;
        std::vector<Envelope> batch = std::move(it->second);
        buffer.erase(it);
        for (auto& env : batch) {
            if (env.round != round_) continue;
            if (env.msg_type == MsgType::Commit)
                on_commit(std::move(env));
            else if (env.msg_type == MsgType::Reveal)
                on_reveal(std::move(env));
        }
    }

    void prune_buffers() {
        for (auto* buf : {&pending_commits_, &pending_reveals_}) {
            for (auto it = buf->begin(); it != buf->end();) {
                if (it->first < round_ || it->first > round_ + 1)
                    it = buf->erase(it);
                else
                    ++it;
            }
        }
    }

    NodeHost& host_;
    ChainStore& chain_;
    KeyPair key_;
    MinerRegistry miners_;
    KeyRegistry authors_;
    ConsensusConfig cfg_;

    Phase phase_ = Phase::Idle;
    uint64_t round_ = 1;
    uint32_t attempt_ = 0;
    std::array<uint8_t, 32> my_nonce_{};
    std::map<Digest, CommitInfo> commits_;
    std::map<Digest, std::array<uint8_t, 32>> reveals_;
    std::set<Digest> excluded_;
    std::map<Digest, uint32_t> strikes_;
    std::optional<Digest> selected_;
    bool producing_self_ = false;
    uint64_t timer_gen_ = 0;
    std::optional<uint64_t> last_catchup_ms_;

    std::map<Digest, Transaction> pool_;
    std::set<Digest> onchain_;
    std::map<uint64_t, std::vector<Envelope>> pending_commits_;
    std::map<uint64_t, std::vector<Envelope>> pending_reveals_;

    Stats stats_;
};

}  // namespace scrybe
