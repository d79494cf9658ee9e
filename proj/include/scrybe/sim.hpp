// Copyright 2026 the Scrybe Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or
// at http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <deque>
#include <memory>
#include <queue>
#include <random>
#include <sstream>

#include <json.hpp>

#include "scrybe/consensus.hpp"

namespace scrybe {

// Deterministic discrete-event network simulator. Given the same topology,
// fault plan, and seed, a run reproduces the same event trace byte for
// byte: every random stream (per-node nonces, per-link delays and drops,
// crash policy) is derived independently from the seed, so adding
// or removing one actor never perturbs the streams of the others.

struct LinkFault {
    double drop_probability = 0.0;
    uint64_t delay_min_ms = 1;
    uint64_t delay_max_ms = 5;
};

struct Partition {
    uint64_t start_ms = 0;
    uint64_t end_ms = 0;
    std::vector<std::vector<size_t>> groups;
    bool deliver_on_heal = true;  // otherwise messages crossing the cut are lost
};

struct CrashEvent {
    size_t node = 0;
    uint64_t at_ms = 0;
    std::optional<uint64_t> restart_at_ms;
};

/// Crashes the round's selected producer after selection but before it
/// builds, with a per-round probability.
struct ProducerCrashPolicy {
    double probability = 0.2;
    uint64_t restart_delay_ms = 2000;
    uint64_t max_round = UINT64_MAX;
};

struct FaultPlan {
    LinkFault default_link;
    std::map<std::pair<size_t, size_t>, LinkFault> link_overrides;
    std::vector<Partition> partitions;
    std::vector<CrashEvent> crash_schedule;
    std::optional<ProducerCrashPolicy> crash_selected_producer;

    const LinkFault& link(size_t src, size_t dst) const {
        auto it = link_overrides.find({src, dst});
        return it == link_overrides.end() ? default_link : it->second;
    }

    void validate(size_t n_nodes) const {
        auto check_prob = [](double p) {
            if (p < 0.0 || p > 1.0) throw std::invalid_argument("probability outside [0,1]");
        };
        check_prob(default_link.drop_probability);
        if (default_link.delay_max_ms < default_link.delay_min_ms)
            throw std::invalid_argument("delay max below min");
        for (const auto& [key, lf] : link_overrides) {
            check_prob(lf.drop_probability);
            if (lf.delay_max_ms < lf.delay_min_ms) throw std::invalid_argument("delay max below min");
        }
        if (crash_selected_producer) check_prob(crash_selected_producer->probability);
        std::map<size_t, std::vector<std::pair<uint64_t, uint64_t>>> per_node;
        for (const auto& c : crash_schedule) {
            if (c.node >= n_nodes) throw std::invalid_argument("crash schedule names unknown node");
            uint64_t end = c.restart_at_ms.value_or(UINT64_MAX);
            if (end <= c.at_ms) throw std::invalid_argument("restart not after crash");
            per_node[c.node].push_back({c.at_ms, end});
        }
        for (auto& [node, spans] : per_node) {
            std::sort(spans.begin(), spans.end());
            for (size_t i = 1; i < spans.size(); ++i)
                if (spans[i].first < spans[i - 1].second)
                    throw std::invalid_argument("overlapping crash schedule for node " +
                                                std::to_string(node));
        }
        for (const auto& p : partitions) {
            if (p.end_ms <= p.start_ms) throw std::invalid_argument("partition ends before it starts");
            for (const auto& g : p.groups)
                for (size_t n : g)
                    if (n >= n_nodes) throw std::invalid_argument("partition names unknown node");
        }
    }

    static FaultPlan from_json(const nlohmann::json& j) {
        FaultPlan plan;
        if (j.contains("default_drop_probability"))
            plan.default_link.drop_probability = j.at("default_drop_probability").get<double>();
        if (j.contains("default_delay")) {
            plan.default_link.delay_min_ms = j.at("default_delay").at("min_ms").get<uint64_t>();
            plan.default_link.delay_max_ms = j.at("default_delay").at("max_ms").get<uint64_t>();
        }
        if (j.contains("drop_probability"))
            for (const auto& e : j.at("drop_probability")) {
                auto key = std::make_pair(e.at("src").get<size_t>(), e.at("dst").get<size_t>());
                LinkFault lf = plan.link(key.first, key.second);
                lf.drop_probability = e.at("probability").get<double>();
                plan.link_overrides[key] = lf;
            }
        if (j.contains("delays"))
            for (const auto& e : j.at("delays")) {
                auto key = std::make_pair(e.at("src").get<size_t>(), e.at("dst").get<size_t>());
                LinkFault lf = plan.link(key.first, key.second);
                lf.delay_min_ms = e.at("min_ms").get<uint64_t>();
                lf.delay_max_ms = e.at("max_ms").get<uint64_t>();
                plan.link_overrides[key] = lf;
            }
        if (j.contains("partitions"))
            for (const auto& e : j.at("partitions")) {
                Partition p;
                p.start_ms = e.at("start_ms").get<uint64_t>();
                p.end_ms = e.at("end_ms").get<uint64_t>();
                for (const auto& g : e.at("groups")) p.groups.push_back(g.get<std::vector<size_t>>());
                if (e.contains("deliver_on_heal")) p.deliver_on_heal = e.at("deliver_on_heal").get<bool>();
                plan.partitions.push_back(std::move(p));
            }
        if (j.contains("crash_schedule"))
            for (const auto& e : j.at("crash_schedule")) {
                CrashEvent c;
                c.node = e.at("node").get<size_t>();
                c.at_ms = e.at("at_ms").get<uint64_t>();
                if (e.contains("restart_at_ms") && !e.at("restart_at_ms").is_null())
                    c.restart_at_ms = e.at("restart_at_ms").get<uint64_t>();
                plan.crash_schedule.push_back(c);
            }
        if (j.contains("crash_selected_producer")) {
            const auto& e = j.at("crash_selected_producer");
            ProducerCrashPolicy p;
            p.probability = e.at("probability").get<double>();
            if (e.contains("restart_delay_ms")) p.restart_delay_ms = e.at("restart_delay_ms").get<uint64_t>();
            if (e.contains("max_round")) p.max_round = e.at("max_round").get<uint64_t>();
            plan.crash_selected_producer = p;
        }
        return plan;
    }
};

struct ScriptedSubmit {
    uint64_t time_ms = 0;
    size_t node = 0;
    Transaction txn;
};

class Simulation {
  public:
    struct Options {
        size_t miners = 3;
        size_t rogues = 0;
        uint64_t seed = 1;
        uint64_t duration_ms = 60'000;
        std::optional<uint64_t> stop_at_height;
        ConsensusConfig consensus;
        FaultPlan faults;
        std::optional<KeyRegistry> authors;  // defaults to the miner registry
        std::vector<ScriptedSubmit> submits;
        bool collect_trace = true;
    };

    struct Result {
        std::vector<std::string> trace;
        std::vector<std::vector<Block>> chains;  // per honest node
        std::vector<Digest> miner_key_ids;
        std::vector<uint64_t> blocks_produced;   // per honest node == selection counts
        std::vector<uint64_t> messages_sent;     // per honest node
        std::vector<MinerNode::Stats> node_stats;
        MinerRegistry registry;

        uint64_t min_height() const {
            uint64_t h = UINT64_MAX;
            for (const auto& c : chains) h = std::min<uint64_t>(h, c.back().height);
            return h;
        }

        bool prefixes_equal(uint64_t up_to) const {
            for (uint64_t h = 0; h <= up_to; ++h) {
                Digest first = compute_block_hash(chains[0].at(h));
                for (size_t i = 1; i < chains.size(); ++i)
                    if (compute_block_hash(chains[i].at(h)) != first) return false;
            }
            return true;
        }
    };

    static Result run(const Options& opts) {
        Simulation sim(opts);
        return sim.execute();
    }

    /// Deterministic keypair for a simulated miner. Exposed so tests can
    /// pre-compute registries and scripted transactions.
    static KeyPair miner_keypair(uint64_t seed, size_t index) {
        return keypair_for("sim-miner", seed, index);
    }

  private:
    // ---- actors ------------------------------------------------------------

    class SimHost;

    /// Unregistered actor that floods commits and proposals.
    class RogueMiner {
      public:
        RogueMiner(NodeHost& host, KeyPair key, uint64_t interval_ms)
            : host_(host), key_(std::move(key)), interval_ms_(interval_ms) {}

        void start() { host_.schedule_timer(interval_ms_, 0); }

        void on_timer() {
            ++round_;
            CommitPayload cp;
            host_.fill_random(cp.commitment.bytes);
            cp.attestation = sign(attestation_signing_bytes(round_, 0, cp.commitment), key_);
            host_.broadcast(
                wire_encode(make_envelope(MsgType::Commit, round_, 0, encode_payload(cp), key_)));

            Block junk;
            junk.height = round_;
            host_.fill_random(junk.prev_hash.bytes);
            junk.timestamp = host_.now_ms();
            junk.miner_key_id = key_.key_id;
            junk.mining_record.round = round_;
            MiningParticipant p;
            p.miner_key_id = key_.key_id;
            host_.fill_random(p.reveal);
            p.commitment = compute_commitment(p.reveal, round_, 0);
            p.participant_signature = sign(attestation_signing_bytes(round_, 0, p.commitment), key_);
            junk.mining_record.participants.push_back(p);
            sign_block(junk, key_);
            host_.broadcast(wire_encode(
                make_envelope(MsgType::Proposal, round_, 0, encode_proposal_payload(junk), key_)));
            host_.schedule_timer(interval_ms_, 0);
        }

      private:
        NodeHost& host_;
        KeyPair key_;
        uint64_t interval_ms_;
        uint64_t round_ = 0;
    };

    struct Slot {
        KeyPair key;
        std::unique_ptr<MemoryChainStore> store;
        std::unique_ptr<SimHost> host;
        std::unique_ptr<MinerNode> node;    // honest
        std::unique_ptr<RogueMiner> rogue;  // or rogue
        std::mt19937_64 entropy;
        bool crashed = false;
        uint64_t epoch = 0;
        uint64_t messages_sent = 0;
        uint64_t traced_height = 0;
    };

    class SimHost : public NodeHost {
      public:
        SimHost(Simulation& sim, size_t idx) : sim_(sim), idx_(idx) {}

        uint64_t now_ms() override { return sim_.now_; }
        void schedule_timer(uint64_t delay_ms, uint64_t token) override {
            sim_.push_timer(idx_, delay_ms, token);
        }
        void broadcast(const Bytes& frame) override { sim_.broadcast_from(idx_, frame); }
        void send(const Digest& peer, const Bytes& frame) override {
            sim_.send_to_key(idx_, peer, frame);
        }
        void fill_random(std::span<uint8_t> out) override {
            auto& rng = sim_.slots_[idx_].entropy;
            for (auto& b : out) b = static_cast<uint8_t>(rng());
        }
        void log(const std::string& line) override { sim_.trace_log(idx_, line); }
        void note_selection(const Digest& selected, uint64_t round, uint32_t attempt) override {
            sim_.on_selection(idx_, selected, round, attempt);
        }

      private:
        Simulation& sim_;
        size_t idx_;
    };

    // ---- events --------------------------------------------------------------

    struct Event {
        uint64_t time = 0;
        uint64_t seq = 0;
        enum class Kind { Deliver, Timer, Crash, Restart, Submit } kind = Kind::Deliver;
        size_t node = 0;
        size_t from = 0;
        Bytes frame;
        uint64_t token = 0;
        uint64_t epoch = 0;
        size_t submit_index = 0;

        bool operator>(const Event& o) const {
            if (time != o.time) return time > o.time;
            return seq > o.seq;
        }
    };

    explicit Simulation(const Options& opts) : opts_(opts) {
        size_t total = opts_.miners + opts_.rogues;
        opts_.faults.validate(total);

        for (size_t i = 0; i < opts_.miners; ++i) {
            KeyPair kp = miner_keypair(opts_.seed, i);
            registry_.miners.emplace(kp.key_id, kp.public_key);
            miner_ids_.push_back(kp.key_id);
        }
        authors_ = opts_.authors.value_or(registry_);

        for (size_t i = 0; i < total; ++i) {
            Slot slot;
            bool rogue = i >= opts_.miners;
            slot.key = rogue ? keypair_for("sim-rogue", opts_.seed, i) : miner_keypair(opts_.seed, i);
            slot.entropy.seed(derive_u64("entropy", opts_.seed, i));
            slot.host = std::make_unique<SimHost>(*this, i);
            if (rogue) {
                slot.rogue = std::make_unique<RogueMiner>(*slot.host, slot.key,
                                                          opts_.consensus.block_interval_ms);
            } else {
                slot.store = std::make_unique<MemoryChainStore>();
                slot.node = std::make_unique<MinerNode>(*slot.host, *slot.store, slot.key, registry_,
                                                        authors_, opts_.consensus);
            }
            key_to_index_.emplace(slot.key.key_id, i);
            slots_.push_back(std::move(slot));
        }
        policy_rng_.seed(derive_u64("producer-crash", opts_.seed, 0));
    }

    Result execute() {
        for (const auto& c : opts_.faults.crash_schedule) {
            push_event(make_event(c.at_ms, Event::Kind::Crash, c.node));
            if (c.restart_at_ms) push_event(make_event(*c.restart_at_ms, Event::Kind::Restart, c.node));
        }
        for (size_t i = 0; i < opts_.submits.size(); ++i) {
            Event e = make_event(opts_.submits[i].time_ms, Event::Kind::Submit, opts_.submits[i].node);
            e.submit_index = i;
            push_event(std::move(e));
        }
        for (size_t i = 0; i < slots_.size(); ++i) {
            Slot& s = slots_[i];
            if (s.node)
                s.node->start();
            else
                s.rogue->start();
        }

        while (!queue_.empty()) {
            Event ev = queue_.top();
            queue_.pop();
            if (ev.time > opts_.duration_ms) break;
            now_ = ev.time;
            dispatch(ev);
            if (opts_.stop_at_height && reached_height(*opts_.stop_at_height)) break;
        }

        Result res;
        res.trace = std::move(trace_);
        res.miner_key_ids = miner_ids_;
        res.registry = registry_;
        for (size_t i = 0; i < opts_.miners; ++i) {
            res.chains.push_back(slots_[i].store->blocks());
            res.messages_sent.push_back(slots_[i].messages_sent);
            res.node_stats.push_back(slots_[i].node->stats());
        }
        res.blocks_produced.assign(opts_.miners, 0);
        // selection counts from the longest chain (every accepted height names
        // its producer)
        size_t best = 0;
        for (size_t i = 1; i < res.chains.size(); ++i)
            if (res.chains[i].size() > res.chains[best].size()) best = i;
        for (const auto& b : res.chains[best]) {
            if (b.height == 0) continue;
            for (size_t i = 0; i < miner_ids_.size(); ++i)
                if (miner_ids_[i] == b.miner_key_id) ++res.blocks_produced[i];
        }
        return res;
    }

    // ---- event plumbing ------------------------------------------------------

    Event make_event(uint64_t time, Event::Kind kind, size_t node) {
        Event e;
        e.time = time;
        e.seq = ++seq_;
        e.kind = kind;
        e.node = node;
        return e;
    }

    void push_event(Event e) { queue_.push(std::move(e)); }

    void push_timer(size_t node, uint64_t delay, uint64_t token) {
        Event e = make_event(now_ + delay, Event::Kind::Timer, node);
        e.token = token;
        e.epoch = slots_[node].epoch;
        push_event(std::move(e));
    }

    void broadcast_from(size_t src, const Bytes& frame) {
        for (size_t dst = 0; dst < slots_.size(); ++dst)
            if (dst != src) send_link(src, dst, frame);
    }

    void send_to_key(size_t src, const Digest& peer, const Bytes& frame) {
        auto it = key_to_index_.find(peer);
        if (it == key_to_index_.end()) return;
        send_link(src, it->second, frame);
    }

    void send_link(size_t src, size_t dst, const Bytes& frame) {
        if (slots_[src].crashed) return;
        ++slots_[src].messages_sent;
        MsgType t = peek_type(frame);
        trace_line("SEND", src, dst, t);
        const Partition* cut = active_partition(src, dst, now_);
        uint64_t base = now_;
        if (cut) {
            if (!cut->deliver_on_heal) {
                trace_line("DROP_PARTITION", src, dst, t);
                return;
            }
            base = cut->end_ms;
        }
        auto& rng = link_rng(src, dst);
        const LinkFault& lf = opts_.faults.link(src, dst);
        if (lf.drop_probability > 0.0) {
            double roll = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
            if (roll < lf.drop_probability) {
                trace_line("DROP_LINK", src, dst, t);
                return;
            }
        }
        uint64_t delay =
            std::uniform_int_distribution<uint64_t>(lf.delay_min_ms, lf.delay_max_ms)(rng);
        Event e = make_event(base + delay, Event::Kind::Deliver, dst);
        e.from = src;
        e.frame = frame;
        push_event(std::move(e));
    }

    void dispatch(const Event& ev) {
        Slot& slot = slots_[ev.node];
        switch (ev.kind) {
            case Event::Kind::Deliver: {
                MsgType t = peek_type(ev.frame);
                if (slot.crashed) {
                    trace_line("DROP_CRASHED", ev.from, ev.node, t);
                    return;
                }
                trace_line("DELIVER", ev.from, ev.node, t);
                if (slot.node) slot.node->on_frame(ev.frame);
                note_accepts(ev.node);
                break;
            }
            case Event::Kind::Timer: {
                if (slot.crashed || ev.epoch != slot.epoch) return;
                trace("TIMEOUT node=" + std::to_string(ev.node));
                if (slot.node)
                    slot.node->on_timer(ev.token);
                else
                    slot.rogue->on_timer();
                note_accepts(ev.node);
                break;
            }
            case Event::Kind::Crash: crash_now(ev.node, std::nullopt); break;
            case Event::Kind::Restart: {
                if (!slot.crashed) return;
                slot.crashed = false;
                ++slot.epoch;
                trace("RESTART node=" + std::to_string(ev.node));
                if (slot.store) {
                    slot.node = std::make_unique<MinerNode>(*slot.host, *slot.store, slot.key,
                                                            registry_, authors_, opts_.consensus);
                    slot.traced_height = slot.store->tip_height();
                    slot.node->start();
                } else {
                    slot.rogue->start();
                }
                break;
            }
            case Event::Kind::Submit: {
                if (slot.crashed || !slot.node) return;
                const ScriptedSubmit& s = opts_.submits[ev.submit_index];
                SubmitResult r = slot.node->submit_transaction(s.txn);
                trace("SUBMIT node=" + std::to_string(ev.node) +
                      " status=" + submit_status_name(r.status));
                break;
            }
        }
    }

    void crash_now(size_t node, std::optional<uint64_t> restart_at) {
        Slot& slot = slots_[node];
        if (slot.crashed) return;
        slot.crashed = true;
        ++slot.epoch;
        trace("CRASH node=" + std::to_string(node));
        if (restart_at) push_event(make_event(*restart_at, Event::Kind::Restart, node));
    }

    void on_selection(size_t node, const Digest& selected, uint64_t round, uint32_t attempt) {
        (void)attempt;
        if (!opts_.faults.crash_selected_producer) return;
        const auto& policy = *opts_.faults.crash_selected_producer;
        if (round > policy.max_round) return;
        if (selected != slots_[node].key.key_id) return;  // only the producer itself
        auto [it, inserted] = producer_crash_decision_.try_emplace(round, false);
        if (inserted) {
            double roll = std::uniform_real_distribution<double>(0.0, 1.0)(policy_rng_);
            it->second = roll < policy.probability;
        }
        if (!it->second || producer_crashed_round_.count(round)) return;
        producer_crashed_round_.insert(round);
        trace("CRASH_PRODUCER node=" + std::to_string(node) + " round=" + std::to_string(round));
        crash_now(node, now_ + policy.restart_delay_ms);
    }

    // ---- observation ----------------------------------------------------------

    void note_accepts(size_t node) {
        Slot& slot = slots_[node];
        if (!slot.node) return;
        uint64_t tip = slot.store->tip_height();
        while (slot.traced_height < tip) {
            ++slot.traced_height;
            const Block& b = slot.store->at(slot.traced_height);
            trace("ACCEPT node=" + std::to_string(node) + " height=" +
                  std::to_string(b.height) + " hash=" + to_hex(compute_block_hash(b)).substr(0, 12) +
                  " producer=" + to_hex(b.miner_key_id).substr(0, 12));
        }
        if (slot.traced_height > tip) slot.traced_height = tip;  // after a reorg
    }

    bool reached_height(uint64_t h) const {
        for (size_t i = 0; i < opts_.miners; ++i)
            if (slots_[i].store->tip_height() < h) return false;
        return true;
    }

    // ---- randomness -------------------------------------------------------------

    static uint64_t derive_u64(const char* label, uint64_t seed, size_t index) {
        ByteWriter w;
        w.str(label);
        w.u64(seed);
        w.u64(index);
        Digest d = hash_bytes(w.bytes());
        uint64_t out = 0;
        for (int i = 0; i < 8; ++i) out = (out << 8) | d.bytes[i];
        return out;
    }

    static KeyPair keypair_for(const char* label, uint64_t seed, size_t index) {
        ByteWriter w;
        w.str(label);
        w.u64(seed);
        w.u64(index);
        Digest d = hash_bytes(w.bytes());
        return generate_keypair(std::span<const uint8_t>(d.bytes));
    }

    std::mt19937_64& link_rng(size_t src, size_t dst) {
        auto key = std::make_pair(src, dst);
        auto it = link_rngs_.find(key);
        if (it == link_rngs_.end()) {
            std::mt19937_64 rng(derive_u64("link", opts_.seed, src * 0x10001 + dst));
            it = link_rngs_.emplace(key, std::move(rng)).first;
        }
        return it->second;
    }

    const Partition* active_partition(size_t src, size_t dst, uint64_t t) const {
        for (const auto& p : opts_.faults.partitions) {
            if (t < p.start_ms || t >= p.end_ms) continue;
            if (partition_separates(p, src, dst)) return &p;
        }
        return nullptr;
    }

    static bool partition_separates(const Partition& p, size_t a, size_t b) {
        auto group_of = [&](size_t n) -> int {
            for (size_t g = 0; g < p.groups.size(); ++g)
                for (size_t m : p.groups[g])
                    if (m == n) return static_cast<int>(g);
            return -1;  // implicit remainder group
        };
        return group_of(a) != group_of(b);
    }

    // ---- trace --------------------------------------------------------------------

    static MsgType peek_type(const Bytes& frame) {
        // frame: u32 length, tag, msg_type
        if (frame.size() < 6) return MsgType::Commit;
        return static_cast<MsgType>(frame[5]);
    }

    void trace(const std::string& line) {
        if (opts_.collect_trace) trace_.push_back("t=" + std::to_string(now_) + " " + line);
    }

    void trace_line(const char* kind, size_t src, size_t dst, MsgType t) {
        if (!opts_.collect_trace) return;
        trace_.push_back("t=" + std::to_string(now_) + " " + kind + " from=" + std::to_string(src) +
                         " to=" + std::to_string(dst) + " type=" + msg_type_name(t));
    }

    void trace_log(size_t node, const std::string& line) {
        if (opts_.collect_trace) trace_.push_back("t=" + std::to_string(now_) + " LOG node=" +
                                                  std::to_string(node) + " " + line);
    }

    Options opts_;
    MinerRegistry registry_;
    KeyRegistry authors_;
    std::vector<Digest> miner_ids_;
    std::vector<Slot> slots_;
    std::map<Digest, size_t> key_to_index_;
    std::priority_queue<Event, std::vector<Event>, std::greater<Event>> queue_;
    std::map<std::pair<size_t, size_t>, std::mt19937_64> link_rngs_;
    std::mt19937_64 policy_rng_;
    std::map<uint64_t, bool> producer_crash_decision_;
    std::set<uint64_t> producer_crashed_round_;
    uint64_t now_ = 0;
    uint64_t seq_ = 0;
    std::vector<std::string> trace_;
};

}  // namespace scrybe
