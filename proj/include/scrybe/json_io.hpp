// Copyright 2026 the Scrybe Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or
// at http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "scrybe/replay.hpp"
#include "scrybe/validate.hpp"

// Text interchange format: one JSON object per value, field names matching
// the binary layout's declaration order. Digests and keys are lowercase
// hex; signatures are 128 hex characters plus the signer's key id. The
// binary canonical encoding remains the only input to hashing and signing.

namespace scrybe {

using json = nlohmann::json;

inline json to_json(const Signature& s) {
    return json{{"bytes", to_hex(std::span<const uint8_t>(s.bytes))}, {"signer", to_hex(s.signer)}};
}

inline Signature signature_from_json(const json& j) {
    Signature s;
    Bytes raw = from_hex(j.at("bytes").get<std::string>());
    if (raw.size() != s.bytes.size()) throw std::invalid_argument("signature must be 128 hex characters");
    std::copy(raw.begin(), raw.end(), s.bytes.begin());
    s.signer = digest_from_hex(j.at("signer").get<std::string>());
    return s;
}

inline json to_json(const FieldOp& op) {
    json j{{"record_id", op.record_id},
           {"field_name", op.field_name},
           {"op", op.op == FieldOpKind::Set ? "SET" : "DELETE"}};
    if (op.new_value) j["new_value"] = *op.new_value;
    return j;
}

inline FieldOp field_op_from_json(const json& j) {
    FieldOp op;
    op.record_id = j.at("record_id").get<std::string>();
    op.field_name = j.at("field_name").get<std::string>();
    std::string kind = j.at("op").get<std::string>();
    if (kind == "SET")
        op.op = FieldOpKind::Set;
    else if (kind == "DELETE")
        op.op = FieldOpKind::Delete;
    else
        throw std::invalid_argument("op must be SET or DELETE");
    if (j.contains("new_value") && !j.at("new_value").is_null())
        op.new_value = j.at("new_value").get<std::string>();
    return op;
}

inline json to_json(const ChangelogEntry& e) {
    json muts = json::array();
    for (const auto& m : e.mutation) muts.push_back(to_json(m));
    return json{{"entry_id", e.entry_id},
                {"trial_id", e.trial_id},
                {"timestamp", e.timestamp},
                {"author_key_id", to_hex(e.author_key_id)},
                {"mutation", std::move(muts)},
                {"entry_signature", to_json(e.entry_signature)}};
}

inline ChangelogEntry entry_from_json(const json& j) {
    ChangelogEntry e;
    e.entry_id = j.at("entry_id").get<uint64_t>();
    e.trial_id = j.at("trial_id").get<std::string>();
    e.timestamp = j.at("timestamp").get<uint64_t>();
    e.author_key_id = digest_from_hex(j.at("author_key_id").get<std::string>());
    for (const auto& m : j.at("mutation")) e.mutation.push_back(field_op_from_json(m));
    e.entry_signature = signature_from_json(j.at("entry_signature"));
    return e;
}

inline json to_json(const Transaction& t) {
    return json{{"entry_id", t.entry_id},
                {"trial_id", t.trial_id},
                {"timestamp", t.timestamp},
                {"entry_hash", to_hex(t.entry_hash)},
                {"entry_signature_copy", to_json(t.entry_signature_copy)},
                {"submitter_key_id", to_hex(t.submitter_key_id)},
                {"txn_signature", to_json(t.txn_signature)}};
}

inline Transaction transaction_from_json(const json& j) {
    Transaction t;
    t.entry_id = j.at("entry_id").get<uint64_t>();
    t.trial_id = j.at("trial_id").get<std::string>();
    t.timestamp = j.at("timestamp").get<uint64_t>();
    t.entry_hash = digest_from_hex(j.at("entry_hash").get<std::string>());
    t.entry_signature_copy = signature_from_json(j.at("entry_signature_copy"));
    t.submitter_key_id = digest_from_hex(j.at("submitter_key_id").get<std::string>());
    t.txn_signature = signature_from_json(j.at("txn_signature"));
    return t;
}

inline json to_json(const MiningRecord& mr) {
    json parts = json::array();
    for (const auto& p : mr.participants) {
        parts.push_back(json{{"miner_key_id", to_hex(p.miner_key_id)},
                             {"commitment", to_hex(p.commitment)},
                             {"reveal", to_hex(std::span<const uint8_t>(p.reveal))},
                             {"participant_signature", to_json(p.participant_signature)}});
    }
    return json{{"round", mr.round}, {"attempt", mr.attempt}, {"participants", std::move(parts)}};
}

inline MiningRecord mining_record_from_json(const json& j) {
    MiningRecord mr;
    mr.round = j.at("round").get<uint64_t>();
    mr.attempt = j.at("attempt").get<uint32_t>();
    for (const auto& pj : j.at("participants")) {
        MiningParticipant p;
        p.miner_key_id = digest_from_hex(pj.at("miner_key_id").get<std::string>());
        p.commitment = digest_from_hex(pj.at("commitment").get<std::string>());
        Bytes raw = from_hex(pj.at("reveal").get<std::string>());
        if (raw.size() != 32) throw std::invalid_argument("reveal must be 64 hex characters");
        std::copy(raw.begin(), raw.end(), p.reveal.begin());
        p.participant_signature = signature_from_json(pj.at("participant_signature"));
        mr.participants.push_back(std::move(p));
    }
    return mr;
}

inline json to_json(const Block& b) {
    json txns = json::array();
    for (const auto& t : b.transactions) txns.push_back(to_json(t));
    return json{{"height", b.height},
                {"prev_hash", to_hex(b.prev_hash)},
                {"timestamp", b.timestamp},
                {"miner_key_id", to_hex(b.miner_key_id)},
                {"transactions", std::move(txns)},
                {"mining_record", to_json(b.mining_record)},
                {"miner_signature", to_json(b.miner_signature)}};
}

inline Block block_from_json(const json& j) {
    Block b;
    b.height = j.at("height").get<uint64_t>();
    b.prev_hash = digest_from_hex(j.at("prev_hash").get<std::string>());
    b.timestamp = j.at("timestamp").get<uint64_t>();
    b.miner_key_id = digest_from_hex(j.at("miner_key_id").get<std::string>());
    for (const auto& tj : j.at("transactions")) b.transactions.push_back(transaction_from_json(tj));
    b.mining_record = mining_record_from_json(j.at("mining_record"));
    b.miner_signature = signature_from_json(j.at("miner_signature"));
    return b;
}

inline json to_json(const MinerRegistry& reg) {
    json miners = json::array();
    for (const auto& [kid, pk] : reg.miners)
        miners.push_back(json{{"miner_key_id", to_hex(kid)},
                              {"public_key", to_hex(std::span<const uint8_t>(pk.bytes))}});
    return json{{"registry_version", reg.registry_version}, {"miners", std::move(miners)}};
}

inline MinerRegistry registry_from_json(const json& j) {
    MinerRegistry reg;
    reg.registry_version = j.at("registry_version").get<uint64_t>();
    for (const auto& mj : j.at("miners")) {
        PublicKey pk = public_key_from_hex(mj.at("public_key").get<std::string>());
        Digest kid = digest_from_hex(mj.at("miner_key_id").get<std::string>());
        if (kid != key_id_of(pk)) throw std::invalid_argument("miner_key_id does not match public key");
        if (!reg.miners.emplace(kid, pk).second)
            throw std::invalid_argument("duplicate key id in registry");
    }
    if (reg.miners.empty()) throw std::invalid_argument("registry must not be empty");
    return reg;
}

inline json to_json(const RecordStoreState& s) {
    json recs = json::object();
    for (const auto& [rid, fields] : s.records) {
        json f = json::object();
        for (const auto& [name, value] : fields) f[name] = value;
        recs[rid] = std::move(f);
    }
    return json{{"records", std::move(recs)}};
}

inline RecordStoreState record_state_from_json(const json& j) {
    RecordStoreState s;
    for (const auto& [rid, fields] : j.at("records").items())
        for (const auto& [name, value] : fields.items())
            s.records[rid][name] = value.get<std::string>();
    return s;
}

// ---------------------------------------------------------------------------
// Files
// ---------------------------------------------------------------------------

inline json load_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open " + path);
    json j;
    in >> j;
    return j;
}

inline void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << contents;
    out.flush();
    if (!out) throw std::runtime_error("short write to " + path);
}

inline MinerRegistry load_registry(const std::string& path) {
    return registry_from_json(load_json_file(path));
}

inline void save_registry(const MinerRegistry& reg, const std::string& path) {
    write_file(path, to_json(reg).dump(2) + "\n");
}

}  // namespace scrybe
