// Copyright 2026 the Scrybe Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or
// at http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <algorithm>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "scrybe/json_io.hpp"
#include "scrybe/replay.hpp"
#include "scrybe/validate.hpp"

namespace scrybe {

// Cross-checks the three copies of history: the off-chain changelog, the
// on-chain anchors, and (optionally) the live record store. Per entry:
//   - no anchoring transaction        -> WARNING (or INFO_PENDING within the
//                                        grace window for fresh entries)
//   - anchor hash != entry hash       -> ERROR_HASH_MISMATCH
//   - entry signature bad, or the anchored signature copy differs
//                                     -> ERROR_BAD_ENTRY_SIGNATURE
// An anchor with no matching entry means off-chain history was destroyed
// and is reported as an orphan transaction (an error).

enum class EntryStatus {
    Ok,
    InfoPending,
    WarningMissingTxn,
    ErrorHashMismatch,
    ErrorBadEntrySignature,
};

inline const char* entry_status_name(EntryStatus s) {
    switch (s) {
        case EntryStatus::Ok: return "OK";
        case EntryStatus::InfoPending: return "INFO_PENDING";
        case EntryStatus::WarningMissingTxn: return "WARNING_MISSING_TXN";
        case EntryStatus::ErrorHashMismatch: return "ERROR_HASH_MISMATCH";
        case EntryStatus::ErrorBadEntrySignature: return "ERROR_BAD_ENTRY_SIGNATURE";
    }
    return "UNKNOWN";
}

inline std::optional<EntryStatus> entry_status_from_name(const std::string& s) {
    for (EntryStatus st : {EntryStatus::Ok, EntryStatus::InfoPending, EntryStatus::WarningMissingTxn,
                           EntryStatus::ErrorHashMismatch, EntryStatus::ErrorBadEntrySignature})
        if (s == entry_status_name(st)) return st;
    return std::nullopt;
}

struct EntryFinding {
    uint64_t entry_id = 0;
    EntryStatus status = EntryStatus::Ok;
    std::string detail;
};

struct OrphanFinding {
    uint64_t entry_id = 0;
    uint64_t block_height = 0;
    std::string detail;
};

struct StoreDiff {
    std::string record_id;
    std::string field_name;
    std::optional<std::string> expected;  // per changelog replay
    std::optional<std::string> found;     // in the live store
};

struct StoreComparison {
    bool match = true;
    std::vector<StoreDiff> diffs;
};

struct AuditSummary {
    uint64_t entries = 0;
    uint64_t ok = 0;
    uint64_t pending = 0;
    uint64_t warnings = 0;
    uint64_t errors = 0;
    uint64_t orphans = 0;
    bool chain_ok = false;
    bool store_checked = false;
    bool store_match = false;
    bool pass = false;
};

struct AuditReport {
    std::vector<EntryFinding> per_entry;
    std::vector<OrphanFinding> orphan_transactions;
    ValidationResult chain_status;
    std::optional<StoreComparison> store_status;
    AuditSummary summary;
};

struct AuditOptions {
    /// An unanchored entry no older than this relative to the newest anchor
    /// on chain is INFO_PENDING instead of a warning (its transaction may
    /// simply not be mined yet).
    uint64_t pending_grace_ms = 0;
};

/// Field-by-field comparison of the live store against the changelog
/// replay. Reports every divergence, including whole extra records.
inline StoreComparison audit_record_store(const RecordStoreState& store,
                                          std::span<const ChangelogEntry> entries) {
    std::vector<ChangelogEntry> ordered(entries.begin(), entries.end());
    std::sort(ordered.begin(), ordered.end(),
              [](const ChangelogEntry& a, const ChangelogEntry& b) { return a.entry_id < b.entry_id; });
    RecordStoreState expected = fold_entries(ordered);

    StoreComparison cmp;
    for (const auto& [rid, fields] : expected.records) {
        auto found_rec = store.records.find(rid);
        for (const auto& [fname, value] : fields) {
            std::optional<std::string> found;
            if (found_rec != store.records.end()) {
                auto fit = found_rec->second.find(fname);
                if (fit != found_rec->second.end()) found = fit->second;
            }
            if (!found || *found != value) cmp.diffs.push_back({rid, fname, value, found});
        }
    }
    for (const auto& [rid, fields] : store.records) {
        auto exp_rec = expected.records.find(rid);
        for (const auto& [fname, value] : fields) {
            bool known = exp_rec != expected.records.end() && exp_rec->second.count(fname);
            if (!known) cmp.diffs.push_back({rid, fname, std::nullopt, value});
        }
    }
    cmp.match = cmp.diffs.empty();
    return cmp;
}

inline AuditReport audit(std::span<const ChangelogEntry> entries, const std::vector<Block>& chain,
                         const MinerRegistry& miners, const KeyRegistry& authors,
                         AuditOptions opts = {}, const RecordStoreState* store = nullptr) {
    AuditReport report;

    // index anchors by entry id; remember where each lives
    struct Anchor {
        const Transaction* txn;
        uint64_t height;
    };
    std::map<uint64_t, Anchor> anchors;
    uint64_t newest_anchor_ts = chain.empty() ? 0 : chain.back().timestamp;
    for (const auto& b : chain)
        for (const auto& t : b.transactions) {
            anchors.emplace(t.entry_id, Anchor{&t, b.height});  // first anchor wins
            newest_anchor_ts = std::max(newest_anchor_ts, t.timestamp);
        }

    std::set<uint64_t> entry_ids;
    for (const auto& e : entries) entry_ids.insert(e.entry_id);

    for (const auto& e : entries) {
        EntryFinding f;
        f.entry_id = e.entry_id;
        auto it = anchors.find(e.entry_id);
        if (it == anchors.end()) {
            if (e.timestamp + opts.pending_grace_ms >= newest_anchor_ts) {
                f.status = EntryStatus::InfoPending;
                f.detail = "no anchoring transaction yet (within grace window)";
            } else {
                f.status = EntryStatus::WarningMissingTxn;
                f.detail = "no transaction on chain anchors this entry";
            }
        } else {
            const Transaction& txn = *it->second.txn;
            Digest actual = compute_entry_hash(e);
            if (actual != txn.entry_hash) {
                f.status = EntryStatus::ErrorHashMismatch;
                f.detail = "entry hash " + to_hex(actual).substr(0, 16) +
                           "... does not match anchor " + to_hex(txn.entry_hash).substr(0, 16) +
                           "... in block " + std::to_string(it->second.height);
            } else {
                const PublicKey* author_pk = authors.find(e.author_key_id);
                bool sig_ok = author_pk && e.entry_signature.signer == e.author_key_id &&
                              verify_memo(entry_signing_bytes(e), e.entry_signature, *author_pk);
                if (!sig_ok) {
                    f.status = EntryStatus::ErrorBadEntrySignature;
                    f.detail = author_pk ? "entry signature does not verify"
                                         : "author key not registered: " + to_hex(e.author_key_id);
                } else if (txn.entry_signature_copy != e.entry_signature) {
                    f.status = EntryStatus::ErrorBadEntrySignature;
                    f.detail = "anchored signature copy differs from entry signature";
                } else {
                    f.status = EntryStatus::Ok;
                }
            }
        }
        report.per_entry.push_back(std::move(f));
    }

    for (const auto& [id, anchor] : anchors) {
        if (entry_ids.count(id)) continue;
        report.orphan_transactions.push_back(
            {id, anchor.height,
             "transaction in block " + std::to_string(anchor.height) +
                 " anchors entry " + std::to_string(id) + " which the changelog no longer has"});
    }

    report.chain_status = verify_chain(chain, miners, authors);

    if (store) report.store_status = audit_record_store(*store, entries);

    AuditSummary& s = report.summary;
    s.entries = report.per_entry.size();
    for (const auto& f : report.per_entry) {
        switch (f.status) {
            case EntryStatus::Ok: ++s.ok; break;
            case EntryStatus::InfoPending: ++s.pending; break;
            case EntryStatus::WarningMissingTxn: ++s.warnings; break;
            default: ++s.errors; break;
        }
    }
    s.orphans = report.orphan_transactions.size();
    s.chain_ok = report.chain_status.ok();
    s.store_checked = report.store_status.has_value();
    s.store_match = s.store_checked && report.store_status->match;
    s.pass = s.warnings == 0 && s.errors == 0 && s.orphans == 0 && s.chain_ok &&
             (!s.store_checked || s.store_match);
    return report;
}

// ---------------------------------------------------------------------------
// Rendering
// ---------------------------------------------------------------------------

inline std::string render_report_text(const AuditReport& r) {
    std::ostringstream out;
    out << (r.summary.pass ? "AUDIT: PASS" : "AUDIT: FAIL") << "\n";
    if (r.chain_status.ok()) {
        out << "chain: OK\n";
    } else {
        out << "chain: " << validation_code_name(r.chain_status.code) << " at height "
            << r.chain_status.height;
        if (!r.chain_status.detail.empty()) out << " (" << r.chain_status.detail << ")";
        out << "\n";
    }
    out << "entries: total=" << r.summary.entries << " ok=" << r.summary.ok
        << " pending=" << r.summary.pending << " warnings=" << r.summary.warnings
        << " errors=" << r.summary.errors << " orphans=" << r.summary.orphans << "\n";
    if (r.summary.store_checked)
        out << "store: " << (r.summary.store_match ? "MATCH" : "MISMATCH") << "\n";
    else
        out << "store: not checked\n";
    for (const auto& f : r.per_entry) {
        if (f.status == EntryStatus::Ok) continue;
        out << "entry " << f.entry_id << ": " << entry_status_name(f.status) << " - " << f.detail
            << "\n";
    }
    for (const auto& o : r.orphan_transactions)
        out << "orphan transaction entry_id=" << o.entry_id << ": " << o.detail << "\n";
    if (r.store_status && !r.store_status->match) {
        for (const auto& d : r.store_status->diffs) {
            out << "store diff " << d.record_id << "." << d.field_name << ": expected "
                << (d.expected ? "\"" + *d.expected + "\"" : std::string("<absent>")) << ", found "
                << (d.found ? "\"" + *d.found + "\"" : std::string("<absent>")) << "\n";
        }
    }
    return out.str();
}

inline json to_json(const AuditReport& r) {
    json per_entry = json::array();
    for (const auto& f : r.per_entry)
        per_entry.push_back(json{{"entry_id", f.entry_id},
                                 {"status", entry_status_name(f.status)},
                                 {"detail", f.detail}});
    json orphans = json::array();
    for (const auto& o : r.orphan_transactions)
        orphans.push_back(
            json{{"entry_id", o.entry_id}, {"block_height", o.block_height}, {"detail", o.detail}});
    json chain_status{{"ok", r.chain_status.ok()},
                      {"code", validation_code_name(r.chain_status.code)},
                      {"height", r.chain_status.height},
                      {"detail", r.chain_status.detail}};
    json store_status;
    if (r.store_status) {
        json diffs = json::array();
        for (const auto& d : r.store_status->diffs) {
            json dj{{"record_id", d.record_id}, {"field_name", d.field_name}};
            dj["expected"] = d.expected ? json(*d.expected) : json(nullptr);
            dj["found"] = d.found ? json(*d.found) : json(nullptr);
            diffs.push_back(std::move(dj));
        }
        store_status = json{{"match", r.store_status->match}, {"diffs", std::move(diffs)}};
    } else {
        store_status = nullptr;
    }
    json summary{{"entries", r.summary.entries},   {"ok", r.summary.ok},
                 {"pending", r.summary.pending},   {"warnings", r.summary.warnings},
                 {"errors", r.summary.errors},     {"orphans", r.summary.orphans},
                 {"chain_ok", r.summary.chain_ok}, {"store_checked", r.summary.store_checked},
                 {"store_match", r.summary.store_match}, {"verdict", r.summary.pass ? "PASS" : "FAIL"}};
    return json{{"per_entry", std::move(per_entry)},
                {"orphan_transactions", std::move(orphans)},
                {"chain_status", std::move(chain_status)},
                {"store_status", std::move(store_status)},
                {"summary", std::move(summary)}};
}

inline AuditReport report_from_json(const json& j) {
    AuditReport r;
    for (const auto& fj : j.at("per_entry")) {
        EntryFinding f;
        f.entry_id = fj.at("entry_id").get<uint64_t>();
        auto st = entry_status_from_name(fj.at("status").get<std::string>());
        if (!st) throw std::invalid_argument("unknown entry status");
        f.status = *st;
        f.detail = fj.at("detail").get<std::string>();
        r.per_entry.push_back(std::move(f));
    }
    for (const auto& oj : j.at("orphan_transactions")) {
        OrphanFinding o;
        o.entry_id = oj.at("entry_id").get<uint64_t>();
        o.block_height = oj.at("block_height").get<uint64_t>();
        o.detail = oj.at("detail").get<std::string>();
        r.orphan_transactions.push_back(std::move(o));
    }
    const auto& cj = j.at("chain_status");
    bool chain_ok = cj.at("ok").get<bool>();
    for (ValidationCode c :
         {ValidationCode::Ok, ValidationCode::UnknownSubmitter, ValidationCode::BadTxnSignature,
          ValidationCode::UnauthorizedMiner, ValidationCode::BadMinerSignature,
          ValidationCode::BrokenLink, ValidationCode::BadGenesis, ValidationCode::BadHeight,
          ValidationCode::MissingRecord, ValidationCode::BadMiningRecord, ValidationCode::WrongProducer,
          ValidationCode::BadTransaction, ValidationCode::EmptyChain})
        if (cj.at("code").get<std::string>() == validation_code_name(c)) r.chain_status.code = c;
    r.chain_status.height = cj.at("height").get<uint64_t>();
    r.chain_status.detail = cj.at("detail").get<std::string>();
    if (chain_ok != r.chain_status.ok()) throw std::invalid_argument("inconsistent chain status");
    if (!j.at("store_status").is_null()) {
        StoreComparison cmp;
        cmp.match = j.at("store_status").at("match").get<bool>();
        for (const auto& dj : j.at("store_status").at("diffs")) {
            StoreDiff d;
            d.record_id = dj.at("record_id").get<std::string>();
            d.field_name = dj.at("field_name").get<std::string>();
            if (!dj.at("expected").is_null()) d.expected = dj.at("expected").get<std::string>();
            if (!dj.at("found").is_null()) d.found = dj.at("found").get<std::string>();
            cmp.diffs.push_back(std::move(d));
        }
        r.store_status = std::move(cmp);
    }
    const auto& sj = j.at("summary");
    r.summary.entries = sj.at("entries").get<uint64_t>();
    r.summary.ok = sj.at("ok").get<uint64_t>();
    r.summary.pending = sj.at("pending").get<uint64_t>();
    r.summary.warnings = sj.at("warnings").get<uint64_t>();
    r.summary.errors = sj.at("errors").get<uint64_t>();
    r.summary.orphans = sj.at("orphans").get<uint64_t>();
    r.summary.chain_ok = sj.at("chain_ok").get<bool>();
    r.summary.store_checked = sj.at("store_checked").get<bool>();
    r.summary.store_match = sj.at("store_match").get<bool>();
    r.summary.pass = sj.at("verdict").get<std::string>() == "PASS";
    return r;
}

}  // namespace scrybe
