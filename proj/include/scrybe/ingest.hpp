// Copyright 2026 the Scrybe Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or
// at http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <chrono>
#include <thread>

#include <httplib.h>

#include "scrybe/audit.hpp"
#include "scrybe/model.hpp"

namespace scrybe {

// Researcher-side pipeline: parse a CSV batch, turn each row into a signed
// changelog entry, then for each entry in order append it to the changelog,
// anchor it with a transaction at a miner, and import the mutation into the
// record store. The changelog leg always runs first so an anchored entry
// can never be missing because of submission ordering.

// ---------------------------------------------------------------------------
// CSV (RFC 4180)
// ---------------------------------------------------------------------------

struct CsvError : std::runtime_error {
    enum class Kind { EmptyInput, RaggedRow, DuplicateId, BadQuoting };
    Kind kind;
    size_t line;

    CsvError(Kind k, size_t line, const std::string& what)
        : std::runtime_error("line " + std::to_string(line) + ": " + what), kind(k), line(line) {}

    const char* code() const {
        switch (kind) {
            case Kind::EmptyInput: return "EMPTY_INPUT";
            case Kind::RaggedRow: return "RAGGED_ROW";
            case Kind::DuplicateId: return "DUPLICATE_ID";
            case Kind::BadQuoting: return "BAD_QUOTING";
        }
        return "UNKNOWN";
    }
};

/// Tabular batch; the first column is the record id.
struct CsvRecordBatch {
    std::vector<std::string> header;  // includes the record id column
    std::vector<std::vector<std::string>> rows;

    const std::string& record_id(size_t row) const { return rows[row][0]; }
};

inline CsvRecordBatch parse_csv(std::string_view text) {
    std::vector<std::vector<std::string>> raw_rows;
    std::vector<std::string> field_row;
    std::string field;
    size_t line = 1, row_start_line = 1;
    bool in_quotes = false, was_quoted = false, any_char = false;

    auto end_field = [&] {
        field_row.push_back(std::move(field));
        field.clear();
        was_quoted = false;
    };
    auto end_row = [&] {
        end_field();
        raw_rows.push_back(std::move(field_row));
        field_row.clear();
        row_start_line = line;
    };

    for (size_t i = 0; i < text.size(); ++i) {
        char c = text[i];
        any_char = true;
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        switch (c) {
            case '"':
                if (!field.empty() || was_quoted)
                    throw CsvError(CsvError::Kind::BadQuoting, line, "quote inside unquoted field");
                in_quotes = true;
                was_quoted = true;
                break;
            case ',': end_field(); break;
            case '\r':
                if (i + 1 < text.size() && text[i + 1] == '\n') break;  // swallow, \n ends the row
                ++line;
                end_row();
                break;
            case '\n':
                ++line;
                end_row();
                break;
            default:
                if (was_quoted)
                    throw CsvError(CsvError::Kind::BadQuoting, line, "data after closing quote");
                field.push_back(c);
        }
    }
    if (in_quotes) throw CsvError(CsvError::Kind::BadQuoting, line, "unterminated quoted field");
    if (!field.empty() || !field_row.empty() || was_quoted) end_row();

    if (!any_char || raw_rows.empty())
        throw CsvError(CsvError::Kind::EmptyInput, 1, "input has no header row");

    CsvRecordBatch batch;
    batch.header = std::move(raw_rows[0]);
    if (batch.header.empty() || batch.header[0].empty())
        throw CsvError(CsvError::Kind::EmptyInput, 1, "header has no record id column");

    std::set<std::string> seen_ids;
    size_t data_line = 1;
    for (size_t r = 1; r < raw_rows.size(); ++r) {
        ++data_line;
        auto& row = raw_rows[r];
        if (row.size() == 1 && row[0].empty()) continue;  // trailing blank line
        if (row.size() != batch.header.size())
            throw CsvError(CsvError::Kind::RaggedRow, data_line,
                           "row has " + std::to_string(row.size()) + " columns, header has " +
                               std::to_string(batch.header.size()));
        if (!seen_ids.insert(row[0]).second)
            throw CsvError(CsvError::Kind::DuplicateId, data_line, "duplicate record id " + row[0]);
        batch.rows.push_back(std::move(row));
    }
    return batch;
}

/// One signed entry per row: a SET for every non-empty field. Empty cells
/// produce no mutation at all, so replaying the entries reproduces exactly
/// the CSV's populated cells.
inline std::vector<ChangelogEntry> batch_to_entries(const CsvRecordBatch& batch,
                                                    const KeyPair& author,
                                                    const std::string& trial_id,
                                                    uint64_t starting_id, uint64_t now_ms) {
    std::vector<ChangelogEntry> entries;
    entries.reserve(batch.rows.size());
    for (size_t r = 0; r < batch.rows.size(); ++r) {
        ChangelogEntry e;
        e.entry_id = starting_id + r;
        e.trial_id = trial_id;
        e.timestamp = now_ms;
        e.author_key_id = author.key_id;
        for (size_t c = 1; c < batch.header.size(); ++c) {
            if (batch.rows[r][c].empty()) continue;
            e.mutation.push_back(
                FieldOp{batch.rows[r][0], batch.header[c], FieldOpKind::Set, batch.rows[r][c]});
        }
        if (e.mutation.empty())
            throw std::invalid_argument("row " + std::to_string(r + 2) + " (record " +
                                        batch.rows[r][0] + ") has no non-empty fields");
        sign_entry(e, author);
        entries.push_back(std::move(e));
    }
    return entries;
}

// ---------------------------------------------------------------------------
// HTTP clients
// ---------------------------------------------------------------------------

struct TransportError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace detail {

/// Retries fn() while it reports a transport failure (connection refused,
/// reset) until the deadline passes. HTTP-level rejections return at once.
template <typename Fn>
auto with_retry(uint64_t retry_ms, Fn&& fn) {
    auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(retry_ms);
    while (true) {
        auto result = fn();
        if (result) return result;
        if (std::chrono::steady_clock::now() >= deadline) return result;
        std::this_thread::sleep_for(std::chrono::milliseconds(100));
    }
}

inline json parse_body(const httplib::Result& res) {
    try {
        return json::parse(res->body);
    } catch (const json::exception&) {
        return json{{"error", "BAD_RESPONSE"}, {"detail", res->body.substr(0, 200)}};
    }
}

}  // namespace detail

class ChangelogClient {
  public:
    ChangelogClient(const std::string& base_url, std::string token, uint64_t retry_ms = 0)
        : cli_(base_url), token_(std::move(token)), retry_ms_(retry_ms) {
        cli_.set_connection_timeout(2, 0);
        cli_.set_read_timeout(10, 0);
    }

    struct AppendResult {
        bool ok = false;
        std::string error;   // ID_GAP, BAD_SIGNATURE, UNKNOWN_AUTHOR, UNAUTHORIZED, UNREACHABLE
        std::string detail;
    };

    AppendResult append(const ChangelogEntry& e) {
        auto res = detail::with_retry(retry_ms_, [&] {
            return cli_.Post("/entries", headers(), to_json(e).dump(), "application/json");
        });
        if (!res) return {false, "UNREACHABLE", httplib::to_string(res.error())};
        json body = detail::parse_body(res);
        if (res->status == 200) return {true, {}, {}};
        return {false, body.value("error", "HTTP_" + std::to_string(res->status)),
                body.value("detail", "")};
    }

    std::optional<ChangelogEntry> get(uint64_t entry_id) {
        auto res = detail::with_retry(retry_ms_, [&] {
            return cli_.Get("/entries/" + std::to_string(entry_id), headers());
        });
        if (!res) throw TransportError("changelog unreachable: " + httplib::to_string(res.error()));
        if (res->status == 404) return std::nullopt;
        if (res->status != 200) throw TransportError("changelog error " + std::to_string(res->status));
        return entry_from_json(json::parse(res->body));
    }

    std::vector<ChangelogEntry> pull() {
        auto res = detail::with_retry(retry_ms_, [&] { return cli_.Get("/entries", headers()); });
        if (!res) throw TransportError("changelog unreachable: " + httplib::to_string(res.error()));
        if (res->status != 200)
            throw TransportError("changelog pull rejected with status " + std::to_string(res->status));
        std::vector<ChangelogEntry> out;
        for (const auto& ej : json::parse(res->body)) out.push_back(entry_from_json(ej));
        return out;
    }

    RecordStoreState state() {
        auto res = detail::with_retry(retry_ms_, [&] { return cli_.Get("/state", headers()); });
        if (!res) throw TransportError("changelog unreachable: " + httplib::to_string(res.error()));
        if (res->status != 200)
            throw TransportError("changelog state rejected with status " + std::to_string(res->status));
        return record_state_from_json(json::parse(res->body));
    }

  private:
    httplib::Headers headers() const { return {{"Authorization", "Bearer " + token_}}; }

    httplib::Client cli_;
    std::string token_;
    uint64_t retry_ms_;
};

class NodeClient {
  public:
    explicit NodeClient(const std::string& base_url, uint64_t retry_ms = 0)
        : cli_(base_url), retry_ms_(retry_ms) {
        cli_.set_connection_timeout(2, 0);
        cli_.set_read_timeout(10, 0);
    }

    struct SubmitOutcome {
        bool ok = false;
        std::string reason;
    };

    SubmitOutcome submit(const Transaction& t) {
        auto res = detail::with_retry(retry_ms_, [&] {
            return cli_.Post("/transactions", to_json(t).dump(), "application/json");
        });
        if (!res) return {false, "UNREACHABLE: " + httplib::to_string(res.error())};
        json body = detail::parse_body(res);
        if (res->status == 200 && body.value("status", "") == "accepted") return {true, {}};
        return {false, body.value("reason", "HTTP_" + std::to_string(res->status))};
    }

    std::vector<Block> chain(uint64_t from = 0) {
        auto res = detail::with_retry(retry_ms_, [&] {
            return cli_.Get("/chain?from=" + std::to_string(from));
        });
        if (!res) throw TransportError("node unreachable: " + httplib::to_string(res.error()));
        if (res->status != 200)
            throw TransportError("node chain request rejected with status " +
                                 std::to_string(res->status));
        std::vector<Block> out;
        for (const auto& bj : json::parse(res->body)) out.push_back(block_from_json(bj));
        return out;
    }

  private:
    httplib::Client cli_;
    uint64_t retry_ms_;
};

class StoreClient {
  public:
    StoreClient(const std::string& base_url, std::string token, uint64_t retry_ms = 0)
        : cli_(base_url), token_(std::move(token)), retry_ms_(retry_ms) {
        cli_.set_connection_timeout(2, 0);
        cli_.set_read_timeout(10, 0);
    }

    struct ImportOutcome {
        bool ok = false;
        std::string reason;
    };

    /// Applies one entry's mutations: SET sends the value, DELETE sends null.
    ImportOutcome import_mutations(const std::string& record_id, const std::vector<FieldOp>& ops) {
        json fields = json::object();
        for (const auto& op : ops) {
            if (op.record_id != record_id) continue;
            fields[op.field_name] = op.op == FieldOpKind::Set ? json(op.new_value.value_or(""))
                                                              : json(nullptr);
        }
        json body{{"record_id", record_id}, {"fields", std::move(fields)}};
        auto res = detail::with_retry(retry_ms_, [&] {
            return cli_.Post("/import", headers(), body.dump(), "application/json");
        });
        if (!res) return {false, "UNREACHABLE: " + httplib::to_string(res.error())};
        if (res->status == 200) return {true, {}};
        json rb = detail::parse_body(res);
        return {false, rb.value("error", "HTTP_" + std::to_string(res->status))};
    }

    std::optional<std::map<std::string, std::string>> export_record(const std::string& record_id) {
        json body{{"record_id", record_id}};
        auto res = detail::with_retry(retry_ms_, [&] {
            return cli_.Post("/export", headers(), body.dump(), "application/json");
        });
        if (!res) throw TransportError("store unreachable: " + httplib::to_string(res.error()));
        if (res->status == 404) return std::nullopt;
        if (res->status != 200)
            throw TransportError("store export rejected with status " + std::to_string(res->status));
        std::map<std::string, std::string> fields;
        for (const auto& [k, v] : json::parse(res->body).at("fields").items())
            fields[k] = v.get<std::string>();
        return fields;
    }

    RecordStoreState records() {
        auto res = detail::with_retry(retry_ms_, [&] { return cli_.Get("/records", headers()); });
        if (!res) throw TransportError("store unreachable: " + httplib::to_string(res.error()));
        if (res->status != 200)
            throw TransportError("store records rejected with status " + std::to_string(res->status));
        return record_state_from_json(json::parse(res->body));
    }

  private:
    httplib::Headers headers() const { return {{"Authorization", "Bearer " + token_}}; }

    httplib::Client cli_;
    std::string token_;
    uint64_t retry_ms_;
};

// ---------------------------------------------------------------------------
// Submission pipeline
// ---------------------------------------------------------------------------

enum class LegStatus { Ok, Failed, Skipped };

struct LegOutcome {
    LegStatus status = LegStatus::Skipped;
    std::string detail;
};

struct EntryOutcome {
    uint64_t entry_id = 0;
    LegOutcome changelog;
    LegOutcome transaction;
    LegOutcome store;

    bool all_ok() const {
        return changelog.status == LegStatus::Ok && transaction.status == LegStatus::Ok &&
               store.status == LegStatus::Ok;
    }
};

struct SubmitReport {
    std::vector<EntryOutcome> outcomes;
    bool all_ok = true;
};

/// Runs the three legs per entry, in order, stopping at the first entry
/// with a failed leg. A transaction is never submitted for an entry the
/// changelog rejected.
inline SubmitReport submit_entries(const std::vector<ChangelogEntry>& entries,
                                   ChangelogClient& changelog, NodeClient& node, StoreClient& store,
                                   const KeyPair& submitter) {
    SubmitReport report;
    for (const auto& e : entries) {
        EntryOutcome out;
        out.entry_id = e.entry_id;

        auto ar = changelog.append(e);
        if (!ar.ok && ar.error == "ID_GAP") {
            // a crashed-and-retried append may already be durable; identical
            // stored bytes mean this entry is in fact appended
            try {
                auto stored = changelog.get(e.entry_id);
                if (stored && canonical_encode(*stored) == canonical_encode(e))
                    ar = {true, {}, "already present"};
            } catch (const TransportError&) {
            }
        }
        if (!ar.ok) {
            out.changelog = {LegStatus::Failed, "CHANGELOG_REJECTED: " + ar.error +
                                                    (ar.detail.empty() ? "" : " (" + ar.detail + ")")};
            report.outcomes.push_back(std::move(out));
            report.all_ok = false;
            return report;
        }
        out.changelog = {LegStatus::Ok, ar.detail};

        Transaction txn = make_transaction(e, submitter);
        auto tr = node.submit(txn);
        if (!tr.ok) {
            out.transaction = {LegStatus::Failed, "TXN_REJECTED: " + tr.reason};
            report.outcomes.push_back(std::move(out));
            report.all_ok = false;
            return report;
        }
        out.transaction = {LegStatus::Ok, {}};

        std::set<std::string> record_ids;
        for (const auto& m : e.mutation) record_ids.insert(m.record_id);
        bool store_ok = true;
        std::string store_detail;
        for (const auto& rid : record_ids) {
            auto sr = store.import_mutations(rid, e.mutation);
            if (!sr.ok) {
                store_ok = false;
                store_detail = "STORE_REJECTED: " + sr.reason;
                break;
            }
        }
        out.store = store_ok ? LegOutcome{LegStatus::Ok, {}} : LegOutcome{LegStatus::Failed, store_detail};
        bool ok = out.all_ok();
        report.outcomes.push_back(std::move(out));
        if (!ok) {
            report.all_ok = false;
            return report;
        }
    }
    return report;
}

}  // namespace scrybe
