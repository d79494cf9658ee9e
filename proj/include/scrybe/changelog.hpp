// Copyright 2026 the Scrybe Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or
// at http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "scrybe/append_log.hpp"
#include "scrybe/replay.hpp"
#include "scrybe/validate.hpp"

namespace scrybe {

enum class AppendError {
    IdGap,
    BadSignature,
    UnknownAuthor,
    InvalidEntry,
};

inline const char* append_error_name(AppendError e) {
    switch (e) {
        case AppendError::IdGap: return "ID_GAP";
        case AppendError::BadSignature: return "BAD_SIGNATURE";
        case AppendError::UnknownAuthor: return "UNKNOWN_AUTHOR";
        case AppendError::InvalidEntry: return "INVALID_ENTRY";
    }
    return "UNKNOWN";
}

struct AppendOutcome {
    bool ok = false;
    uint64_t entry_id = 0;
    AppendError error = AppendError::InvalidEntry;
    std::string detail;

    static AppendOutcome accepted(uint64_t id) { return {true, id, AppendError::InvalidEntry, {}}; }
    static AppendOutcome rejected(AppendError e, std::string detail) {
        return {false, 0, e, std::move(detail)};
    }
};

/// Durable append-only changelog. Entry k+1 lives at position k; ids are
/// assigned by the caller and must be exactly next_id. One writer at a
/// time; readers see a consistent prefix.
class ChangelogDatabase {
  public:
    explicit ChangelogDatabase(const std::string& data_dir, KeyRegistry authors)
        : log_(data_dir + "/changelog.log", "SCRYCLG\x01"), authors_(std::move(authors)) {
        std::vector<Bytes> payloads;
        recovery_ = log_.read_all(payloads);
        entries_.reserve(payloads.size());
        for (const auto& p : payloads) {
            ChangelogEntry e = decode_entry(p);
            if (e.entry_id != entries_.size() + 1)
                throw std::runtime_error("changelog file has non-consecutive entry ids");
            entries_.push_back(std::move(e));
        }
    }

    AppendOutcome append_entry(const ChangelogEntry& entry) {
        std::unique_lock lock(mu_);
        if (entry.entry_id != entries_.size() + 1)
            return AppendOutcome::rejected(
                AppendError::IdGap, "expected entry_id " + std::to_string(entries_.size() + 1) +
                                        ", got " + std::to_string(entry.entry_id));
        if (entry.mutation.empty())
            return AppendOutcome::rejected(AppendError::InvalidEntry, "mutation list is empty");
        const PublicKey* pk = authors_.find(entry.author_key_id);
        if (!pk)
            return AppendOutcome::rejected(AppendError::UnknownAuthor,
                                           "author not registered: " + to_hex(entry.author_key_id));
        if (entry.entry_signature.signer != entry.author_key_id ||
            !verify(entry_signing_bytes(entry), entry.entry_signature, *pk))
            return AppendOutcome::rejected(AppendError::BadSignature,
                                           "entry signature does not verify");
        log_.append(canonical_encode(entry));
        entries_.push_back(entry);
        return AppendOutcome::accepted(entry.entry_id);
    }

    std::optional<ChangelogEntry> get_entry(uint64_t entry_id) const {
        std::shared_lock lock(mu_);
        if (entry_id == 0 || entry_id > entries_.size()) return std::nullopt;
        return entries_[entry_id - 1];
    }

    std::vector<ChangelogEntry> pull_all() const {
        std::shared_lock lock(mu_);
        return entries_;
    }

    RecordStoreState state() const {
        std::shared_lock lock(mu_);
        return replay(entries_);
    }

    uint64_t next_id() const {
        std::shared_lock lock(mu_);
        return entries_.size() + 1;
    }

    size_t size() const {
        std::shared_lock lock(mu_);
        return entries_.size();
    }

    bool recovered_torn_tail() const { return recovery_.truncated_torn_tail; }

  private:
    mutable std::shared_mutex mu_;
    AppendLog log_;
    KeyRegistry authors_;
    std::vector<ChangelogEntry> entries_;
    AppendLog::OpenStats recovery_;
};

}  // namespace scrybe
