// Copyright 2026 the Scrybe Authors. Licensed under the Apache License,
// Version 2.0. See the LICENSE file at the root of this distribution or
// at http://www.apache.org/licenses/LICENSE-2.0
#pragma once

#include <map>
#include <span>
#include <stdexcept>
#include <string>

#include "scrybe/model.hpp"

namespace scrybe {

/// Materialized record store: record_id -> field_name -> value. Exactly the
/// state produced by folding entries 1..N over the empty map.
struct RecordStoreState {
    std::map<std::string, std::map<std::string, std::string>> records;

    bool operator==(const RecordStoreState&) const = default;
};

struct ReplayError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void apply_mutation(RecordStoreState& state, const FieldOp& op) {
    if (op.op == FieldOpKind::Set) {
        state.records[op.record_id][op.field_name] = op.new_value.value_or("");
    } else {
        auto rec = state.records.find(op.record_id);
        if (rec == state.records.end()) return;  // deleting an absent field is a no-op
        rec->second.erase(op.field_name);
        if (rec->second.empty()) state.records.erase(rec);
    }
}

/// Fold entries onto the empty state without caring about numbering. The
/// audit engine uses this to keep working on changelogs with holes.
inline RecordStoreState fold_entries(std::span<const ChangelogEntry> entries,
                                     std::optional<uint64_t> up_to = std::nullopt) {
    RecordStoreState state;
    for (const auto& e : entries) {
        if (up_to && e.entry_id > *up_to) break;
        for (const auto& m : e.mutation) apply_mutation(state, m);
    }
    return state;
}

/// Strict replay: entries must be consecutively numbered from 1.
inline RecordStoreState replay(std::span<const ChangelogEntry> entries,
                               std::optional<uint64_t> up_to = std::nullopt) {
    for (size_t i = 0; i < entries.size(); ++i) {
        if (entries[i].entry_id != i + 1)
            throw ReplayError("NON_CONSECUTIVE: entry at position " + std::to_string(i) +
                              " has id " + std::to_string(entries[i].entry_id));
    }
    return fold_entries(entries, up_to);
}

}  // namespace scrybe
