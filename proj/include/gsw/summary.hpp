#pragma once

#include <map>
#include <string>
#include <vector>

#include "gsw/gateway.hpp"
#include "gsw/workspace.hpp"

namespace gsw {

// Per-entity, per-chapter episodic summary: the retrieval unit at query time.
struct EntitySummary {
    std::string doc_id;
    std::string entity; // canonical name
    std::string text;
    std::string source_digest; // hash of the rendered entity record
    long token_count = 0;

    bool operator==(const EntitySummary&) const = default;
};

// doc_id -> entity -> summary
using SummarySet = std::map<std::string, std::map<std::string, EntitySummary>>;

/// Render one entity's workspace record as the structured prompt payload:
/// roles/states in chronological order, coupled space-time values plus their
/// history, events, and resolved questions.
std::string render_entity_record(const Workspace& ws, const std::string& entity_key);

/// Hash of the rendered record; summaries with a different digest are stale.
std::string entity_record_digest(const Workspace& ws, const std::string& entity_key);

struct SummaryOptions {
    int max_tokens = 500;
};

/// Generate the summary for one entity. Unknown entities raise InputError.
EntitySummary summarize_entity(const Workspace& ws, const std::string& entity_key,
                               Gateway& gateway, const SummaryOptions& options = {});

struct SummarizeOutcome {
    SummarySet summaries;
    std::vector<std::string> errors; // per-entity provider failures
    long generated = 0;
    long reused = 0;
};

/// Summaries for every (chapter, entity) in memory. Entries in `existing`
/// whose digest still matches are reused without a provider call; failures
/// are collected per entity and do not abort the rest.
SummarizeOutcome summarize_all(const GlobalMemory& memory, const SummarySet& existing,
                               Gateway& gateway, const SummaryOptions& options = {},
                               int max_inflight = 8);

} // namespace gsw
