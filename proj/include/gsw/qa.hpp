#pragma once

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include "gsw/gateway.hpp"
#include "gsw/store.hpp"
#include "gsw/summary.hpp"
#include "gsw/workspace.hpp"

namespace gsw {

struct Query {
    std::string query_id;
    std::string question;
    std::vector<std::string> gold_answers;
    std::string cue_category; // "0" | "1" | "2" | "3-5" | "6+"
    std::vector<std::string> referenced_doc_ids;

    bool operator==(const Query&) const = default;
};

/// Load newline-delimited query records: {query_id, question, gold_answers,
/// n_cues_category, referenced_doc_ids}; the last three are optional.
std::vector<Query> load_queries(const std::filesystem::path& path);

struct CueExtraction {
    std::vector<std::string> cues;
    bool used_fallback = false; // heuristic path engaged (provider failed or found nothing)
};

/// Named entities, dates, locations, and event names in the question. Runs
/// the provider NER prompt; on failure or an empty result, falls back to the
/// capitalized-span + date-pattern heuristic and flags it.
CueExtraction extract_query_cues(const Query& query, Gateway* gateway, int max_tokens = 200);

struct MatchRef {
    std::string doc_id;
    std::string entity; // canonical name

    auto operator<=>(const MatchRef&) const = default;
};

/// Exact-after-normalization lookups of the cues in the cue index. Node and
/// event hits expand to the entities coupled to / participating in them.
std::set<MatchRef> match_cues(const std::vector<std::string>& cues, const GlobalMemory& memory);

struct ScoredSummary {
    EntitySummary summary;
    int doc_ordinal = 0;
    double score = 0.0;

    bool operator==(const ScoredSummary&) const = default;
};

struct RankedContext {
    std::vector<ScoredSummary> entries; // non-increasing score
    int distinct_chapters = 0;
    long total_tokens = 0;

    bool operator==(const RankedContext&) const = default;
};

/// Sort summaries by cosine similarity between their embeddings and the
/// query embedding, non-increasing, ties broken by (doc ordinal, entity
/// name). Embedding failures propagate; there is no silent fallback.
RankedContext rerank(const Query& query, std::vector<EntitySummary> summaries,
                     const GlobalMemory& memory, Gateway& gateway,
                     EmbeddingCache* cache = nullptr);

/// Keep ranked summaries while the distinct-chapter budget holds: a summary
/// is admitted only if its chapter is already admitted or fewer than
/// max_chapters chapters are. Counts tokens of the kept rendered context.
RankedContext assemble_context(const RankedContext& ranked, int max_chapters = 17);

/// "Chapter <doc_id> — <entity>: <summary>" blocks in rank order.
std::string render_context(const RankedContext& context);

struct Answer {
    std::string query_id;
    std::string text;
    long context_tokens = 0;
    double cost = 0.0;
    std::vector<MatchRef> provenance;
    std::vector<std::string> flags;

    bool operator==(const Answer&) const = default;
};

struct AnswerOptions {
    int max_tokens = 800;
    double cost_rate_per_million = 2.50;
};

/// Final answering call. Empty context is allowed; the prompt then instructs
/// the model to answer from no evidence.
Answer answer_query(const Query& query, const RankedContext& context, Gateway& gateway,
                    const AnswerOptions& options = {});

} // namespace gsw
