#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gsw/errors.hpp"

namespace gsw {

struct ChunkRef {
    std::string doc_id;
    int index = 0;

    auto operator<=>(const ChunkRef&) const = default;
};

struct EntityMention {
    std::string name;
    std::vector<std::string> roles;   // open-vocabulary labels, lower-cased
    std::vector<std::string> states;  // open-vocabulary labels, lower-cased
    ChunkRef evidence;

    bool operator==(const EntityMention&) const = default;
};

struct Valence {
    std::string entity;
    std::string label; // role/state transition signalled for the entity

    bool operator==(const Valence&) const = default;
};

struct VerbEvent {
    std::string subject;
    std::string verb; // lemma
    std::optional<std::string> object;
    std::vector<Valence> valences;

    bool operator==(const VerbEvent&) const = default;
};

enum class TimeGranularity { instant, day, range, unspecified };

std::string to_string(TimeGranularity g);
TimeGranularity granularity_from_string(std::string_view s);

struct SpaceTimeNode {
    std::string node_id; // unique within the owning instance/workspace
    std::optional<std::string> location;
    std::optional<std::string> time_phrase;     // verbatim from the text
    std::optional<std::string> normalized_time; // ISO date when parseable
    TimeGranularity granularity = TimeGranularity::unspecified;

    bool operator==(const SpaceTimeNode&) const = default;
};

struct Coupling {
    std::string entity;
    std::string node_id;
    std::string rationale;

    bool operator==(const Coupling&) const = default;
};

enum class QuestionStatus { open, resolved };

struct ForwardQuestion {
    std::string question_id;
    std::string text;
    std::vector<std::string> about; // entity names the question concerns
    QuestionStatus status = QuestionStatus::open;
    std::optional<std::string> answer;
    std::optional<ChunkRef> resolved_by;

    bool operator==(const ForwardQuestion&) const = default;
};

// One chunk's extracted semantics: the unit the reconciler folds into the
// chapter workspace.
struct OperatorInstance {
    ChunkRef chunk;
    std::vector<EntityMention> entities;
    std::vector<VerbEvent> events;
    std::vector<SpaceTimeNode> nodes;
    std::vector<Coupling> couplings; // empty until the coupling pass runs
    std::vector<ForwardQuestion> questions;

    bool operator==(const OperatorInstance&) const = default;
};

/// Referential-integrity check: events, valences, couplings, and questions
/// may only reference entities/nodes present in the instance; every entity
/// carries a role or state or participates in an event; resolved questions
/// carry answers. Throws InputError on violation.
void validate_instance(const OperatorInstance& instance);

// Extraction output grammar: four fixed sections in order, one tab-separated
// record per line, '-' for empty fields, list fields joined with '|',
// terminated by END.
//
//   ENTITIES   name \t roles \t states
//   EVENTS     subject \t verb \t object \t valences (entity:label)
//   NODES      node_id \t location \t time \t granularity
//   QUESTIONS  question_id \t text \t about
//   END
std::string encode_instance(const OperatorInstance& instance);

/// Strict decode of the grammar above. Couplings start empty; question status
/// starts open; normalized_time is derived from the time phrase. Missing or
/// out-of-order sections, malformed records, or trailing content raise
/// GrammarError with the offending line.
OperatorInstance parse_structured_output(std::string_view output, const ChunkRef& chunk);

// Coupling-pass output grammar:
//   COUPLINGS  entity \t node_id \t rationale
//   MERGES     node_id \t node_id
//   END
struct CouplingDecision {
    std::vector<Coupling> couplings;
    std::vector<std::pair<std::string, std::string>> merges;
};

/// Lenient decode used for the second pass: lines referencing unknown
/// entities/nodes are reported in `dropped`, not fatal.
CouplingDecision parse_coupling_output(std::string_view output, const OperatorInstance& instance,
                                       std::vector<std::string>& dropped);

/// Pairwise check that space-time nodes with equal normalized dates at
/// instant/day granularity do not place one coupled entity at two different
/// locations. Returns human-readable warnings; empty means sane.
std::vector<std::string> temporal_sanity_warnings(const OperatorInstance& instance);

} // namespace gsw
