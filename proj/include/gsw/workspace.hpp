#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "gsw/corpus.hpp"
#include "gsw/gateway.hpp"
#include "gsw/instance.hpp"

namespace gsw {

struct StampedLabel {
    std::string label;
    int step = 0;

    bool operator==(const StampedLabel&) const = default;
};

struct StampedEvent {
    VerbEvent event; // participant names canonicalized
    int step = 0;

    bool operator==(const StampedEvent&) const = default;
};

struct NodeSnapshot {
    std::optional<std::string> location;
    std::optional<std::string> time_phrase;
    std::optional<std::string> normalized_time;
    TimeGranularity granularity = TimeGranularity::unspecified;
    int step = 0; // step at which this value was superseded

    bool operator==(const NodeSnapshot&) const = default;
};

// A space-time node owned by the workspace. Coupled entities hold the node
// id and read current values through the workspace, so an update is visible
// to every coupled entity at once.
struct WorkspaceNode {
    std::string node_id;
    std::optional<std::string> location;
    std::optional<std::string> time_phrase;
    std::optional<std::string> normalized_time;
    TimeGranularity granularity = TimeGranularity::unspecified;
    std::vector<NodeSnapshot> history; // previous values, oldest first
    int created_step = 0;

    bool operator==(const WorkspaceNode&) const = default;
};

struct ReconciledEntity {
    std::string canonical_name; // surface form of the first mention
    std::set<std::string> aliases;
    std::vector<StampedLabel> role_history;
    std::vector<StampedLabel> state_history;
    std::vector<int> event_refs; // indices into Workspace::events
    std::set<std::string> coupled_nodes;

    bool operator==(const ReconciledEntity&) const = default;
};

struct TrackedQuestion {
    ForwardQuestion question;
    ChunkRef origin;
    int origin_step = 0;

    bool operator==(const TrackedQuestion&) const = default;
};

struct Workspace {
    std::string doc_id;
    int ordinal = 0;
    int last_step = -1;
    std::map<std::string, ReconciledEntity> entities; // canonical name -> entity
    std::map<std::string, WorkspaceNode> nodes;       // node id -> node
    std::vector<StampedEvent> events;
    std::vector<TrackedQuestion> questions;
    int next_node_seq = 0;
    int next_question_seq = 0;

    bool operator==(const Workspace&) const = default;
};

enum class CueKind { entity, node, event };

struct CueRef {
    std::string doc_id;
    CueKind kind = CueKind::entity;
    std::string id; // entity canonical name, node id, or event index

    auto operator<=>(const CueRef&) const = default;
};

// All chapter workspaces plus the cross-chapter cue index (entity aliases,
// locations, dates, event verbs). The index is always derivable from the
// workspaces; load paths rebuild it.
struct GlobalMemory {
    std::map<std::string, Workspace> workspaces;
    std::map<std::string, std::vector<CueRef>> cue_index;

    bool operator==(const GlobalMemory&) const = default;
};

/// Find or create the entity a mention belongs to (case-insensitive,
/// whitespace-normalized match on name or alias) and return its key.
std::string merge_entity(Workspace& ws, const EntityMention& mention);

/// Replace a node's current location/time, pushing the previous value onto
/// its history with the given step. Values equal to the current state are a
/// no-op. Unknown node ids raise InputError.
void propagate_space_time(Workspace& ws, const std::string& node_id,
                          const std::optional<std::string>& new_location,
                          const std::optional<std::string>& new_time, int step);

/// Fold one instance into the workspace (Markov update). The instance must
/// belong to the same document; its step becomes last_step + 1.
Workspace reconcile_step(Workspace prev, const OperatorInstance& instance);

/// Ask the provider which open questions the chunk now answers. Questions
/// raised by this same chunk are not candidates. Malformed resolution lines
/// leave their question open and are recorded in `warnings`.
Workspace resolve_forward_questions(Workspace ws, const Chunk& chunk, Gateway& gateway,
                                    std::vector<std::string>* warnings = nullptr,
                                    int max_tokens = 500);

/// Fold a chapter: reconcile instances in order, attempting question
/// resolution after each step. Instances must be ordered by chunk index.
Workspace build_chapter_workspace(const std::vector<Chunk>& chunks,
                                  const std::vector<OperatorInstance>& instances,
                                  Gateway& gateway, int ordinal = 0,
                                  std::vector<std::string>* warnings = nullptr,
                                  int reconcile_max_tokens = 500);

/// Index chapter workspaces into a GlobalMemory. Duplicate doc_ids raise
/// InputError.
GlobalMemory index_global(const std::vector<Workspace>& workspaces);

/// Recompute the cue index from the workspaces (load paths and the rebuild
/// equivalence check).
std::map<std::string, std::vector<CueRef>> build_cue_index(
    const std::map<std::string, Workspace>& workspaces);

/// Structural integrity check used after load: entity/node/event/question
/// references must all resolve. Throws StateError on violation.
void validate_workspace(const Workspace& ws);

} // namespace gsw
