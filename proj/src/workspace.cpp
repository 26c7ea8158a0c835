#include "gsw/workspace.hpp"

#include <algorithm>
#include <sstream>

#include "gsw/prompts.hpp"
#include "gsw/text.hpp"

namespace gsw {

namespace {

std::string format_node_id(int seq) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "n%04d", seq);
    return buf;
}

std::string format_question_id(int seq) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "q%04d", seq);
    return buf;
}

void append_labels(std::vector<StampedLabel>& history, const std::vector<std::string>& labels,
                   int step) {
    for (const auto& raw : labels) {
        std::string label = text::normalize_key(raw);
        if (label.empty()) continue;
        bool seen = std::any_of(history.begin(), history.end(),
                                [&](const StampedLabel& h) { return h.label == label; });
        // Union semantics: a label is stamped once, at its first appearance.
        if (!seen) history.push_back({label, step});
    }
}

bool node_matches_value(const WorkspaceNode& node, const SpaceTimeNode& incoming) {
    if (incoming.location && node.location)
        return text::normalize_key(*incoming.location) == text::normalize_key(*node.location);
    if (!incoming.location && !node.location && incoming.time_phrase && node.time_phrase) {
        if (incoming.normalized_time && node.normalized_time)
            return *incoming.normalized_time == *node.normalized_time;
        return text::normalize_key(*incoming.time_phrase) ==
               text::normalize_key(*node.time_phrase);
    }
    return false;
}

} // namespace

std::string merge_entity(Workspace& ws, const EntityMention& mention) {
    if (mention.name.empty()) throw InputError("merge_entity: mention has empty name");
    std::string norm = text::normalize_key(mention.name);
    for (auto& [key, entity] : ws.entities) {
        bool hit = text::normalize_key(entity.canonical_name) == norm;
        for (const auto& alias : entity.aliases)
            hit = hit || text::normalize_key(alias) == norm;
        if (hit) {
            entity.aliases.insert(mention.name);
            return key;
        }
    }
    ReconciledEntity entity;
    entity.canonical_name = mention.name;
    entity.aliases.insert(mention.name);
    ws.entities.emplace(mention.name, std::move(entity));
    return mention.name;
}

void propagate_space_time(Workspace& ws, const std::string& node_id,
                          const std::optional<std::string>& new_location,
                          const std::optional<std::string>& new_time, int step) {
    auto it = ws.nodes.find(node_id);
    if (it == ws.nodes.end())
        throw InputError("propagate_space_time: unknown node " + node_id);
    WorkspaceNode& node = it->second;

    std::optional<std::string> next_location = new_location ? new_location : node.location;
    std::optional<std::string> next_time = new_time ? new_time : node.time_phrase;
    if (next_location == node.location && next_time == node.time_phrase) return;

    node.history.push_back(NodeSnapshot{node.location, node.time_phrase, node.normalized_time,
                                        node.granularity, step});
    node.location = next_location;
    if (new_time) {
        node.time_phrase = new_time;
        node.normalized_time.reset();
        node.granularity = TimeGranularity::unspecified;
        if (auto date = text::parse_explicit_date(*new_time)) {
            node.normalized_time = date->iso();
            node.granularity = TimeGranularity::day;
        }
    }
}

Workspace reconcile_step(Workspace prev, const OperatorInstance& instance) {
    if (!prev.doc_id.empty() && prev.doc_id != instance.chunk.doc_id)
        throw InputError("reconcile_step: instance for document " + instance.chunk.doc_id +
                         " cannot update workspace of " + prev.doc_id);
    validate_instance(instance);

    Workspace ws = std::move(prev);
    if (ws.doc_id.empty()) ws.doc_id = instance.chunk.doc_id;
    const int step = ws.last_step + 1;
    ws.last_step = step;

    // Entities and their role/state histories.
    std::map<std::string, std::string> canonical; // mention name -> entity key
    for (const auto& mention : instance.entities) {
        std::string key = merge_entity(ws, mention);
        canonical[mention.name] = key;
        ReconciledEntity& entity = ws.entities.at(key);
        append_labels(entity.role_history, mention.roles, step);
        append_labels(entity.state_history, mention.states, step);
    }

    // Events, with participant names canonicalized.
    for (const auto& ev : instance.events) {
        StampedEvent stamped;
        stamped.step = step;
        stamped.event = ev;
        stamped.event.subject = canonical.at(ev.subject);
        if (ev.object) stamped.event.object = canonical.at(*ev.object);
        for (auto& valence : stamped.event.valences)
            valence.entity = canonical.at(valence.entity);
        int index = static_cast<int>(ws.events.size());
        ws.events.push_back(std::move(stamped));

        auto attach = [&](const std::string& key) {
            auto& refs = ws.entities.at(key).event_refs;
            if (std::find(refs.begin(), refs.end(), index) == refs.end())
                refs.push_back(index);
        };
        attach(ws.events.back().event.subject);
        if (ws.events.back().event.object) attach(*ws.events.back().event.object);
        for (const auto& valence : ws.events.back().event.valences) attach(valence.entity);
    }

    // Space-time nodes. An incoming node is matched to an existing workspace
    // node by location (or by time for location-less nodes); a bare-time node
    // coupled to entities that already sit on a located node is treated as a
    // time update for that node rather than a new place.
    std::map<std::string, std::set<std::string>> incoming_couplings; // node -> entities
    for (const auto& c : instance.couplings)
        incoming_couplings[c.node_id].insert(canonical.at(c.entity));

    std::map<std::string, std::string> node_map; // instance node id -> workspace node id
    for (const auto& incoming : instance.nodes) {
        std::string target;
        for (const auto& [id, node] : ws.nodes) {
            if (node_matches_value(node, incoming)) {
                target = id;
                break;
            }
        }

        if (target.empty() && !incoming.location && incoming.time_phrase) {
            // A bare time arriving with entities already anchored to a place
            // is a time update for that place: pick the most recent located,
            // still-undated node among their couplings (ids order by creation).
            const auto entities_it = incoming_couplings.find(incoming.node_id);
            if (entities_it != incoming_couplings.end()) {
                std::string best;
                for (const auto& entity_key : entities_it->second) {
                    auto entity_it = ws.entities.find(entity_key);
                    if (entity_it == ws.entities.end()) continue;
                    for (const auto& node_id : entity_it->second.coupled_nodes) {
                        const WorkspaceNode& node = ws.nodes.at(node_id);
                        if (node.location && !node.time_phrase && node_id > best)
                            best = node_id;
                    }
                }
                target = best;
            }
        }

        if (target.empty()) {
            WorkspaceNode node;
            node.node_id = format_node_id(ws.next_node_seq++);
            node.location = incoming.location;
            node.time_phrase = incoming.time_phrase;
            node.normalized_time = incoming.normalized_time;
            node.granularity = incoming.granularity;
            node.created_step = step;
            target = node.node_id;
            ws.nodes.emplace(node.node_id, std::move(node));
        } else {
            const WorkspaceNode& existing = ws.nodes.at(target);
            std::optional<std::string> new_location;
            std::optional<std::string> new_time;
            if (incoming.location &&
                (!existing.location || text::normalize_key(*existing.location) !=
                                           text::normalize_key(*incoming.location)))
                new_location = incoming.location;
            if (incoming.time_phrase &&
                (!existing.time_phrase || text::normalize_key(*existing.time_phrase) !=
                                              text::normalize_key(*incoming.time_phrase)))
                new_time = incoming.time_phrase;
            if (new_location || new_time)
                propagate_space_time(ws, target, new_location, new_time, step);
        }
        node_map[incoming.node_id] = target;
    }

    // Couplings (entities read nodes through the workspace map).
    for (const auto& c : instance.couplings)
        ws.entities.at(canonical.at(c.entity)).coupled_nodes.insert(node_map.at(c.node_id));

    // New forward questions, with ids remapped to the workspace sequence.
    for (const auto& q : instance.questions) {
        TrackedQuestion tracked;
        tracked.question = q;
        tracked.question.question_id = format_question_id(ws.next_question_seq++);
        tracked.question.status = QuestionStatus::open;
        tracked.question.answer.reset();
        tracked.question.resolved_by.reset();
        for (auto& name : tracked.question.about) name = canonical.at(name);
        tracked.origin = instance.chunk;
        tracked.origin_step = step;
        ws.questions.push_back(std::move(tracked));
    }

    return ws;
}

Workspace resolve_forward_questions(Workspace ws, const Chunk& chunk, Gateway& gateway,
                                    std::vector<std::string>* warnings, int max_tokens) {
    std::vector<const TrackedQuestion*> candidates;
    for (const auto& q : ws.questions)
        if (q.question.status == QuestionStatus::open && q.origin_step < ws.last_step)
            candidates.push_back(&q);
    if (candidates.empty()) return ws;

    std::ostringstream listing;
    for (const auto* q : candidates)
        listing << q->question.question_id << '\t' << q->question.text << '\t'
                << text::join(q->question.about, "|") << '\n';

    ChatRequest req;
    req.system_prompt = prompts::kQuestionReconcileSystem;
    req.user_prompt = prompts::render(prompts::kQuestionReconcileUser,
                                      {{"questions", listing.str()},
                                       {"doc_id", chunk.doc_id},
                                       {"chunk_index", std::to_string(chunk.index)},
                                       {"chunk_text", chunk.text}});
    req.max_tokens = max_tokens;

    ChatResponse resp;
    try {
        resp = gateway.complete("question_reconcile", req);
    } catch (const ProviderError& e) {
        if (warnings)
            warnings->push_back("question resolution skipped for " + chunk.doc_id + "#" +
                                std::to_string(chunk.index) + ": " + e.what());
        return ws;
    }

    bool in_section = false;
    for (const auto& line : text::split(resp.text, '\n')) {
        std::string header = text::collapse_whitespace(line);
        if (header == "RESOLUTIONS") {
            in_section = true;
            continue;
        }
        if (header == "END") break;
        if (!in_section || header.empty()) continue;

        auto parts = text::split(line, '\t');
        if (parts.size() != 2) {
            if (warnings)
                warnings->push_back("malformed resolution line ignored: '" + line + "'");
            continue;
        }
        std::string qid = text::collapse_whitespace(parts[0]);
        std::string answer = text::collapse_whitespace(parts[1]);
        auto it = std::find_if(ws.questions.begin(), ws.questions.end(),
                               [&](const TrackedQuestion& q) {
                                   return q.question.question_id == qid;
                               });
        if (it == ws.questions.end() || answer.empty()) {
            if (warnings)
                warnings->push_back("resolution for unknown question ignored: '" + qid + "'");
            continue;
        }
        if (it->question.status == QuestionStatus::resolved) continue;
        if (it->origin_step >= ws.last_step) continue; // never self-resolve
        it->question.status = QuestionStatus::resolved;
        it->question.answer = answer;
        it->question.resolved_by = chunk.ref();
    }
    return ws;
}

Workspace build_chapter_workspace(const std::vector<Chunk>& chunks,
                                  const std::vector<OperatorInstance>& instances,
                                  Gateway& gateway, int ordinal,
                                  std::vector<std::string>* warnings,
                                  int reconcile_max_tokens) {
    if (chunks.size() != instances.size())
        throw InputError("build_chapter_workspace: chunk/instance counts differ");
    for (std::size_t i = 1; i < instances.size(); ++i)
        if (instances[i].chunk.index <= instances[i - 1].chunk.index)
            throw InputError("build_chapter_workspace: instances out of order");

    Workspace ws;
    ws.ordinal = ordinal;
    for (std::size_t i = 0; i < instances.size(); ++i) {
        ws = reconcile_step(std::move(ws), instances[i]);
        ws = resolve_forward_questions(std::move(ws), chunks[i], gateway, warnings,
                                       reconcile_max_tokens);
    }
    return ws;
}

std::map<std::string, std::vector<CueRef>> build_cue_index(
    const std::map<std::string, Workspace>& workspaces) {
    std::map<std::string, std::set<CueRef>> index;
    for (const auto& [doc_id, ws] : workspaces) {
        for (const auto& [key, entity] : ws.entities) {
            for (const auto& alias : entity.aliases)
                index[text::normalize_key(alias)].insert({doc_id, CueKind::entity, key});
        }
        for (const auto& [node_id, node] : ws.nodes) {
            auto add_values = [&](const std::optional<std::string>& location,
                                  const std::optional<std::string>& time_phrase,
                                  const std::optional<std::string>& normalized) {
                if (location)
                    index[text::normalize_key(*location)].insert({doc_id, CueKind::node, node_id});
                if (time_phrase)
                    index[text::normalize_key(*time_phrase)].insert(
                        {doc_id, CueKind::node, node_id});
                if (normalized)
                    index[*normalized].insert({doc_id, CueKind::node, node_id});
            };
            add_values(node.location, node.time_phrase, node.normalized_time);
            for (const auto& snapshot : node.history)
                add_values(snapshot.location, snapshot.time_phrase, snapshot.normalized_time);
        }
        for (std::size_t i = 0; i < ws.events.size(); ++i) {
            index[text::normalize_key(ws.events[i].event.verb)].insert(
                {doc_id, CueKind::event, std::to_string(i)});
        }
    }
    std::map<std::string, std::vector<CueRef>> out;
    for (auto& [cue, refs] : index) out[cue] = {refs.begin(), refs.end()};
    return out;
}

GlobalMemory index_global(const std::vector<Workspace>& workspaces) {
    GlobalMemory memory;
    for (const auto& ws : workspaces) {
        if (memory.workspaces.count(ws.doc_id))
            throw InputError("index_global: duplicate doc_id " + ws.doc_id);
        memory.workspaces.emplace(ws.doc_id, ws);
    }
    memory.cue_index = build_cue_index(memory.workspaces);
    return memory;
}

void validate_workspace(const Workspace& ws) {
    for (const auto& [key, entity] : ws.entities) {
        if (entity.canonical_name != key)
            throw StateError("workspace " + ws.doc_id + ": entity key '" + key +
                             "' does not match canonical name");
        if (!entity.aliases.count(entity.canonical_name))
            throw StateError("workspace " + ws.doc_id + ": canonical name '" + key +
                             "' missing from aliases");
        for (const auto& node_id : entity.coupled_nodes)
            if (!ws.nodes.count(node_id))
                throw StateError("workspace " + ws.doc_id + ": entity '" + key +
                                 "' coupled to unknown node " + node_id);
        for (int ref : entity.event_refs)
            if (ref < 0 || ref >= static_cast<int>(ws.events.size()))
                throw StateError("workspace " + ws.doc_id + ": entity '" + key +
                                 "' references unknown event " + std::to_string(ref));
        for (const auto* history : {&entity.role_history, &entity.state_history}) {
            int prev = -1;
            for (const auto& h : *history) {
                if (h.step < prev)
                    throw StateError("workspace " + ws.doc_id +
                                     ": history steps out of order for '" + key + "'");
                prev = h.step;
            }
        }
    }
    for (const auto& stamped : ws.events) {
        if (!ws.entities.count(stamped.event.subject))
            throw StateError("workspace " + ws.doc_id + ": event subject '" +
                             stamped.event.subject + "' unknown");
        if (stamped.event.object && !ws.entities.count(*stamped.event.object))
            throw StateError("workspace " + ws.doc_id + ": event object '" +
                             *stamped.event.object + "' unknown");
        for (const auto& valence : stamped.event.valences)
            if (!ws.entities.count(valence.entity))
                throw StateError("workspace " + ws.doc_id + ": valence entity '" +
                                 valence.entity + "' unknown");
    }
    for (const auto& q : ws.questions) {
        bool resolved = q.question.status == QuestionStatus::resolved;
        if (resolved != q.question.answer.has_value())
            throw StateError("workspace " + ws.doc_id + ": question " +
                             q.question.question_id + " violates resolved <=> answer");
        for (const auto& name : q.question.about)
            if (!ws.entities.count(name))
                throw StateError("workspace " + ws.doc_id + ": question " +
                                 q.question.question_id + " about unknown entity " + name);
    }
}

} // namespace gsw
