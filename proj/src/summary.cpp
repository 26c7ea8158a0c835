#include "gsw/summary.hpp"

#include <algorithm>
#include <sstream>

#include "gsw/prompts.hpp"
#include "gsw/text.hpp"

namespace gsw {

std::string render_entity_record(const Workspace& ws, const std::string& entity_key) {
    auto it = ws.entities.find(entity_key);
    if (it == ws.entities.end())
        throw InputError("unknown entity in workspace " + ws.doc_id + ": " + entity_key);
    const ReconciledEntity& entity = it->second;

    std::ostringstream out;
    out << "ENTITY: " << entity.canonical_name << '\n';
    out << "CHAPTER: " << ws.doc_id << '\n';
    if (entity.aliases.size() > 1) {
        std::vector<std::string> aliases(entity.aliases.begin(), entity.aliases.end());
        out << "ALIASES: " << text::join(aliases, " | ") << '\n';
    }

    // Chronological by reconciliation step.
    auto sorted = [](std::vector<StampedLabel> labels) {
        std::stable_sort(labels.begin(), labels.end(),
                         [](const StampedLabel& a, const StampedLabel& b) {
                             return a.step < b.step;
                         });
        return labels;
    };
    for (const auto& role : sorted(entity.role_history))
        out << "ROLE[" << role.step << "]: " << role.label << '\n';
    for (const auto& state : sorted(entity.state_history))
        out << "STATE[" << state.step << "]: " << state.label << '\n';

    for (const auto& node_id : entity.coupled_nodes) {
        const WorkspaceNode& node = ws.nodes.at(node_id);
        out << "NODE: location=" << node.location.value_or("") << "; time="
            << node.time_phrase.value_or("") << "; date=" << node.normalized_time.value_or("")
            << "; granularity=" << to_string(node.granularity) << '\n';
        for (const auto& snapshot : node.history)
            out << "NODE_HISTORY[" << snapshot.step
                << "]: location=" << snapshot.location.value_or("")
                << "; time=" << snapshot.time_phrase.value_or("") << '\n';
    }

    for (int ref : entity.event_refs) {
        const StampedEvent& stamped = ws.events.at(static_cast<std::size_t>(ref));
        out << "EVENT[" << stamped.step << "]: " << stamped.event.subject << ' '
            << stamped.event.verb;
        if (stamped.event.object) out << ' ' << *stamped.event.object;
        for (const auto& valence : stamped.event.valences)
            out << " {" << valence.entity << ": " << valence.label << '}';
        out << '\n';
    }

    for (const auto& q : ws.questions) {
        if (q.question.status != QuestionStatus::resolved) continue;
        bool relevant = std::find(q.question.about.begin(), q.question.about.end(),
                                  entity_key) != q.question.about.end();
        if (relevant)
            out << "QA: " << q.question.text << " -> " << *q.question.answer << '\n';
    }
    return out.str();
}

std::string entity_record_digest(const Workspace& ws, const std::string& entity_key) {
    return text::fnv1a_hex(render_entity_record(ws, entity_key));
}

EntitySummary summarize_entity(const Workspace& ws, const std::string& entity_key,
                               Gateway& gateway, const SummaryOptions& options) {
    std::string record = render_entity_record(ws, entity_key);

    ChatRequest req;
    req.system_prompt = prompts::kSummarySystem;
    req.user_prompt = prompts::render(prompts::kSummaryUser, {{"doc_id", ws.doc_id},
                                                              {"entity_name", entity_key},
                                                              {"record", record}});
    req.max_tokens = options.max_tokens;
    ChatResponse resp = gateway.complete("summary", req);

    EntitySummary summary;
    summary.doc_id = ws.doc_id;
    summary.entity = entity_key;
    summary.text = text::collapse_whitespace(resp.text);
    summary.source_digest = text::fnv1a_hex(record);
    summary.token_count = static_cast<long>(text::count_tokens(summary.text));
    return summary;
}

SummarizeOutcome summarize_all(const GlobalMemory& memory, const SummarySet& existing,
                               Gateway& gateway, const SummaryOptions& options,
                               int max_inflight) {
    struct Job {
        const Workspace* ws;
        std::string entity;
    };
    std::vector<Job> jobs;
    SummarizeOutcome outcome;

    for (const auto& [doc_id, ws] : memory.workspaces) {
        for (const auto& [entity_key, entity] : ws.entities) {
            std::string digest = entity_record_digest(ws, entity_key);
            auto doc_it = existing.find(doc_id);
            if (doc_it != existing.end()) {
                auto entity_it = doc_it->second.find(entity_key);
                if (entity_it != doc_it->second.end() &&
                    entity_it->second.source_digest == digest) {
                    outcome.summaries[doc_id][entity_key] = entity_it->second;
                    outcome.reused += 1;
                    continue;
                }
            }
            jobs.push_back({&ws, entity_key});
        }
    }

    std::vector<EntitySummary> results(jobs.size());
    auto errors = parallel_run(jobs.size(), max_inflight, [&](std::size_t i) {
        results[i] = summarize_entity(*jobs[i].ws, jobs[i].entity, gateway, options);
    });

    for (std::size_t i = 0; i < jobs.size(); ++i) {
        if (errors[i]) {
            try {
                std::rethrow_exception(errors[i]);
            } catch (const std::exception& e) {
                outcome.errors.push_back("summary failed for " + jobs[i].ws->doc_id + "/" +
                                         jobs[i].entity + ": " + e.what());
            }
            continue;
        }
        outcome.summaries[jobs[i].ws->doc_id][jobs[i].entity] = std::move(results[i]);
        outcome.generated += 1;
    }
    return outcome;
}

} // namespace gsw
