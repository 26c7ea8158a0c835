#include "gsw/heuristic_provider.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "gsw/ie.hpp"
#include "gsw/instance.hpp"
#include "gsw/prompts.hpp"
#include "gsw/text.hpp"

namespace gsw {

namespace {

std::string past_phrase(const ie::VerbInfo& verb) {
    // Lexicon keys are the past-tense surface forms; recover one for prose.
    for (const auto& [surface, info] : ie::verb_lexicon())
        if (info.lemma == verb.lemma) return surface;
    return verb.lemma;
}

std::vector<std::string> record_values(const std::string& record, const std::string& field) {
    std::vector<std::string> values;
    for (const auto& line : text::split(record, '\n')) {
        if (line.rfind(field + ':', 0) == 0)
            values.push_back(text::collapse_whitespace(line.substr(field.size() + 1)));
    }
    return values;
}

std::string bracket_list(const std::vector<std::string>& items) {
    return "[" + text::join(items, ", ") + "]";
}

} // namespace

ChatResponse HeuristicChatBackend::complete(const ChatRequest& req, std::string_view stage) {
    std::string out;
    if (stage == "coref") {
        out = prompts::extract_tagged(req.user_prompt, "chapter");
    } else if (stage == "background") {
        out = background_stage(req);
    } else if (stage == "operator_extract") {
        out = extract_stage(req);
    } else if (stage == "space_time") {
        out = couple_stage(req);
    } else if (stage == "question_reconcile") {
        out = reconcile_stage(req);
    } else if (stage == "summary") {
        out = summary_stage(req);
    } else if (stage == "query_ner") {
        out = ner_stage(req);
    } else if (stage == "answer") {
        out = answer_stage(req);
    } else if (stage == "judge") {
        out = judge_stage(req);
    } else {
        throw ProviderError("heuristic backend has no rule for stage " + std::string(stage));
    }
    return ChatResponse{out};
}

std::string HeuristicChatBackend::background_stage(const ChatRequest& req) const {
    std::string chapter = prompts::extract_tagged(req.user_prompt, "chapter");
    std::string index = prompts::extract_tag_attribute(req.user_prompt, "passage", "index");
    auto sentences = text::split_sentences(chapter);
    std::string opening = sentences.empty() ? std::string() : sentences.front();
    auto words = text::split(opening, ' ');
    if (words.size() > 12) {
        words.resize(12);
        opening = text::join(words, " ") + " ...";
    }
    return "Passage " + index + " of a chapter that begins: " + opening;
}

std::string HeuristicChatBackend::extract_stage(const ChatRequest& req) const {
    std::string chunk_text = prompts::extract_tagged(req.user_prompt, "chunk");
    auto sentences = text::split_sentences(chunk_text);
    auto recurring = ie::recurring_names(sentences);

    struct EntityDraft {
        std::vector<std::string> roles;
        std::vector<std::string> states;
    };
    std::vector<std::string> entity_order;
    std::map<std::string, EntityDraft> entities;
    auto touch = [&](const std::string& name) -> EntityDraft& {
        if (!entities.count(name)) entity_order.push_back(name);
        return entities[name];
    };
    auto add_label = [](std::vector<std::string>& labels, const std::string& label) {
        if (label.empty()) return;
        std::string norm = text::normalize_key(label);
        if (std::find(labels.begin(), labels.end(), norm) == labels.end())
            labels.push_back(norm);
    };

    struct NodeDraft {
        std::string location;
        std::string time;
    };
    std::vector<NodeDraft> nodes;
    auto add_node = [&](const std::string& loc, const std::string& time) {
        if (loc.empty() && time.empty()) return;
        if (loc.empty() && !time.empty()) {
            // A bare time attaches to the latest node still missing one.
            for (auto it = nodes.rbegin(); it != nodes.rend(); ++it) {
                if (it->time.empty()) {
                    it->time = time;
                    return;
                }
            }
        }
        for (const auto& n : nodes)
            if (n.location == loc && n.time == time) return;
        nodes.push_back({loc, time});
    };

    struct EventDraft {
        std::string subject, verb, object;
        std::vector<std::string> valences;
    };
    std::vector<EventDraft> events;
    std::vector<std::pair<std::string, std::string>> questions; // text, about

    for (const auto& sentence : sentences) {
        auto analysis = ie::analyze_sentence(sentence, recurring);
        for (const auto& e : analysis.entities) touch(e.surface);

        std::string loc = analysis.locations.empty() ? "" : analysis.locations.front().surface;
        std::string time = analysis.dates.empty() ? "" : analysis.dates.front().surface;
        add_node(loc, time);

        for (const auto& hit : analysis.events) {
            EventDraft ev;
            ev.subject = hit.subject;
            ev.verb = hit.verb.lemma;
            ev.object = hit.object.value_or("");
            add_label(touch(ev.subject).roles, hit.verb.subject_role);
            if (hit.object) {
                touch(*hit.object);
                if (!hit.verb.object_state.empty()) {
                    add_label(touch(*hit.object).states, hit.verb.object_state);
                    ev.valences.push_back(*hit.object + ":state " + hit.verb.object_state);
                    questions.emplace_back("What happened to " + *hit.object +
                                               " after being " + hit.verb.object_state + "?",
                                           *hit.object);
                }
            }
            events.push_back(std::move(ev));
        }
    }

    for (auto& [name, draft] : entities) {
        bool in_event = false;
        for (const auto& ev : events)
            if (ev.subject == name || ev.object == name) in_event = true;
        if (draft.roles.empty() && draft.states.empty() && !in_event)
            draft.roles.push_back("participant");
    }

    std::ostringstream out;
    out << "ENTITIES\n";
    for (const auto& name : entity_order) {
        const auto& d = entities[name];
        out << name << '\t' << (d.roles.empty() ? "-" : text::join(d.roles, "|")) << '\t'
            << (d.states.empty() ? "-" : text::join(d.states, "|")) << '\n';
    }
    out << "EVENTS\n";
    for (const auto& ev : events)
        out << ev.subject << '\t' << ev.verb << '\t' << (ev.object.empty() ? "-" : ev.object)
            << '\t' << (ev.valences.empty() ? "-" : text::join(ev.valences, "|")) << '\n';
    out << "NODES\n";
    for (std::size_t i = 0; i < nodes.size(); ++i) {
        const auto& n = nodes[i];
        std::string granularity = "unspecified";
        if (!n.time.empty() && text::parse_explicit_date(n.time)) granularity = "day";
        out << 'n' << (i + 1) << '\t' << (n.location.empty() ? "-" : n.location) << '\t'
            << (n.time.empty() ? "-" : n.time) << '\t' << granularity << '\n';
    }
    out << "QUESTIONS\n";
    for (std::size_t i = 0; i < questions.size(); ++i)
        out << 'q' << (i + 1) << '\t' << questions[i].first << '\t' << questions[i].second
            << '\n';
    out << "END\n";
    return out.str();
}

std::string HeuristicChatBackend::couple_stage(const ChatRequest& req) const {
    std::string encoded = prompts::extract_tagged(req.user_prompt, "instance");
    std::string doc = prompts::extract_tag_attribute(req.user_prompt, "instance", "doc");
    std::string index = prompts::extract_tag_attribute(req.user_prompt, "instance", "index");
    ChunkRef ref{doc, index.empty() ? 0 : std::stoi(index)};

    OperatorInstance instance;
    try {
        instance = parse_structured_output(encoded, ref);
    } catch (const GrammarError&) {
        return "COUPLINGS\nMERGES\nEND\n";
    }

    std::vector<std::string> participants;
    auto note = [&](const std::string& name) {
        if (std::find(participants.begin(), participants.end(), name) == participants.end())
            participants.push_back(name);
    };
    for (const auto& ev : instance.events) {
        note(ev.subject);
        if (ev.object) note(*ev.object);
        for (const auto& v : ev.valences) note(v.entity);
    }
    std::string rationale = "event co-occurrence";
    if (participants.empty() && !instance.nodes.empty()) {
        for (const auto& e : instance.entities) note(e.name);
        rationale = "chunk co-occurrence";
    }

    std::ostringstream out;
    out << "COUPLINGS\n";
    for (const auto& name : participants)
        for (const auto& n : instance.nodes)
            out << name << '\t' << n.node_id << '\t' << rationale << '\n';
    out << "MERGES\n";
    for (std::size_t i = 0; i < instance.nodes.size(); ++i) {
        for (std::size_t j = i + 1; j < instance.nodes.size(); ++j) {
            const auto& a = instance.nodes[i];
            const auto& b = instance.nodes[j];
            bool same_place = a.location && b.location &&
                              text::normalize_key(*a.location) == text::normalize_key(*b.location);
            bool same_moment = !a.location && !b.location && a.normalized_time &&
                               b.normalized_time && *a.normalized_time == *b.normalized_time;
            if (same_place || same_moment)
                out << a.node_id << '\t' << b.node_id << '\n';
        }
    }
    out << "END\n";
    return out.str();
}

std::string HeuristicChatBackend::reconcile_stage(const ChatRequest& req) const {
    std::string questions = prompts::extract_tagged(req.user_prompt, "questions");
    std::string chunk_text = prompts::extract_tagged(req.user_prompt, "chunk");
    auto sentences = text::split_sentences(chunk_text);

    std::ostringstream out;
    out << "RESOLUTIONS\n";
    for (const auto& line : text::split(questions, '\n')) {
        auto parts = text::split(line, '\t');
        if (parts.size() < 3) continue;
        const std::string& qid = parts[0];
        for (const auto& about : text::split(parts[2], '|')) {
            std::string needle = text::collapse_whitespace(about);
            if (needle.empty()) continue;
            auto hit = std::find_if(sentences.begin(), sentences.end(),
                                    [&](const std::string& s) {
                                        return text::contains_normalized(s, needle);
                                    });
            if (hit != sentences.end()) {
                out << qid << '\t' << *hit << '\n';
                break;
            }
        }
    }
    out << "END\n";
    return out.str();
}

std::string HeuristicChatBackend::summary_stage(const ChatRequest& req) const {
    std::string record = prompts::extract_tagged(req.user_prompt, "record");
    std::string doc = prompts::extract_tag_attribute(req.user_prompt, "record", "doc");
    std::string name = prompts::extract_tag_attribute(req.user_prompt, "record", "entity");

    auto roles = record_values(record, "ROLE");
    auto states = record_values(record, "STATE");
    auto nodes = record_values(record, "NODE");
    auto events = record_values(record, "EVENT");
    auto qas = record_values(record, "QA");

    std::ostringstream out;
    out << "In chapter " << doc << ", " << name;
    if (!roles.empty())
        out << " appears as " << text::join(roles, ", ");
    else
        out << " appears";
    if (!states.empty()) out << " and is recorded as " << text::join(states, ", ");
    out << ".";

    for (const auto& node : nodes) {
        // NODE lines read "location=...; time=...; date=...".
        std::string location, when;
        for (const auto& part : text::split(node, ';')) {
            std::string p = text::collapse_whitespace(part);
            if (p.rfind("location=", 0) == 0 && p.size() > 9) location = p.substr(9);
            if (p.rfind("time=", 0) == 0 && p.size() > 5) when = p.substr(5);
        }
        if (location.empty() && when.empty()) continue;
        out << ' ';
        if (!when.empty()) out << "On " << when << ", ";
        out << name;
        if (!location.empty())
            out << " was at the " << location << ".";
        else
            out << " was present.";
    }

    for (const auto& ev : events) out << ' ' << ev << '.';
    for (const auto& qa : qas) out << " It was later established that " << qa << '.';
    return out.str();
}

std::string HeuristicChatBackend::ner_stage(const ChatRequest& req) const {
    std::string question = prompts::extract_tagged(req.user_prompt, "question");
    std::ostringstream out;
    out << "CUES\n";
    for (const auto& cue : ie::query_cues(question)) out << cue << '\n';
    out << "END\n";
    return out.str();
}

std::string HeuristicChatBackend::answer_stage(const ChatRequest& req) const {
    std::string context = prompts::extract_tagged(req.user_prompt, "context");
    std::string question = prompts::extract_tagged(req.user_prompt, "question");
    std::string lower_question = text::to_lower(question);

    if (text::collapse_whitespace(context).empty())
        return "No such events are recorded in memory. []";

    std::vector<std::string> locations, dates, names;
    std::set<std::string> seen;
    auto remember = [&](std::vector<std::string>& bucket, const std::string& value) {
        std::string key = text::normalize_key(value);
        if (!key.empty() && seen.insert(key).second) bucket.push_back(value);
    };
    auto sentences = text::split_sentences(context);
    auto recurring = ie::recurring_names(sentences);
    for (const auto& sentence : sentences) {
        auto analysis = ie::analyze_sentence(sentence, recurring);
        for (const auto& span : analysis.locations) remember(locations, span.surface);
        for (const auto& span : analysis.dates) remember(dates, span.surface);
        for (const auto& span : analysis.entities) remember(names, span.surface);
    }

    bool wants_location = lower_question.find("location") != std::string::npos ||
                          lower_question.find("where") != std::string::npos;
    bool wants_date = lower_question.find("date") != std::string::npos ||
                      lower_question.find("when") != std::string::npos;

    std::vector<std::string> items;
    if (wants_location) items.insert(items.end(), locations.begin(), locations.end());
    if (wants_date) items.insert(items.end(), dates.begin(), dates.end());
    if (!wants_location && !wants_date) {
        items = names;
        items.insert(items.end(), locations.begin(), locations.end());
        items.insert(items.end(), dates.begin(), dates.end());
    }
    if (items.empty()) return "No such events are recorded in memory. []";
    return "Based on the retrieved episodes, the answer is: " + bracket_list(items);
}

std::string HeuristicChatBackend::judge_stage(const ChatRequest& req) const {
    std::string answer = prompts::extract_tagged(req.user_prompt, "response");
    std::size_t open = answer.find('[');
    std::size_t close = answer.find(']', open == std::string::npos ? 0 : open);
    if (open != std::string::npos && close != std::string::npos && close > open)
        return answer.substr(open, close - open + 1);

    // No bracketed list: fall back to comma-separated items after a colon.
    std::size_t colon = answer.rfind(':');
    std::string tail = colon == std::string::npos ? answer : answer.substr(colon + 1);
    std::vector<std::string> items;
    for (const auto& piece : text::split(tail, ',')) {
        std::string item = text::collapse_whitespace(piece);
        while (!item.empty() && (item.back() == '.' || item.back() == '!')) item.pop_back();
        if (!item.empty()) items.push_back(item);
    }
    return bracket_list(items);
}

} // namespace gsw
