#include "gsw/instance.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

#include "gsw/text.hpp"

namespace gsw {

namespace {

constexpr std::string_view kEmptyField = "-";

std::string sanitize_field(std::string_view value) {
    std::string out = text::collapse_whitespace(value);
    for (char& c : out)
        if (c == '\t') c = ' ';
    return out;
}

std::string encode_list(const std::vector<std::string>& items, char sep = '|') {
    if (items.empty()) return std::string(kEmptyField);
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i > 0) out += sep;
        out += sanitize_field(items[i]);
    }
    return out;
}

std::vector<std::string> decode_list(std::string_view field, char sep = '|') {
    if (field == kEmptyField || field.empty()) return {};
    std::vector<std::string> items;
    for (auto& part : text::split(field, sep)) {
        std::string trimmed = text::collapse_whitespace(part);
        if (!trimmed.empty()) items.push_back(std::move(trimmed));
    }
    return items;
}

std::string encode_field(const std::optional<std::string>& value) {
    if (!value || value->empty()) return std::string(kEmptyField);
    return sanitize_field(*value);
}

std::optional<std::string> decode_field(std::string_view field) {
    if (field == kEmptyField || field.empty()) return std::nullopt;
    return std::string(field);
}

struct LineReader {
    std::vector<std::string> lines;
    std::size_t pos = 0;

    explicit LineReader(std::string_view body) {
        std::string current;
        for (char c : body) {
            if (c == '\n') {
                lines.push_back(current);
                current.clear();
            } else if (c != '\r') {
                current.push_back(c);
            }
        }
        if (!current.empty()) lines.push_back(current);
        // Trailing blank lines are tolerated; blank lines inside the body are
        // grammar violations and surface as record errors.
        while (!lines.empty() && text::collapse_whitespace(lines.back()).empty())
            lines.pop_back();
    }

    bool done() const { return pos >= lines.size(); }
    int line_no() const { return static_cast<int>(pos) + 1; }
    const std::string& peek() const { return lines[pos]; }
    std::string next() { return lines[pos++]; }
};

std::vector<std::string> expect_record(const std::string& line, std::size_t fields, int line_no,
                                       std::string_view section) {
    auto parts = text::split(line, '\t');
    if (parts.size() != fields)
        throw GrammarError("section " + std::string(section) + ": expected " +
                               std::to_string(fields) + " tab-separated fields, got " +
                               std::to_string(parts.size()),
                           line_no);
    return parts;
}

} // namespace

std::string to_string(TimeGranularity g) {
    switch (g) {
        case TimeGranularity::instant: return "instant";
        case TimeGranularity::day: return "day";
        case TimeGranularity::range: return "range";
        case TimeGranularity::unspecified: return "unspecified";
    }
    return "unspecified";
}

TimeGranularity granularity_from_string(std::string_view s) {
    if (s == "instant") return TimeGranularity::instant;
    if (s == "day") return TimeGranularity::day;
    if (s == "range") return TimeGranularity::range;
    if (s == "unspecified") return TimeGranularity::unspecified;
    throw InputError("unknown time granularity: " + std::string(s));
}

void validate_instance(const OperatorInstance& instance) {
    std::set<std::string> entity_names;
    for (const auto& e : instance.entities) {
        if (e.name.empty()) throw InputError("instance has entity with empty name");
        entity_names.insert(e.name);
    }
    std::set<std::string> node_ids;
    for (const auto& n : instance.nodes) {
        if (n.node_id.empty()) throw InputError("instance has node with empty id");
        if (!node_ids.insert(n.node_id).second)
            throw InputError("duplicate node id in instance: " + n.node_id);
        if (!n.location && !n.time_phrase)
            throw InputError("node " + n.node_id + " has neither location nor time");
    }

    std::set<std::string> event_participants;
    for (const auto& ev : instance.events) {
        if (!entity_names.count(ev.subject))
            throw InputError("event subject not among entities: " + ev.subject);
        event_participants.insert(ev.subject);
        if (ev.object) {
            if (!entity_names.count(*ev.object))
                throw InputError("event object not among entities: " + *ev.object);
            event_participants.insert(*ev.object);
        }
        for (const auto& v : ev.valences) {
            if (!entity_names.count(v.entity))
                throw InputError("valence entity not among entities: " + v.entity);
            event_participants.insert(v.entity);
        }
    }

    for (const auto& e : instance.entities) {
        if (e.roles.empty() && e.states.empty() && !event_participants.count(e.name))
            throw InputError("entity " + e.name +
                             " has no roles, no states, and no event participation");
    }

    for (const auto& c : instance.couplings) {
        if (!entity_names.count(c.entity))
            throw InputError("coupling references unknown entity: " + c.entity);
        if (!node_ids.count(c.node_id))
            throw InputError("coupling references unknown node: " + c.node_id);
    }

    for (const auto& q : instance.questions) {
        if (q.question_id.empty()) throw InputError("question with empty id");
        for (const auto& name : q.about)
            if (!entity_names.count(name))
                throw InputError("question " + q.question_id +
                                 " references unknown entity: " + name);
        bool resolved = q.status == QuestionStatus::resolved;
        if (resolved != q.answer.has_value())
            throw InputError("question " + q.question_id +
                             " violates resolved <=> answer-present");
    }
}

std::string encode_instance(const OperatorInstance& instance) {
    std::ostringstream out;
    out << "ENTITIES\n";
    for (const auto& e : instance.entities)
        out << sanitize_field(e.name) << '\t' << encode_list(e.roles) << '\t'
            << encode_list(e.states) << '\n';
    out << "EVENTS\n";
    for (const auto& ev : instance.events) {
        std::vector<std::string> valences;
        valences.reserve(ev.valences.size());
        for (const auto& v : ev.valences)
            valences.push_back(sanitize_field(v.entity) + ':' + sanitize_field(v.label));
        out << sanitize_field(ev.subject) << '\t' << sanitize_field(ev.verb) << '\t'
            << encode_field(ev.object) << '\t' << encode_list(valences) << '\n';
    }
    out << "NODES\n";
    for (const auto& n : instance.nodes)
        out << sanitize_field(n.node_id) << '\t' << encode_field(n.location) << '\t'
            << encode_field(n.time_phrase) << '\t' << to_string(n.granularity) << '\n';
    out << "QUESTIONS\n";
    for (const auto& q : instance.questions)
        out << sanitize_field(q.question_id) << '\t' << sanitize_field(q.text) << '\t'
            << encode_list(q.about) << '\n';
    out << "END\n";
    return out.str();
}

OperatorInstance parse_structured_output(std::string_view output, const ChunkRef& chunk) {
    LineReader reader(output);
    OperatorInstance instance;
    instance.chunk = chunk;

    static const std::vector<std::string> section_order = {"ENTITIES", "EVENTS", "NODES",
                                                           "QUESTIONS"};

    auto expect_header = [&](const std::string& name) {
        if (reader.done())
            throw GrammarError("truncated output: missing section " + name, reader.line_no());
        std::string line = text::collapse_whitespace(reader.peek());
        if (line != name)
            throw GrammarError("expected section header " + name + ", found '" + line + "'",
                               reader.line_no());
        reader.next();
    };

    auto at_section_boundary = [&]() {
        if (reader.done()) return true;
        std::string line = text::collapse_whitespace(reader.peek());
        if (line == "END") return true;
        return std::find(section_order.begin(), section_order.end(), line) !=
               section_order.end();
    };

    expect_header("ENTITIES");
    while (!at_section_boundary()) {
        int line_no = reader.line_no();
        auto parts = expect_record(reader.next(), 3, line_no, "ENTITIES");
        EntityMention e;
        e.name = text::collapse_whitespace(parts[0]);
        if (e.name.empty()) throw GrammarError("entity with empty name", line_no);
        for (auto& r : decode_list(parts[1])) e.roles.push_back(text::normalize_key(r));
        for (auto& s : decode_list(parts[2])) e.states.push_back(text::normalize_key(s));
        e.evidence = chunk;
        instance.entities.push_back(std::move(e));
    }

    expect_header("EVENTS");
    while (!at_section_boundary()) {
        int line_no = reader.line_no();
        auto parts = expect_record(reader.next(), 4, line_no, "EVENTS");
        VerbEvent ev;
        ev.subject = text::collapse_whitespace(parts[0]);
        ev.verb = text::normalize_key(parts[1]);
        if (ev.subject.empty() || ev.verb.empty())
            throw GrammarError("event needs subject and verb", line_no);
        ev.object = decode_field(text::collapse_whitespace(parts[2]));
        for (auto& v : decode_list(parts[3])) {
            std::size_t colon = v.find(':');
            if (colon == std::string::npos)
                throw GrammarError("valence must be entity:label, got '" + v + "'", line_no);
            Valence valence;
            valence.entity = text::collapse_whitespace(v.substr(0, colon));
            valence.label = text::normalize_key(v.substr(colon + 1));
            if (valence.entity.empty() || valence.label.empty())
                throw GrammarError("valence must be entity:label, got '" + v + "'", line_no);
            ev.valences.push_back(std::move(valence));
        }
        instance.events.push_back(std::move(ev));
    }

    expect_header("NODES");
    while (!at_section_boundary()) {
        int line_no = reader.line_no();
        auto parts = expect_record(reader.next(), 4, line_no, "NODES");
        SpaceTimeNode n;
        n.node_id = text::collapse_whitespace(parts[0]);
        if (n.node_id.empty()) throw GrammarError("node with empty id", line_no);
        n.location = decode_field(text::collapse_whitespace(parts[1]));
        n.time_phrase = decode_field(text::collapse_whitespace(parts[2]));
        try {
            n.granularity = granularity_from_string(text::collapse_whitespace(parts[3]));
        } catch (const InputError& e) {
            throw GrammarError(e.what(), line_no);
        }
        if (n.time_phrase) {
            if (auto date = text::parse_explicit_date(*n.time_phrase)) {
                n.normalized_time = date->iso();
                if (n.granularity == TimeGranularity::unspecified)
                    n.granularity = TimeGranularity::day;
            }
        }
        instance.nodes.push_back(std::move(n));
    }

    expect_header("QUESTIONS");
    while (!at_section_boundary()) {
        int line_no = reader.line_no();
        auto parts = expect_record(reader.next(), 3, line_no, "QUESTIONS");
        ForwardQuestion q;
        q.question_id = text::collapse_whitespace(parts[0]);
        q.text = text::collapse_whitespace(parts[1]);
        if (q.question_id.empty() || q.text.empty())
            throw GrammarError("question needs id and text", line_no);
        q.about = decode_list(parts[2]);
        q.status = QuestionStatus::open;
        instance.questions.push_back(std::move(q));
    }

    if (reader.done()) throw GrammarError("truncated output: missing END", reader.line_no());
    if (text::collapse_whitespace(reader.peek()) != "END")
        throw GrammarError("unexpected section header '" + reader.peek() + "'",
                           reader.line_no());
    reader.next();
    if (!reader.done())
        throw GrammarError("content after END: '" + reader.peek() + "'", reader.line_no());

    try {
        validate_instance(instance);
    } catch (const InputError& e) {
        throw GrammarError(e.what(), 1);
    }
    return instance;
}

CouplingDecision parse_coupling_output(std::string_view output, const OperatorInstance& instance,
                                       std::vector<std::string>& dropped) {
    std::set<std::string> entity_names;
    for (const auto& e : instance.entities) entity_names.insert(e.name);
    std::set<std::string> node_ids;
    for (const auto& n : instance.nodes) node_ids.insert(n.node_id);

    CouplingDecision decision;
    LineReader reader(output);
    enum class Section { none, couplings, merges, done } section = Section::none;
    while (!reader.done()) {
        int line_no = reader.line_no();
        std::string line = reader.next();
        std::string header = text::collapse_whitespace(line);
        if (header == "COUPLINGS") {
            section = Section::couplings;
            continue;
        }
        if (header == "MERGES") {
            section = Section::merges;
            continue;
        }
        if (header == "END") {
            section = Section::done;
            continue;
        }
        if (header.empty()) continue;

        auto parts = text::split(line, '\t');
        if (section == Section::couplings && parts.size() == 3) {
            Coupling c{text::collapse_whitespace(parts[0]), text::collapse_whitespace(parts[1]),
                       text::collapse_whitespace(parts[2])};
            if (!entity_names.count(c.entity) || !node_ids.count(c.node_id)) {
                dropped.push_back("line " + std::to_string(line_no) +
                                  ": unknown entity or node in coupling '" + line + "'");
                continue;
            }
            decision.couplings.push_back(std::move(c));
        } else if (section == Section::merges && parts.size() == 2) {
            std::string a = text::collapse_whitespace(parts[0]);
            std::string b = text::collapse_whitespace(parts[1]);
            if (!node_ids.count(a) || !node_ids.count(b) || a == b) {
                dropped.push_back("line " + std::to_string(line_no) +
                                  ": unknown node in merge '" + line + "'");
                continue;
            }
            decision.merges.emplace_back(std::move(a), std::move(b));
        } else {
            dropped.push_back("line " + std::to_string(line_no) + ": unparseable line '" + line +
                              "'");
        }
    }
    return decision;
}

std::vector<std::string> temporal_sanity_warnings(const OperatorInstance& instance) {
    std::vector<std::string> warnings;
    std::map<std::string, const SpaceTimeNode*> nodes;
    for (const auto& n : instance.nodes) nodes[n.node_id] = &n;

    std::map<std::string, std::vector<const SpaceTimeNode*>> by_entity;
    for (const auto& c : instance.couplings) {
        auto it = nodes.find(c.node_id);
        if (it != nodes.end()) by_entity[c.entity].push_back(it->second);
    }

    auto pinned = [](const SpaceTimeNode& n) {
        return n.normalized_time &&
               (n.granularity == TimeGranularity::instant ||
                n.granularity == TimeGranularity::day);
    };

    for (const auto& [entity, entity_nodes] : by_entity) {
        for (std::size_t i = 0; i < entity_nodes.size(); ++i) {
            for (std::size_t j = i + 1; j < entity_nodes.size(); ++j) {
                const auto& a = *entity_nodes[i];
                const auto& b = *entity_nodes[j];
                if (pinned(a) && pinned(b) && *a.normalized_time == *b.normalized_time &&
                    a.location && b.location &&
                    text::normalize_key(*a.location) != text::normalize_key(*b.location)) {
                    warnings.push_back("entity " + entity + " is placed at both '" +
                                       *a.location + "' and '" + *b.location + "' on " +
                                       *a.normalized_time);
                }
            }
        }
    }
    return warnings;
}

} // namespace gsw
