#include "gsw/store.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>

#include <json.hpp>

#include "gsw/text.hpp"

namespace gsw {

namespace {

using nlohmann::json;

json opt_to_json(const std::optional<std::string>& value) {
    return value ? json(*value) : json(nullptr);
}

std::optional<std::string> opt_from_json(const json& value) {
    if (value.is_null()) return std::nullopt;
    return value.get<std::string>();
}

json chunk_ref_to_json(const ChunkRef& ref) {
    return json{{"doc_id", ref.doc_id}, {"index", ref.index}};
}

ChunkRef chunk_ref_from_json(const json& j) {
    return ChunkRef{j.at("doc_id").get<std::string>(), j.at("index").get<int>()};
}

json event_to_json(const VerbEvent& ev) {
    json valences = json::array();
    for (const auto& v : ev.valences)
        valences.push_back(json{{"entity", v.entity}, {"label", v.label}});
    return json{{"subject", ev.subject},
                {"verb", ev.verb},
                {"object", opt_to_json(ev.object)},
                {"valences", valences}};
}

VerbEvent event_from_json(const json& j) {
    VerbEvent ev;
    ev.subject = j.at("subject").get<std::string>();
    ev.verb = j.at("verb").get<std::string>();
    ev.object = opt_from_json(j.at("object"));
    for (const auto& v : j.at("valences"))
        ev.valences.push_back({v.at("entity").get<std::string>(),
                               v.at("label").get<std::string>()});
    return ev;
}

json workspace_to_json(const Workspace& ws) {
    json entities = json::object();
    for (const auto& [key, entity] : ws.entities) {
        json roles = json::array();
        for (const auto& r : entity.role_history)
            roles.push_back(json{{"label", r.label}, {"step", r.step}});
        json states = json::array();
        for (const auto& s : entity.state_history)
            states.push_back(json{{"label", s.label}, {"step", s.step}});
        entities[key] = json{
            {"canonical_name", entity.canonical_name},
            {"aliases", std::vector<std::string>(entity.aliases.begin(), entity.aliases.end())},
            {"role_history", roles},
            {"state_history", states},
            {"event_refs", entity.event_refs},
            {"coupled_nodes", std::vector<std::string>(entity.coupled_nodes.begin(),
                                                       entity.coupled_nodes.end())},
        };
    }

    json nodes = json::object();
    for (const auto& [id, node] : ws.nodes) {
        json history = json::array();
        for (const auto& snapshot : node.history)
            history.push_back(json{{"location", opt_to_json(snapshot.location)},
                                   {"time", opt_to_json(snapshot.time_phrase)},
                                   {"date", opt_to_json(snapshot.normalized_time)},
                                   {"granularity", to_string(snapshot.granularity)},
                                   {"step", snapshot.step}});
        nodes[id] = json{{"location", opt_to_json(node.location)},
                         {"time", opt_to_json(node.time_phrase)},
                         {"date", opt_to_json(node.normalized_time)},
                         {"granularity", to_string(node.granularity)},
                         {"history", history},
                         {"created_step", node.created_step}};
    }

    json events = json::array();
    for (const auto& stamped : ws.events) {
        json e = event_to_json(stamped.event);
        e["step"] = stamped.step;
        events.push_back(e);
    }

    json questions = json::array();
    for (const auto& tracked : ws.questions) {
        questions.push_back(json{
            {"question_id", tracked.question.question_id},
            {"text", tracked.question.text},
            {"about", tracked.question.about},
            {"status",
             tracked.question.status == QuestionStatus::resolved ? "resolved" : "open"},
            {"answer", opt_to_json(tracked.question.answer)},
            {"resolved_by", tracked.question.resolved_by
                                ? chunk_ref_to_json(*tracked.question.resolved_by)
                                : json(nullptr)},
            {"origin", chunk_ref_to_json(tracked.origin)},
            {"origin_step", tracked.origin_step},
        });
    }

    return json{{"doc_id", ws.doc_id},
                {"ordinal", ws.ordinal},
                {"last_step", ws.last_step},
                {"entities", entities},
                {"nodes", nodes},
                {"events", events},
                {"questions", questions},
                {"next_node_seq", ws.next_node_seq},
                {"next_question_seq", ws.next_question_seq}};
}

Workspace workspace_from_json(const json& j) {
    Workspace ws;
    ws.doc_id = j.at("doc_id").get<std::string>();
    ws.ordinal = j.at("ordinal").get<int>();
    ws.last_step = j.at("last_step").get<int>();
    ws.next_node_seq = j.at("next_node_seq").get<int>();
    ws.next_question_seq = j.at("next_question_seq").get<int>();

    for (auto it = j.at("entities").begin(); it != j.at("entities").end(); ++it) {
        const json& e = it.value();
        ReconciledEntity entity;
        entity.canonical_name = e.at("canonical_name").get<std::string>();
        for (const auto& a : e.at("aliases")) entity.aliases.insert(a.get<std::string>());
        for (const auto& r : e.at("role_history"))
            entity.role_history.push_back({r.at("label").get<std::string>(),
                                           r.at("step").get<int>()});
        for (const auto& s : e.at("state_history"))
            entity.state_history.push_back({s.at("label").get<std::string>(),
                                            s.at("step").get<int>()});
        entity.event_refs = e.at("event_refs").get<std::vector<int>>();
        for (const auto& n : e.at("coupled_nodes"))
            entity.coupled_nodes.insert(n.get<std::string>());
        ws.entities.emplace(it.key(), std::move(entity));
    }

    for (auto it = j.at("nodes").begin(); it != j.at("nodes").end(); ++it) {
        const json& n = it.value();
        WorkspaceNode node;
        node.node_id = it.key();
        node.location = opt_from_json(n.at("location"));
        node.time_phrase = opt_from_json(n.at("time"));
        node.normalized_time = opt_from_json(n.at("date"));
        node.granularity = granularity_from_string(n.at("granularity").get<std::string>());
        node.created_step = n.at("created_step").get<int>();
        for (const auto& h : n.at("history"))
            node.history.push_back({opt_from_json(h.at("location")),
                                    opt_from_json(h.at("time")),
                                    opt_from_json(h.at("date")),
                                    granularity_from_string(h.at("granularity").get<std::string>()),
                                    h.at("step").get<int>()});
        ws.nodes.emplace(it.key(), std::move(node));
    }

    for (const auto& e : j.at("events")) {
        StampedEvent stamped;
        stamped.event = event_from_json(e);
        stamped.step = e.at("step").get<int>();
        ws.events.push_back(std::move(stamped));
    }

    for (const auto& q : j.at("questions")) {
        TrackedQuestion tracked;
        tracked.question.question_id = q.at("question_id").get<std::string>();
        tracked.question.text = q.at("text").get<std::string>();
        tracked.question.about = q.at("about").get<std::vector<std::string>>();
        tracked.question.status = q.at("status").get<std::string>() == "resolved"
                                      ? QuestionStatus::resolved
                                      : QuestionStatus::open;
        tracked.question.answer = opt_from_json(q.at("answer"));
        if (!q.at("resolved_by").is_null())
            tracked.question.resolved_by = chunk_ref_from_json(q.at("resolved_by"));
        tracked.origin = chunk_ref_from_json(q.at("origin"));
        tracked.origin_step = q.at("origin_step").get<int>();
        ws.questions.push_back(std::move(tracked));
    }
    return ws;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw StateError("cannot write file: " + path.string());
    out << content;
    if (!out) throw StateError("failed writing file: " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw StateError("cannot read file: " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

json parse_json_file(const std::filesystem::path& path) {
    try {
        return json::parse(read_text_file(path));
    } catch (const json::exception& e) {
        throw StateError("corrupt store file " + path.string() + ": " + e.what());
    }
}

std::string quote_dot(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    out.push_back('"');
    for (char c : s) {
        if (c == '"' || c == '\\') out.push_back('\\');
        out.push_back(c);
    }
    out.push_back('"');
    return out;
}

} // namespace

namespace {

// Doc ids that are already filesystem-safe keep their literal name.
std::string doc_file_name(const std::string& doc_id) {
    bool safe = !doc_id.empty() && doc_id.size() <= 64;
    for (char c : doc_id)
        safe = safe && (std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' ||
                        c == '-');
    return safe ? doc_id : entity_file_slug(doc_id);
}

} // namespace

std::filesystem::path StoreLayout::workspace_path(const std::string& doc_id) const {
    return workspaces_dir() / (doc_file_name(doc_id) + ".json");
}

std::filesystem::path StoreLayout::summary_path(const std::string& doc_id,
                                                const std::string& entity) const {
    return summaries_dir() / doc_file_name(doc_id) / (entity_file_slug(entity) + ".txt");
}

std::string entity_file_slug(const std::string& entity) {
    std::string slug;
    for (char c : entity) {
        if (std::isalnum(static_cast<unsigned char>(c)))
            slug.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
        else if (!slug.empty() && slug.back() != '_')
            slug.push_back('_');
    }
    while (!slug.empty() && slug.back() == '_') slug.pop_back();
    if (slug.size() > 48) slug.resize(48);
    if (slug.empty()) slug = "x";
    return slug + "-" + text::fnv1a_hex(entity).substr(0, 8);
}

Manifest save_store(const GlobalMemory& memory, const SummarySet& summaries,
                    const StoreLayout& layout, const std::string& corpus_hash,
                    const std::string& config_hash, bool force) {
    if (auto existing = try_load_manifest(layout)) {
        if (!force &&
            (existing->corpus_hash != corpus_hash || existing->config_hash != config_hash))
            throw StateError("store at " + layout.root.string() +
                             " was built from a different corpus/config; pass --force to "
                             "overwrite");
    }

    Manifest manifest;
    manifest.corpus_hash = corpus_hash;
    manifest.config_hash = config_hash;

    std::filesystem::create_directories(layout.workspaces_dir());
    for (const auto& [doc_id, ws] : memory.workspaces) {
        manifest.doc_ids.push_back(doc_id);
        write_text_file(layout.workspace_path(doc_id), workspace_to_json(ws).dump(2) + "\n");
    }

    for (const auto& [doc_id, per_entity] : summaries) {
        if (!memory.workspaces.count(doc_id))
            throw InputError("summaries reference unknown document: " + doc_id);
        for (const auto& [entity, summary] : per_entity) {
            write_text_file(layout.summary_path(doc_id, entity), summary.text);
            manifest.summaries[doc_id][entity] =
                SummaryMeta{summary.source_digest, summary.token_count};
        }
    }

    json doc = json{{"format_version", manifest.format_version},
                    {"corpus_hash", manifest.corpus_hash},
                    {"config_hash", manifest.config_hash},
                    {"doc_ids", manifest.doc_ids},
                    {"summaries", json::object()}};
    for (const auto& [doc_id, per_entity] : manifest.summaries) {
        json entry = json::object();
        for (const auto& [entity, meta] : per_entity)
            entry[entity] = json{{"digest", meta.source_digest}, {"tokens", meta.token_count}};
        doc["summaries"][doc_id] = entry;
    }
    write_text_file(layout.manifest_path(), doc.dump(2) + "\n");
    return manifest;
}

std::optional<Manifest> try_load_manifest(const StoreLayout& layout) {
    if (!std::filesystem::exists(layout.manifest_path())) return std::nullopt;
    return load_manifest(layout);
}

Manifest load_manifest(const StoreLayout& layout) {
    if (!std::filesystem::exists(layout.manifest_path()))
        throw StateError("no manifest at " + layout.manifest_path().string() +
                         "; run build first");
    json doc = parse_json_file(layout.manifest_path());
    Manifest manifest;
    try {
        manifest.format_version = doc.at("format_version").get<int>();
        manifest.corpus_hash = doc.at("corpus_hash").get<std::string>();
        manifest.config_hash = doc.at("config_hash").get<std::string>();
        manifest.doc_ids = doc.at("doc_ids").get<std::vector<std::string>>();
        for (auto it = doc.at("summaries").begin(); it != doc.at("summaries").end(); ++it) {
            for (auto e = it.value().begin(); e != it.value().end(); ++e)
                manifest.summaries[it.key()][e.key()] =
                    SummaryMeta{e.value().at("digest").get<std::string>(),
                                e.value().at("tokens").get<long>()};
        }
    } catch (const json::exception& e) {
        throw StateError("corrupt manifest " + layout.manifest_path().string() + ": " +
                         e.what());
    }
    return manifest;
}

std::pair<GlobalMemory, SummarySet> load_store(const StoreLayout& layout) {
    Manifest manifest = load_manifest(layout);

    GlobalMemory memory;
    for (const auto& doc_id : manifest.doc_ids) {
        auto path = layout.workspace_path(doc_id);
        json doc = parse_json_file(path);
        Workspace ws;
        try {
            ws = workspace_from_json(doc);
        } catch (const json::exception& e) {
            throw StateError("corrupt store file " + path.string() + ": " + e.what());
        }
        if (ws.doc_id != doc_id)
            throw StateError("store file " + path.string() + " holds workspace for '" +
                             ws.doc_id + "'");
        validate_workspace(ws);
        memory.workspaces.emplace(doc_id, std::move(ws));
    }
    memory.cue_index = build_cue_index(memory.workspaces);

    SummarySet summaries;
    for (const auto& [doc_id, per_entity] : manifest.summaries) {
        for (const auto& [entity, meta] : per_entity) {
            EntitySummary summary;
            summary.doc_id = doc_id;
            summary.entity = entity;
            summary.text = read_text_file(layout.summary_path(doc_id, entity));
            summary.source_digest = meta.source_digest;
            summary.token_count = meta.token_count;
            summaries[doc_id][entity] = std::move(summary);
        }
    }
    return {std::move(memory), std::move(summaries)};
}

std::string export_dot(const Workspace& ws) {
    std::ostringstream out;
    out << "digraph workspace {\n";
    out << "  rankdir=LR;\n";
    for (const auto& [key, entity] : ws.entities) {
        (void)entity;
        out << "  " << quote_dot("e:" + key) << " [shape=ellipse,label=" << quote_dot(key)
            << "];\n";
    }
    for (const auto& [id, node] : ws.nodes) {
        std::string label = node.location.value_or("");
        if (node.time_phrase) {
            if (!label.empty()) label += "\\n";
            label += *node.time_phrase;
        }
        out << "  " << quote_dot("n:" + id) << " [shape=box,label=" << quote_dot(label)
            << "];\n";
    }
    for (const auto& stamped : ws.events) {
        std::string target = stamped.event.object.value_or(stamped.event.subject);
        out << "  " << quote_dot("e:" + stamped.event.subject) << " -> "
            << quote_dot("e:" + target) << " [label=" << quote_dot(stamped.event.verb)
            << "];\n";
    }
    for (const auto& [key, entity] : ws.entities) {
        for (const auto& node_id : entity.coupled_nodes)
            out << "  " << quote_dot("e:" + key) << " -> " << quote_dot("n:" + node_id)
                << " [style=dashed];\n";
    }
    out << "}\n";
    return out.str();
}

EmbeddingCache::EmbeddingCache(std::string model_id, int dimension)
    : model_id_(std::move(model_id)), dimension_(dimension) {}

EmbeddingCache EmbeddingCache::load(const std::filesystem::path& path,
                                    const std::string& model_id, int dimension) {
    EmbeddingCache cache(model_id, dimension);
    std::ifstream in(path, std::ios::binary);
    if (!in) return cache;

    char magic[8] = {};
    in.read(magic, 8);
    if (std::string(magic, 8) != "GSWEMB1\n")
        throw StateError("corrupt embedding cache (bad magic): " + path.string());
    std::uint32_t dim = 0;
    std::uint64_t count = 0;
    in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
    in.read(reinterpret_cast<char*>(&count), sizeof(count));
    if (!in) throw StateError("corrupt embedding cache (truncated header): " + path.string());
    if (static_cast<int>(dim) != dimension) return cache; // dimension change: start fresh

    for (std::uint64_t i = 0; i < count; ++i) {
        std::uint64_t key = 0;
        std::vector<double> values(dim);
        in.read(reinterpret_cast<char*>(&key), sizeof(key));
        in.read(reinterpret_cast<char*>(values.data()),
                static_cast<std::streamsize>(sizeof(double) * dim));
        if (!in)
            throw StateError("corrupt embedding cache (truncated record): " + path.string());
        cache.entries_.emplace(key, std::move(values));
    }
    return cache;
}

void EmbeddingCache::save(const std::filesystem::path& path) const {
    std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw StateError("cannot write embedding cache: " + path.string());
    out.write("GSWEMB1\n", 8);
    std::uint32_t dim = static_cast<std::uint32_t>(dimension_);
    std::uint64_t count = entries_.size();
    out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
    out.write(reinterpret_cast<const char*>(&count), sizeof(count));
    for (const auto& [key, values] : entries_) {
        out.write(reinterpret_cast<const char*>(&key), sizeof(key));
        out.write(reinterpret_cast<const char*>(values.data()),
                  static_cast<std::streamsize>(sizeof(double) * values.size()));
    }
    if (!out) throw StateError("failed writing embedding cache: " + path.string());
}

std::optional<std::vector<double>> EmbeddingCache::get(const std::string& t) const {
    auto it = entries_.find(text::fnv1a(model_id_ + '\x1f' + t));
    if (it == entries_.end()) return std::nullopt;
    return it->second;
}

void EmbeddingCache::put(const std::string& t, const std::vector<double>& values) {
    if (static_cast<int>(values.size()) != dimension_)
        throw ConfigError("embedding cache: dimension mismatch");
    entries_[text::fnv1a(model_id_ + '\x1f' + t)] = values;
}

} // namespace gsw
