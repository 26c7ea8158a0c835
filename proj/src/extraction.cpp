#include "gsw/extraction.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "gsw/prompts.hpp"
#include "gsw/text.hpp"

namespace gsw {

OperatorInstance extract_instance(const Chunk& chunk, Gateway& gateway,
                                  const ExtractionOptions& options) {
    if (text::collapse_whitespace(chunk.text).empty())
        throw InputError("extract_instance: chunk text is empty");

    ChatRequest req;
    req.system_prompt = prompts::kOperatorSystem;
    req.user_prompt = prompts::render(
        prompts::kOperatorUser,
        {{"background_context", chunk.background_context.value_or("")},
         {"doc_id", chunk.doc_id},
         {"chunk_index", std::to_string(chunk.index)},
         {"chunk_text", chunk.text}});
    req.max_tokens = options.max_tokens;

    std::string last_output;
    std::string last_error;
    for (int attempt = 1; attempt <= options.max_parse_attempts; ++attempt) {
        ChatResponse resp = gateway.complete("operator_extract", req);
        last_output = resp.text;
        try {
            return parse_structured_output(resp.text, chunk.ref());
        } catch (const GrammarError& e) {
            last_error = e.what();
        }
    }
    throw ProviderError("extraction output for chunk " + chunk.doc_id + "#" +
                        std::to_string(chunk.index) + " never parsed (" + last_error +
                        "); raw output:\n" + last_output);
}

OperatorInstance couple_space_time(const OperatorInstance& instance, Gateway& gateway,
                                   std::vector<std::string>* warnings,
                                   const ExtractionOptions& options) {
    if (instance.nodes.empty()) return instance;

    ChatRequest req;
    req.system_prompt = prompts::kSpaceTimeSystem;
    req.user_prompt = prompts::render(
        prompts::kSpaceTimeUser,
        {{"doc_id", instance.chunk.doc_id},
         {"chunk_index", std::to_string(instance.chunk.index)},
         {"instance", encode_instance(instance)}});
    req.max_tokens = options.coupling_max_tokens;

    ChatResponse resp = gateway.complete("space_time", req);
    std::vector<std::string> dropped;
    CouplingDecision decision = parse_coupling_output(resp.text, instance, dropped);
    if (warnings)
        for (auto& d : dropped) warnings->push_back(std::move(d));

    OperatorInstance out = instance;

    // Apply merges first: redirect the merged node's couplings, keep the
    // surviving node, and fold any location/time the loser carried.
    std::map<std::string, std::string> redirect;
    auto survivor_of = [&](std::string id) {
        while (true) {
            auto it = redirect.find(id);
            if (it == redirect.end()) return id;
            id = it->second;
        }
    };
    for (const auto& [keep, lose] : decision.merges) {
        std::string target = survivor_of(keep);
        std::string source = survivor_of(lose);
        if (target == source) continue;
        redirect[source] = target;
    }
    if (!redirect.empty()) {
        std::map<std::string, SpaceTimeNode*> by_id;
        for (auto& n : out.nodes) by_id[n.node_id] = &n;
        for (const auto& [lose, keep] : redirect) {
            SpaceTimeNode* loser = by_id.at(lose);
            SpaceTimeNode* survivor = by_id.at(survivor_of(keep));
            if (!survivor->location && loser->location) survivor->location = loser->location;
            if (!survivor->time_phrase && loser->time_phrase) {
                survivor->time_phrase = loser->time_phrase;
                survivor->normalized_time = loser->normalized_time;
                survivor->granularity = loser->granularity;
            }
        }
        std::erase_if(out.nodes,
                      [&](const SpaceTimeNode& n) { return redirect.count(n.node_id) > 0; });
    }

    std::set<std::pair<std::string, std::string>> seen;
    for (auto c : decision.couplings) {
        c.node_id = survivor_of(c.node_id);
        if (seen.insert({c.entity, c.node_id}).second) out.couplings.push_back(std::move(c));
    }

    validate_instance(out);
    if (warnings)
        for (auto& w : temporal_sanity_warnings(out)) warnings->push_back(std::move(w));
    return out;
}

} // namespace gsw
