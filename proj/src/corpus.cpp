#include "gsw/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include <json.hpp>

#include "gsw/prompts.hpp"
#include "gsw/text.hpp"

namespace gsw {

std::vector<Document> load_corpus(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open corpus file: " + path.string());

    std::vector<Document> docs;
    std::set<std::string> ids;
    std::set<int> ordinals;
    std::string line;
    int line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (text::collapse_whitespace(line).empty()) continue;
        nlohmann::json record;
        try {
            record = nlohmann::json::parse(line);
        } catch (const nlohmann::json::exception& e) {
            throw InputError("corpus record at line " + std::to_string(line_no) +
                             " is not valid JSON: " + e.what());
        }
        for (const char* field : {"doc_id", "ordinal", "text"}) {
            if (!record.contains(field))
                throw InputError("corpus record at line " + std::to_string(line_no) +
                                 " is missing field '" + field + "'");
        }
        Document doc;
        doc.doc_id = record["doc_id"].get<std::string>();
        doc.ordinal = record["ordinal"].get<int>();
        doc.text = record["text"].get<std::string>();
        if (doc.text.empty())
            throw InputError("corpus record '" + doc.doc_id + "' has empty text");
        if (doc.ordinal < 0)
            throw InputError("corpus record '" + doc.doc_id + "' has negative ordinal");
        if (!ids.insert(doc.doc_id).second)
            throw InputError("duplicate doc_id in corpus: " + doc.doc_id);
        if (!ordinals.insert(doc.ordinal).second)
            throw InputError("duplicate ordinal in corpus: " + std::to_string(doc.ordinal));
        docs.push_back(std::move(doc));
    }
    std::sort(docs.begin(), docs.end(),
              [](const Document& a, const Document& b) { return a.ordinal < b.ordinal; });
    return docs;
}

std::string corpus_hash(const std::vector<Document>& docs) {
    std::string blob;
    for (const auto& doc : docs) {
        blob += doc.doc_id;
        blob += '\x1f';
        blob += std::to_string(doc.ordinal);
        blob += '\x1f';
        blob += doc.text;
        blob += '\x1e';
    }
    return text::fnv1a_hex(blob);
}

Document resolve_coreferences(const Document& doc, Gateway& gateway,
                              std::vector<std::string>* warnings, int max_tokens) {
    if (doc.text.empty()) throw InputError("resolve_coreferences: document text is empty");

    ChatRequest req;
    req.system_prompt = prompts::kCorefSystem;
    req.user_prompt = prompts::render(prompts::kCorefUser,
                                      {{"doc_id", doc.doc_id}, {"chapter_text", doc.text}});
    req.max_tokens = max_tokens;

    ChatResponse resp;
    try {
        resp = gateway.complete("coref", req);
    } catch (const ProviderError& e) {
        throw ProviderError("coreference resolution failed for document " + doc.doc_id + ": " +
                            e.what());
    }

    Document out = doc;
    std::string rewritten = text::collapse_whitespace(resp.text);
    std::size_t original_count = text::split_sentences(doc.text).size();
    std::size_t rewritten_count = text::split_sentences(rewritten).size();
    double drift = original_count == 0
                       ? 0.0
                       : std::abs(static_cast<double>(rewritten_count) -
                                  static_cast<double>(original_count)) /
                             static_cast<double>(original_count);
    if (rewritten.empty() || drift > 0.10) {
        if (warnings)
            warnings->push_back("document " + doc.doc_id + ": rewrite changed sentence count " +
                                std::to_string(original_count) + " -> " +
                                std::to_string(rewritten_count) + ", keeping original text");
        out.resolved_text = text::collapse_whitespace(doc.text);
    } else {
        out.resolved_text = rewritten;
    }
    return out;
}

std::vector<Chunk> chunk_document(const Document& doc, int chunk_size) {
    if (chunk_size < 1) throw InputError("chunk_document: chunk_size must be >= 1");
    if (!doc.resolved_text)
        throw InputError("chunk_document: document " + doc.doc_id + " has no resolved text");

    auto sentences = text::split_sentences(*doc.resolved_text);
    if (sentences.empty())
        throw InputError("chunk_document: document " + doc.doc_id + " has no sentences");

    std::vector<Chunk> chunks;
    for (std::size_t start = 0; start < sentences.size();
         start += static_cast<std::size_t>(chunk_size)) {
        Chunk chunk;
        chunk.doc_id = doc.doc_id;
        chunk.index = static_cast<int>(chunks.size());
        std::size_t end = std::min(sentences.size(), start + static_cast<std::size_t>(chunk_size));
        chunk.sentences.assign(sentences.begin() + static_cast<std::ptrdiff_t>(start),
                               sentences.begin() + static_cast<std::ptrdiff_t>(end));
        chunk.text = text::join(chunk.sentences, " ");
        chunks.push_back(std::move(chunk));
    }
    return chunks;
}

std::string generate_background(const Document& doc, const Chunk& chunk, Gateway& gateway,
                                int max_tokens) {
    ChatRequest req;
    req.system_prompt = prompts::kBackgroundSystem;
    req.user_prompt = prompts::render(
        prompts::kBackgroundUser,
        {{"doc_id", doc.doc_id},
         {"chapter_text", doc.resolved_text.value_or(doc.text)},
         {"chunk_index", std::to_string(chunk.index)},
         {"chunk_text", chunk.text}});
    req.max_tokens = max_tokens;
    return text::collapse_whitespace(gateway.complete("background", req).text);
}

} // namespace gsw
