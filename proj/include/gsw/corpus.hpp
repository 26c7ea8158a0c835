#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gsw/gateway.hpp"
#include "gsw/instance.hpp"

namespace gsw {

struct Document {
    std::string doc_id;
    int ordinal = 0;
    std::string text;
    std::optional<std::string> resolved_text;

    bool operator==(const Document&) const = default;
};

struct Chunk {
    std::string doc_id;
    int index = 0;
    std::vector<std::string> sentences;
    std::string text; // sentences joined with single spaces
    std::optional<std::string> background_context;

    ChunkRef ref() const { return ChunkRef{doc_id, index}; }
    bool operator==(const Chunk&) const = default;
};

/// Load a newline-delimited corpus: one JSON object per line with fields
/// doc_id, ordinal, text. Documents come back ordered by ordinal.
std::vector<Document> load_corpus(const std::filesystem::path& path);

/// Stable content hash over (doc_id, ordinal, text) of every document.
std::string corpus_hash(const std::vector<Document>& docs);

// Chapter-level coreference resolution through the provider. The rewrite is
// accepted only when it keeps the sentence count within 10% of the original;
// otherwise the original text is kept and a warning is recorded.
Document resolve_coreferences(const Document& doc, Gateway& gateway,
                              std::vector<std::string>* warnings = nullptr,
                              int max_tokens = 4000);

/// Split a resolved document into consecutive chunks of `chunk_size`
/// sentences (the final chunk may be shorter). Throws InputError when the
/// document has no sentences or chunk_size < 1.
std::vector<Chunk> chunk_document(const Document& doc, int chunk_size = 3);

/// One provider call producing the short note that situates `chunk` in its
/// document (at most `max_tokens`).
std::string generate_background(const Document& doc, const Chunk& chunk, Gateway& gateway,
                                int max_tokens = 100);

} // namespace gsw
