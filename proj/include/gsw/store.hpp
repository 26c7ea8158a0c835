#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gsw/summary.hpp"
#include "gsw/workspace.hpp"

namespace gsw {

// On-disk layout:
//   <root>/manifest.json
//   <root>/workspaces/<doc_id>.json
//   <root>/summaries/<doc_id>/<entity-slug>.txt
//   <root>/cache/embeddings.bin
struct StoreLayout {
    std::filesystem::path root;

    std::filesystem::path manifest_path() const { return root / "manifest.json"; }
    std::filesystem::path workspaces_dir() const { return root / "workspaces"; }
    std::filesystem::path workspace_path(const std::string& doc_id) const;
    std::filesystem::path summaries_dir() const { return root / "summaries"; }
    std::filesystem::path summary_path(const std::string& doc_id,
                                       const std::string& entity) const;
    std::filesystem::path embedding_cache_path() const {
        return root / "cache" / "embeddings.bin";
    }
    std::filesystem::path usage_path() const { return root / "usage.json"; }
};

/// Filesystem-safe slug for an entity name, suffixed with a short hash so
/// names that normalize alike cannot collide.
std::string entity_file_slug(const std::string& entity);

struct SummaryMeta {
    std::string source_digest;
    long token_count = 0;

    bool operator==(const SummaryMeta&) const = default;
};

struct Manifest {
    int format_version = 1;
    std::string corpus_hash;
    std::string config_hash;
    std::vector<std::string> doc_ids; // sorted
    std::map<std::string, std::map<std::string, SummaryMeta>> summaries;

    bool operator==(const Manifest&) const = default;
};

/// Write memory and summaries under the layout root. An existing manifest
/// with different corpus/config hashes is refused unless force is set.
Manifest save_store(const GlobalMemory& memory, const SummarySet& summaries,
                    const StoreLayout& layout, const std::string& corpus_hash,
                    const std::string& config_hash, bool force = false);

std::optional<Manifest> try_load_manifest(const StoreLayout& layout);
Manifest load_manifest(const StoreLayout& layout);

/// Load memory and summaries; referential integrity is re-validated and the
/// cue index rebuilt. Missing manifest or corrupt files raise StateError.
std::pair<GlobalMemory, SummarySet> load_store(const StoreLayout& layout);

/// Graphviz rendering of one workspace: one graph node per entity and
/// space-time node, one edge per coupling and per verb event.
std::string export_dot(const Workspace& ws);

// Embedding cache keyed by (model id, text hash). Binary file format:
// magic "GSWEMB1\n", u32 dimension, u64 count, then per record a u64 key
// followed by `dimension` float64 values. Records are written sorted by key.
class EmbeddingCache {
public:
    EmbeddingCache() = default;
    EmbeddingCache(std::string model_id, int dimension);

    static EmbeddingCache load(const std::filesystem::path& path, const std::string& model_id,
                               int dimension);
    void save(const std::filesystem::path& path) const;

    std::optional<std::vector<double>> get(const std::string& text) const;
    void put(const std::string& text, const std::vector<double>& values);
    std::size_t size() const { return entries_.size(); }
    int dimension() const { return dimension_; }

private:
    std::string model_id_;
    int dimension_ = 0;
    std::map<std::uint64_t, std::vector<double>> entries_;
};

} // namespace gsw
