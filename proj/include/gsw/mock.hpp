#pragma once

#include <atomic>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "gsw/gateway.hpp"

namespace gsw {

/// Stable fixture key for a chat call: fnv1a hex of system prompt and user
/// prompt joined with a unit separator.
std::string fixture_key(const std::string& system_prompt, const std::string& user_prompt);

// Canned chat backend: responses looked up by fixture_key. Unknown keys
// return the configured default response, or raise ProviderError when no
// default is set.
class FixtureChatBackend : public ChatBackend {
public:
    FixtureChatBackend() = default;
    explicit FixtureChatBackend(std::map<std::string, std::string> responses)
        : responses_(std::move(responses)) {}

    static FixtureChatBackend from_file(const std::filesystem::path& path);

    void add(const std::string& system_prompt, const std::string& user_prompt,
             const std::string& response);
    void set_default_response(std::string response) { default_response_ = std::move(response); }

    ChatResponse complete(const ChatRequest& req, std::string_view stage) override;

private:
    std::map<std::string, std::string> responses_;
    std::optional<std::string> default_response_;
};

// Deterministic embedding backend: the text (plus model id) seeds a PRNG that
// fills a vector of the configured dimension, then the vector is normalized
// to unit length. Identical text always yields an identical vector.
class HashEmbeddingBackend : public EmbeddingBackend {
public:
    explicit HashEmbeddingBackend(int dimension, std::string model_id = "mock-embed");

    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
    int dimension() const override { return dimension_; }
    std::string model_id() const override { return model_id_; }

    EmbeddingVector embed_one(const std::string& text) const;

private:
    int dimension_;
    std::string model_id_;
};

// Wraps another chat backend and tracks concurrency plus call counts; can be
// scripted to fail the first N calls with a transient error.
class InstrumentedChatBackend : public ChatBackend {
public:
    explicit InstrumentedChatBackend(std::shared_ptr<ChatBackend> inner,
                                     int transient_failures = 0, double hold_seconds = 0.0)
        : inner_(std::move(inner)),
          remaining_failures_(transient_failures),
          hold_seconds_(hold_seconds) {}

    ChatResponse complete(const ChatRequest& req, std::string_view stage) override;

    long calls() const { return calls_.load(); }
    int max_observed_inflight() const { return max_inflight_.load(); }

private:
    std::shared_ptr<ChatBackend> inner_;
    std::atomic<long> calls_{0};
    std::atomic<int> inflight_{0};
    std::atomic<int> max_inflight_{0};
    std::atomic<int> remaining_failures_;
    double hold_seconds_;
};

} // namespace gsw
