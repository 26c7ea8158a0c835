#include "gsw/mock.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <random>
#include <thread>

#include <json.hpp>

#include "gsw/text.hpp"

namespace gsw {

std::string fixture_key(const std::string& system_prompt, const std::string& user_prompt) {
    return text::fnv1a_hex(system_prompt + '\x1f' + user_prompt);
}

FixtureChatBackend FixtureChatBackend::from_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open chat fixture file: " + path.string());
    nlohmann::json doc;
    try {
        in >> doc;
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed chat fixture file " + path.string() + ": " + e.what());
    }
    std::map<std::string, std::string> responses;
    for (auto it = doc.begin(); it != doc.end(); ++it)
        responses[it.key()] = it.value().get<std::string>();
    return FixtureChatBackend(std::move(responses));
}

void FixtureChatBackend::add(const std::string& system_prompt, const std::string& user_prompt,
                             const std::string& response) {
    responses_[fixture_key(system_prompt, user_prompt)] = response;
}

ChatResponse FixtureChatBackend::complete(const ChatRequest& req, std::string_view stage) {
    auto it = responses_.find(fixture_key(req.system_prompt, req.user_prompt));
    if (it != responses_.end()) return ChatResponse{it->second};
    if (default_response_) return ChatResponse{*default_response_};
    throw ProviderError("fixture chat backend has no response for stage " + std::string(stage) +
                        " (key " + fixture_key(req.system_prompt, req.user_prompt) + ")");
}

HashEmbeddingBackend::HashEmbeddingBackend(int dimension, std::string model_id)
    : dimension_(dimension), model_id_(std::move(model_id)) {
    if (dimension <= 0) throw ConfigError("embedding dimension must be positive");
}

EmbeddingVector HashEmbeddingBackend::embed_one(const std::string& text) const {
    std::mt19937_64 rng(text::fnv1a(model_id_ + '\x1f' + text));
    EmbeddingVector v;
    v.values.resize(static_cast<std::size_t>(dimension_));
    double norm_sq = 0.0;
    for (auto& x : v.values) {
        // Uniform in [-1, 1) from the top 53 bits; identical on every platform.
        x = 2.0 * (static_cast<double>(rng() >> 11) / 9007199254740992.0) - 1.0;
        norm_sq += x * x;
    }
    double norm = std::sqrt(norm_sq);
    if (norm > 0.0)
        for (auto& x : v.values) x /= norm;
    return v;
}

std::vector<EmbeddingVector> HashEmbeddingBackend::embed(const std::vector<std::string>& texts) {
    std::vector<EmbeddingVector> out;
    out.reserve(texts.size());
    for (const auto& t : texts) out.push_back(embed_one(t));
    return out;
}

ChatResponse InstrumentedChatBackend::complete(const ChatRequest& req, std::string_view stage) {
    int now = inflight_.fetch_add(1) + 1;
    int seen = max_inflight_.load();
    while (now > seen && !max_inflight_.compare_exchange_weak(seen, now)) {
    }
    calls_.fetch_add(1);

    struct Release {
        std::atomic<int>& counter;
        ~Release() { counter.fetch_sub(1); }
    } release{inflight_};

    if (hold_seconds_ > 0.0)
        std::this_thread::sleep_for(std::chrono::duration<double>(hold_seconds_));

    int remaining = remaining_failures_.load();
    while (remaining > 0) {
        if (remaining_failures_.compare_exchange_weak(remaining, remaining - 1))
            throw TransientProviderError("scripted transient failure");
    }
    return inner_->complete(req, stage);
}

} // namespace gsw
