#pragma once

#include <memory>
#include <string>

#include "gsw/gateway.hpp"

namespace gsw {

struct HttpProviderConfig {
    std::string base_url;     // e.g. "https://api.openai.com/v1"
    std::string api_key_env;  // environment variable holding the bearer token
    double timeout_seconds = 120.0;
};

// Chat backend speaking the provider-style /chat/completions protocol.
class HttpChatBackend : public ChatBackend {
public:
    explicit HttpChatBackend(HttpProviderConfig config);

    ChatResponse complete(const ChatRequest& req, std::string_view stage) override;

private:
    HttpProviderConfig config_;
};

// Embedding backend speaking the provider-style /embeddings protocol.
class HttpEmbeddingBackend : public EmbeddingBackend {
public:
    HttpEmbeddingBackend(HttpProviderConfig config, std::string model_id, int dimension);

    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) override;
    int dimension() const override { return dimension_; }
    std::string model_id() const override { return model_id_; }

private:
    HttpProviderConfig config_;
    std::string model_id_;
    int dimension_;
};

} // namespace gsw
