#include "gsw/http_provider.hpp"

#include <cstdlib>

#include <httplib.h>
#include <json.hpp>

namespace gsw {

namespace {

std::string bearer_token(const HttpProviderConfig& config) {
    if (config.api_key_env.empty()) return {};
    const char* value = std::getenv(config.api_key_env.c_str());
    return value ? value : std::string{};
}

// Split "https://host:port/prefix" into the client origin and path prefix.
std::pair<std::string, std::string> split_base_url(const std::string& base_url) {
    std::size_t scheme = base_url.find("://");
    std::size_t path_start =
        scheme == std::string::npos ? base_url.find('/') : base_url.find('/', scheme + 3);
    if (path_start == std::string::npos) return {base_url, ""};
    std::string prefix = base_url.substr(path_start);
    while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
    return {base_url.substr(0, path_start), prefix};
}

bool transient_status(int status) {
    return status == 408 || status == 429 || status >= 500;
}

nlohmann::json post_json(const HttpProviderConfig& config, const std::string& endpoint,
                         const nlohmann::json& body) {
    auto [origin, prefix] = split_base_url(config.base_url);
    httplib::Client client(origin);
    client.set_connection_timeout(std::chrono::duration<double>(config.timeout_seconds));
    client.set_read_timeout(std::chrono::duration<double>(config.timeout_seconds));

    httplib::Headers headers;
    std::string token = bearer_token(config);
    if (!token.empty()) headers.emplace("Authorization", "Bearer " + token);

    auto result = client.Post(prefix + endpoint, headers, body.dump(), "application/json");
    if (!result)
        throw TransientProviderError("transport failure talking to " + config.base_url + ": " +
                                     httplib::to_string(result.error()));
    if (result->status < 200 || result->status >= 300) {
        std::string message = "provider returned HTTP " + std::to_string(result->status) +
                              " for " + endpoint + ": " + result->body;
        if (transient_status(result->status)) throw TransientProviderError(message);
        throw ProviderError(message);
    }
    try {
        return nlohmann::json::parse(result->body);
    } catch (const nlohmann::json::exception& e) {
        throw ProviderError("unparseable provider response for " + endpoint + ": " + e.what());
    }
}

} // namespace

HttpChatBackend::HttpChatBackend(HttpProviderConfig config) : config_(std::move(config)) {
    if (config_.base_url.empty()) throw ConfigError("http chat backend needs provider.base_url");
}

ChatResponse HttpChatBackend::complete(const ChatRequest& req, std::string_view) {
    nlohmann::json body = {
        {"model", req.model_id},
        {"temperature", req.temperature},
        {"max_tokens", req.max_tokens},
        {"messages",
         {{{"role", "system"}, {"content", req.system_prompt}},
          {{"role", "user"}, {"content", req.user_prompt}}}},
    };
    nlohmann::json reply = post_json(config_, "/chat/completions", body);

    ChatResponse resp;
    try {
        resp.text = reply.at("choices").at(0).at("message").at("content").get<std::string>();
    } catch (const nlohmann::json::exception& e) {
        throw ProviderError(std::string("chat response missing content: ") + e.what());
    }
    if (reply.contains("usage")) {
        resp.prompt_tokens = reply["usage"].value("prompt_tokens", 0L);
        resp.completion_tokens = reply["usage"].value("completion_tokens", 0L);
    }
    return resp;
}

HttpEmbeddingBackend::HttpEmbeddingBackend(HttpProviderConfig config, std::string model_id,
                                           int dimension)
    : config_(std::move(config)), model_id_(std::move(model_id)), dimension_(dimension) {
    if (config_.base_url.empty())
        throw ConfigError("http embedding backend needs provider.base_url");
    if (dimension_ <= 0) throw ConfigError("embed.dimension must be positive");
}

std::vector<EmbeddingVector> HttpEmbeddingBackend::embed(const std::vector<std::string>& texts) {
    nlohmann::json body = {{"model", model_id_}, {"input", texts}};
    nlohmann::json reply = post_json(config_, "/embeddings", body);

    std::vector<EmbeddingVector> out(texts.size());
    try {
        for (const auto& item : reply.at("data")) {
            std::size_t index = item.at("index").get<std::size_t>();
            if (index >= out.size()) throw ProviderError("embedding index out of range");
            out[index].values = item.at("embedding").get<std::vector<double>>();
        }
    } catch (const nlohmann::json::exception& e) {
        throw ProviderError(std::string("malformed embedding response: ") + e.what());
    }
    for (const auto& v : out) {
        if (v.dimension() != dimension_)
            throw ConfigError("provider embedding dimension " + std::to_string(v.dimension()) +
                              " does not match configured " + std::to_string(dimension_));
    }
    return out;
}

} // namespace gsw
