#pragma once

#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <string>
#include <string_view>
#include <vector>

#include "gsw/errors.hpp"

namespace gsw {

struct ChatRequest {
    std::string model_id;
    std::string system_prompt;
    std::string user_prompt;
    double temperature = 0.0;
    int max_tokens = 512;
};

struct ChatResponse {
    std::string text;
    long prompt_tokens = 0;
    long completion_tokens = 0;
    // Set when the backend did not report usage and the counts above were
    // approximated with the whitespace+punctuation tokenizer.
    bool estimated_usage = false;
};

struct EmbeddingVector {
    std::vector<double> values;

    int dimension() const { return static_cast<int>(values.size()); }
    bool operator==(const EmbeddingVector&) const = default;
};

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b);

class ChatBackend {
public:
    virtual ~ChatBackend() = default;
    // `stage` names the pipeline step making the call; backends may ignore it.
    virtual ChatResponse complete(const ChatRequest& req, std::string_view stage) = 0;
};

class EmbeddingBackend {
public:
    virtual ~EmbeddingBackend() = default;
    virtual std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts) = 0;
    virtual int dimension() const = 0;
    virtual std::string model_id() const = 0;
};

/// Cost of a token count at a per-million-token rate (default $2.50/M).
double estimate_cost(long total_tokens, double rate_per_million = 2.50);

struct StageUsage {
    long calls = 0;
    long prompt_tokens = 0;
    long completion_tokens = 0;
    long estimated_calls = 0;

    bool operator==(const StageUsage&) const = default;
};

// Thread-safe token accounting, grouped by pipeline stage plus per-query
// context token records.
class UsageLedger {
public:
    void record_call(std::string_view stage, long prompt_tokens, long completion_tokens,
                     bool estimated);
    void record_query_context(const std::string& query_id, long context_tokens);

    std::map<std::string, StageUsage> stages() const;
    std::map<std::string, long> query_context_tokens() const;
    StageUsage totals() const;
    long total_calls() const;
    long total_tokens() const;

    void merge(const UsageLedger& other);

private:
    mutable std::mutex mu_;
    std::map<std::string, StageUsage> stages_;
    std::map<std::string, long> query_tokens_;
    StageUsage totals_;
};

struct RetryPolicy {
    int max_attempts = 3;
    std::vector<double> backoff_seconds = {0.5, 2.0, 8.0};
    double jitter_fraction = 0.1;
    bool sleep_between_attempts = true; // tests disable the real sleeps
};

struct GatewayOptions {
    std::string chat_model_id = "gpt-4o";
    RetryPolicy retry;
    int max_inflight = 8;
};

// Front door for every provider interaction: applies the retry policy,
// records usage, and exposes the embedding backend.
class Gateway {
public:
    Gateway(std::shared_ptr<ChatBackend> chat, std::shared_ptr<EmbeddingBackend> embedding,
            GatewayOptions options = {});

    ChatResponse complete(std::string_view stage, ChatRequest req);
    std::vector<EmbeddingVector> embed(const std::vector<std::string>& texts);

    UsageLedger& ledger() { return ledger_; }
    const UsageLedger& ledger() const { return ledger_; }
    const GatewayOptions& options() const { return options_; }
    int embedding_dimension() const;
    std::string embedding_model_id() const;

private:
    std::shared_ptr<ChatBackend> chat_;
    std::shared_ptr<EmbeddingBackend> embedding_;
    GatewayOptions options_;
    UsageLedger ledger_;
};

// Runs `count` tasks with at most `max_inflight` running at once. Tasks are
// dispatched in index order (FIFO); exceptions are captured per index so a
// failing task does not abort its siblings.
std::vector<std::exception_ptr> parallel_run(std::size_t count, int max_inflight,
                                             const std::function<void(std::size_t)>& task);

} // namespace gsw
