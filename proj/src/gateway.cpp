#include "gsw/gateway.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <random>
#include <thread>

#include "gsw/text.hpp"

namespace gsw {

double cosine_similarity(const EmbeddingVector& a, const EmbeddingVector& b) {
    if (a.dimension() != b.dimension())
        throw ConfigError("cosine_similarity: dimension mismatch");
    double dot = 0.0, na = 0.0, nb = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i) {
        dot += a.values[i] * b.values[i];
        na += a.values[i] * a.values[i];
        nb += b.values[i] * b.values[i];
    }
    if (na == 0.0 || nb == 0.0) return 0.0;
    return dot / (std::sqrt(na) * std::sqrt(nb));
}

double estimate_cost(long total_tokens, double rate_per_million) {
    if (total_tokens < 0) throw InputError("estimate_cost: negative token count");
    return static_cast<double>(total_tokens) * rate_per_million / 1e6;
}

void UsageLedger::record_call(std::string_view stage, long prompt_tokens,
                              long completion_tokens, bool estimated) {
    std::lock_guard<std::mutex> lock(mu_);
    auto& s = stages_[std::string(stage)];
    s.calls += 1;
    s.prompt_tokens += prompt_tokens;
    s.completion_tokens += completion_tokens;
    if (estimated) s.estimated_calls += 1;
    totals_.calls += 1;
    totals_.prompt_tokens += prompt_tokens;
    totals_.completion_tokens += completion_tokens;
    if (estimated) totals_.estimated_calls += 1;
}

void UsageLedger::record_query_context(const std::string& query_id, long context_tokens) {
    std::lock_guard<std::mutex> lock(mu_);
    query_tokens_[query_id] = context_tokens;
}

std::map<std::string, StageUsage> UsageLedger::stages() const {
    std::lock_guard<std::mutex> lock(mu_);
    return stages_;
}

std::map<std::string, long> UsageLedger::query_context_tokens() const {
    std::lock_guard<std::mutex> lock(mu_);
    return query_tokens_;
}

StageUsage UsageLedger::totals() const {
    std::lock_guard<std::mutex> lock(mu_);
    return totals_;
}

long UsageLedger::total_calls() const { return totals().calls; }

long UsageLedger::total_tokens() const {
    StageUsage t = totals();
    return t.prompt_tokens + t.completion_tokens;
}

void UsageLedger::merge(const UsageLedger& other) {
    auto other_stages = other.stages();
    auto other_queries = other.query_context_tokens();
    std::lock_guard<std::mutex> lock(mu_);
    for (const auto& [name, usage] : other_stages) {
        auto& s = stages_[name];
        s.calls += usage.calls;
        s.prompt_tokens += usage.prompt_tokens;
        s.completion_tokens += usage.completion_tokens;
        s.estimated_calls += usage.estimated_calls;
        totals_.calls += usage.calls;
        totals_.prompt_tokens += usage.prompt_tokens;
        totals_.completion_tokens += usage.completion_tokens;
        totals_.estimated_calls += usage.estimated_calls;
    }
    for (const auto& [id, tokens] : other_queries) query_tokens_[id] = tokens;
}

Gateway::Gateway(std::shared_ptr<ChatBackend> chat, std::shared_ptr<EmbeddingBackend> embedding,
                 GatewayOptions options)
    : chat_(std::move(chat)), embedding_(std::move(embedding)), options_(std::move(options)) {}

ChatResponse Gateway::complete(std::string_view stage, ChatRequest req) {
    if (req.system_prompt.empty() && req.user_prompt.empty())
        throw InputError("complete: empty prompt for stage " + std::string(stage));
    if (req.model_id.empty()) req.model_id = options_.chat_model_id;

    const RetryPolicy& retry = options_.retry;
    std::string last_error;
    for (int attempt = 1; attempt <= retry.max_attempts; ++attempt) {
        try {
            ChatResponse resp = chat_->complete(req, stage);
            if (resp.prompt_tokens == 0 && resp.completion_tokens == 0) {
                resp.prompt_tokens = static_cast<long>(
                    text::count_tokens(req.system_prompt) + text::count_tokens(req.user_prompt));
                resp.completion_tokens = static_cast<long>(text::count_tokens(resp.text));
                resp.estimated_usage = true;
            }
            ledger_.record_call(stage, resp.prompt_tokens, resp.completion_tokens,
                                resp.estimated_usage);
            return resp;
        } catch (const TransientProviderError& e) {
            last_error = e.what();
            if (attempt == retry.max_attempts) break;
            if (retry.sleep_between_attempts) {
                std::size_t idx = static_cast<std::size_t>(attempt - 1);
                double base = idx < retry.backoff_seconds.size() ? retry.backoff_seconds[idx]
                                                                 : retry.backoff_seconds.back();
                // Jitter only perturbs timing, never results.
                static thread_local std::mt19937_64 rng{std::random_device{}()};
                double spread = base * retry.jitter_fraction;
                double lo = base - spread, hi = base + spread;
                double wait = lo + (hi - lo) * (static_cast<double>(rng() >> 11) /
                                                9007199254740992.0);
                std::this_thread::sleep_for(std::chrono::duration<double>(wait));
            }
        }
    }
    throw ProviderError("provider failed after " + std::to_string(retry.max_attempts) +
                        " attempts in stage " + std::string(stage) + ": " + last_error);
}

std::vector<EmbeddingVector> Gateway::embed(const std::vector<std::string>& texts) {
    if (texts.empty()) return {};
    auto vectors = embedding_->embed(texts);
    if (vectors.size() != texts.size())
        throw ProviderError("embed: provider returned " + std::to_string(vectors.size()) +
                            " vectors for " + std::to_string(texts.size()) + " inputs");
    for (const auto& v : vectors) {
        if (v.dimension() != embedding_->dimension())
            throw ConfigError("embed: vector dimension " + std::to_string(v.dimension()) +
                              " does not match configured dimension " +
                              std::to_string(embedding_->dimension()));
    }
    return vectors;
}

int Gateway::embedding_dimension() const { return embedding_->dimension(); }

std::string Gateway::embedding_model_id() const { return embedding_->model_id(); }

std::vector<std::exception_ptr> parallel_run(std::size_t count, int max_inflight,
                                             const std::function<void(std::size_t)>& task) {
    std::vector<std::exception_ptr> errors(count);
    if (count == 0) return errors;
    int workers = std::max(1, std::min<int>(max_inflight, static_cast<int>(count)));

    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) {
            try {
                task(i);
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
        return errors;
    }

    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int w = 0; w < workers; ++w) {
        pool.emplace_back([&]() {
            while (true) {
                std::size_t i = next.fetch_add(1);
                if (i >= count) return;
                try {
                    task(i);
                } catch (...) {
                    errors[i] = std::current_exception();
                }
            }
        });
    }
    for (auto& t : pool) t.join();
    return errors;
}

} // namespace gsw
