#pragma once

#include <string>

#include "gsw/gateway.hpp"

namespace gsw {

// Offline chat backend: a deterministic rule-based stand-in for the live
// provider. Each pipeline stage gets a synthesized response derived purely
// from the prompt payload (capitalized-span entities, a small verb lexicon,
// date patterns), so end-to-end runs are reproducible byte-for-byte without
// network access or canned fixtures.
class HeuristicChatBackend : public ChatBackend {
public:
    ChatResponse complete(const ChatRequest& req, std::string_view stage) override;

private:
    std::string extract_stage(const ChatRequest& req) const;
    std::string couple_stage(const ChatRequest& req) const;
    std::string reconcile_stage(const ChatRequest& req) const;
    std::string summary_stage(const ChatRequest& req) const;
    std::string ner_stage(const ChatRequest& req) const;
    std::string answer_stage(const ChatRequest& req) const;
    std::string judge_stage(const ChatRequest& req) const;
    std::string background_stage(const ChatRequest& req) const;
};

} // namespace gsw
