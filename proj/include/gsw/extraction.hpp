#pragma once

#include "gsw/corpus.hpp"
#include "gsw/gateway.hpp"
#include "gsw/instance.hpp"

namespace gsw {

struct ExtractionOptions {
    int max_tokens = 1000;
    int coupling_max_tokens = 1000;
    int max_parse_attempts = 3; // re-prompts on unparseable output
};

/// Run the extraction prompt over one chunk and decode the structured
/// output. Questions start open, couplings empty. Unparseable output is
/// re-requested up to max_parse_attempts times, then surfaces as a
/// ProviderError carrying the raw text.
OperatorInstance extract_instance(const Chunk& chunk, Gateway& gateway,
                                  const ExtractionOptions& options = {});

/// Second pass: bind entities to space-time nodes and apply node merges the
/// provider marked as co-referent. Lines referencing unknown entities/nodes
/// are dropped into `warnings`.
OperatorInstance couple_space_time(const OperatorInstance& instance, Gateway& gateway,
                                   std::vector<std::string>* warnings = nullptr,
                                   const ExtractionOptions& options = {});

} // namespace gsw
