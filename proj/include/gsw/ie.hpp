#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace gsw::ie {

// Lightweight surface-pattern spotting shared by the offline rule-based
// provider and the query-cue fallback. Everything here is deterministic and
// depends only on the input text.

struct Span {
    std::string surface;
    std::size_t begin = 0; // character offset within the sentence

    bool operator==(const Span&) const = default;
};

/// Maximal capitalized spans ("Carter Stewart", "Metropolitan Museum of Art");
/// lowercase connectors of/the/and are allowed when a capitalized word follows.
std::vector<Span> capitalized_spans(const std::string& sentence);

/// Date phrases: explicit dates plus a small set of relative markers
/// ("yesterday", "the next day", ...).
std::vector<Span> date_spans(const std::string& sentence);

/// Capitalized spans introduced by a locative preposition (in/at/into/...).
std::vector<Span> location_spans(const std::string& sentence);

struct VerbInfo {
    std::string lemma;
    std::string subject_role; // empty when the verb implies none
    std::string object_state; // empty when the verb implies none
};

/// Past-tense surface form -> lemma plus implied role/state transitions.
const std::map<std::string, VerbInfo>& verb_lexicon();

struct SentenceAnalysis {
    std::vector<Span> entities;  // capitalized spans minus locations and dates
    std::vector<Span> locations;
    std::vector<Span> dates;
    struct EventHit {
        VerbInfo verb;
        std::string subject;
        std::optional<std::string> object;
    };
    std::vector<EventHit> events;
};

/// Analyze one sentence. `recurring` lists names seen capitalized in
/// non-sentence-initial position anywhere in the surrounding text; a
/// single-word span opening the sentence is kept only when it recurs.
SentenceAnalysis analyze_sentence(const std::string& sentence,
                                  const std::vector<std::string>& recurring);

/// Names observed capitalized mid-sentence anywhere in `sentences`.
std::vector<std::string> recurring_names(const std::vector<std::string>& sentences);

/// Query cues in appearance order: dates first masked out, then entity-like
/// capitalized spans, deduplicated.
std::vector<std::string> query_cues(const std::string& question);

} // namespace gsw::ie
