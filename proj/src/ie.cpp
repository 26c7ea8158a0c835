#include "gsw/ie.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "gsw/text.hpp"

namespace gsw::ie {

namespace {

struct Word {
    std::string raw;     // as it appears, punctuation stripped
    std::size_t begin;   // offset of the stripped word
    bool sentence_start; // first word of the sentence
};

bool is_alpha(char c) { return std::isalpha(static_cast<unsigned char>(c)) != 0; }
bool is_digit(char c) { return std::isdigit(static_cast<unsigned char>(c)) != 0; }

std::vector<Word> tokenize(const std::string& sentence) {
    std::vector<Word> words;
    std::size_t i = 0;
    const std::size_t n = sentence.size();
    bool first = true;
    while (i < n) {
        while (i < n && std::isspace(static_cast<unsigned char>(sentence[i]))) ++i;
        if (i >= n) break;
        std::size_t start = i;
        while (i < n && !std::isspace(static_cast<unsigned char>(sentence[i]))) ++i;
        std::string token = sentence.substr(start, i - start);

        std::size_t lead = 0;
        while (lead < token.size() && !is_alpha(token[lead]) && !is_digit(token[lead])) ++lead;
        std::size_t tail = token.size();
        while (tail > lead && !is_alpha(token[tail - 1]) && !is_digit(token[tail - 1])) --tail;
        if (tail > lead + 2 && token.compare(tail - 2, 2, "'s") == 0) tail -= 2;
        std::string cleaned = token.substr(lead, tail - lead);
        if (!cleaned.empty()) {
            words.push_back({cleaned, start + lead, first});
            first = false;
        }
    }
    return words;
}

bool connector_word(const std::string& w) {
    return w == "of" || w == "the" || w == "and" || w == "de" || w == "du";
}

const std::set<std::string>& relative_time_phrases() {
    static const std::set<std::string> phrases = {
        "yesterday",          "today",        "tomorrow",     "tonight",
        "last night",         "that evening", "that morning", "the next day",
        "the following day",  "the next morning",
    };
    return phrases;
}

bool is_month_word(const std::string& w) {
    return text::parse_explicit_date(w + " 1, 2000").has_value();
}

bool is_locative_preposition(const std::string& w) {
    static const std::set<std::string> preps = {"in",   "at",   "into", "inside",
                                                "near", "onto", "to",   "on"};
    return preps.count(text::to_lower(w)) > 0;
}

bool overlaps(const Span& span, const std::vector<Span>& others) {
    std::size_t a0 = span.begin, a1 = span.begin + span.surface.size();
    for (const auto& o : others) {
        std::size_t b0 = o.begin, b1 = o.begin + o.surface.size();
        if (a0 < b1 && b0 < a1) return true;
    }
    return false;
}

} // namespace

std::vector<Span> capitalized_spans(const std::string& sentence) {
    auto words = tokenize(sentence);
    std::vector<Span> spans;
    std::size_t i = 0;
    while (i < words.size()) {
        if (!text::starts_with_upper(words[i].raw)) {
            ++i;
            continue;
        }
        std::size_t j = i;
        std::size_t last_cap = i;
        while (j + 1 < words.size()) {
            const std::string& next = words[j + 1].raw;
            if (text::starts_with_upper(next)) {
                ++j;
                last_cap = j;
            } else if (connector_word(text::to_lower(next)) && j + 2 < words.size() &&
                       text::starts_with_upper(words[j + 2].raw)) {
                j += 2;
                last_cap = j;
            } else {
                break;
            }
        }
        std::size_t begin = words[i].begin;
        std::size_t end = words[last_cap].begin + words[last_cap].raw.size();
        spans.push_back({sentence.substr(begin, end - begin), begin});
        i = last_cap + 1;
    }
    return spans;
}

std::vector<Span> date_spans(const std::string& sentence) {
    std::vector<Span> spans;
    auto words = tokenize(sentence);

    // Explicit "Month D, YYYY" / "D Month YYYY" / ISO windows of 1-3 words.
    std::vector<bool> used(words.size(), false);
    for (std::size_t i = 0; i < words.size(); ++i) {
        if (used[i]) continue;
        for (std::size_t len = 3; len >= 1; --len) {
            if (i + len > words.size()) continue;
            bool overlap = false;
            std::string phrase;
            for (std::size_t k = i; k < i + len; ++k) {
                if (used[k]) overlap = true;
                if (k > i) phrase += ' ';
                phrase += words[k].raw;
            }
            if (overlap) continue;
            if (len >= 2 && !is_month_word(words[i].raw) &&
                !(len == 3 && is_month_word(words[i + 1].raw)))
                continue;
            if (auto date = text::parse_explicit_date(phrase)) {
                (void)date;
                std::size_t begin = words[i].begin;
                const Word& last = words[i + len - 1];
                std::size_t end = last.begin + last.raw.size();
                // Include the comma inside "September 22, 2026".
                std::string surface = sentence.substr(begin, end - begin);
                spans.push_back({surface, begin});
                for (std::size_t k = i; k < i + len; ++k) used[k] = true;
                break;
            }
        }
    }

    // Relative markers, longest first so "the next day" wins over "day".
    std::string lower = text::to_lower(sentence);
    for (const auto& phrase : relative_time_phrases()) {
        std::size_t at = lower.find(phrase);
        while (at != std::string::npos) {
            bool left_ok = at == 0 || !is_alpha(lower[at - 1]);
            std::size_t after = at + phrase.size();
            bool right_ok = after >= lower.size() || !is_alpha(lower[after]);
            Span candidate{sentence.substr(at, phrase.size()), at};
            if (left_ok && right_ok && !overlaps(candidate, spans))
                spans.push_back(candidate);
            at = lower.find(phrase, at + 1);
        }
    }

    std::sort(spans.begin(), spans.end(),
              [](const Span& a, const Span& b) { return a.begin < b.begin; });
    return spans;
}

std::vector<Span> location_spans(const std::string& sentence) {
    auto words = tokenize(sentence);
    auto caps = capitalized_spans(sentence);
    auto dates = date_spans(sentence);
    std::vector<Span> locations;
    for (const auto& span : caps) {
        if (overlaps(span, dates)) continue;
        // Find the word preceding the span.
        std::size_t prev = words.size();
        for (std::size_t i = 0; i < words.size(); ++i) {
            if (words[i].begin >= span.begin) break;
            prev = i;
        }
        if (prev == words.size()) continue;
        std::string before = text::to_lower(words[prev].raw);
        if (before == "the" && prev > 0) before = text::to_lower(words[prev - 1].raw);
        if (is_locative_preposition(before)) locations.push_back(span);
    }
    return locations;
}

const std::map<std::string, VerbInfo>& verb_lexicon() {
    static const std::map<std::string, VerbInfo> lexicon = {
        {"apprehended", {"apprehend", "captor", "apprehended"}},
        {"arrested", {"arrest", "officer", "arrested"}},
        {"captured", {"capture", "captor", "captured"}},
        {"presented", {"present", "presenter", ""}},
        {"explained", {"explain", "presenter", ""}},
        {"delivered", {"deliver", "presenter", ""}},
        {"discussed", {"discuss", "speaker", ""}},
        {"announced", {"announce", "announcer", "announced"}},
        {"organized", {"organize", "organizer", "organized"}},
        {"hosted", {"host", "host", ""}},
        {"attended", {"attend", "attendee", ""}},
        {"visited", {"visit", "visitor", "visited"}},
        {"toured", {"tour", "visitor", ""}},
        {"won", {"win", "winner", "awarded"}},
        {"judged", {"judge", "judge", ""}},
        {"met", {"meet", "participant", ""}},
        {"joined", {"join", "participant", ""}},
        {"interviewed", {"interview", "interviewer", "interviewed"}},
        {"questioned", {"question", "investigator", "questioned"}},
        {"unveiled", {"unveil", "presenter", "unveiled"}},
        {"demonstrated", {"demonstrate", "presenter", ""}},
        {"awarded", {"award", "judge", "awarded"}},
        {"indicted", {"indict", "prosecutor", "indicted"}},
        {"released", {"release", "", "released"}},
        {"arrived", {"arrive", "visitor", ""}},
        {"traveled", {"travel", "traveler", ""}},
        {"returned", {"return", "", ""}},
        {"spoke", {"speak", "speaker", ""}},
        {"applauded", {"applaud", "audience", "applauded"}},
    };
    return lexicon;
}

SentenceAnalysis analyze_sentence(const std::string& sentence,
                                  const std::vector<std::string>& recurring) {
    SentenceAnalysis out;
    out.dates = date_spans(sentence);
    out.locations = location_spans(sentence);

    for (const auto& span : capitalized_spans(sentence)) {
        if (overlaps(span, out.dates) || overlaps(span, out.locations)) continue;
        bool single_word = span.surface.find(' ') == std::string::npos;
        if (span.begin == 0 && single_word) {
            // Sentence openers are kept only when the same name recurs
            // mid-sentence somewhere in the surrounding text.
            bool recurs = std::find(recurring.begin(), recurring.end(), span.surface) !=
                          recurring.end();
            if (!recurs) continue;
        }
        out.entities.push_back(span);
    }

    auto words = tokenize(sentence);
    for (const auto& w : words) {
        auto it = verb_lexicon().find(text::to_lower(w.raw));
        if (it == verb_lexicon().end()) continue;
        SentenceAnalysis::EventHit hit;
        hit.verb = it->second;
        const Span* subject = nullptr;
        const Span* object = nullptr;
        for (const auto& e : out.entities) {
            if (e.begin + e.surface.size() <= w.begin) subject = &e;
            if (e.begin > w.begin && object == nullptr) object = &e;
        }
        if (subject == nullptr) continue;
        hit.subject = subject->surface;
        if (object != nullptr) hit.object = object->surface;
        out.events.push_back(std::move(hit));
    }
    return out;
}

std::vector<std::string> recurring_names(const std::vector<std::string>& sentences) {
    std::set<std::string> seen;
    for (const auto& s : sentences) {
        for (const auto& span : capitalized_spans(s)) {
            if (span.begin == 0) continue;
            bool single = span.surface.find(' ') == std::string::npos;
            if (single) seen.insert(span.surface);
        }
    }
    return {seen.begin(), seen.end()};
}

std::vector<std::string> query_cues(const std::string& question) {
    std::string normalized = text::collapse_whitespace(question);
    auto dates = date_spans(normalized);
    auto caps = capitalized_spans(normalized);

    std::vector<Span> merged = dates;
    for (const auto& span : caps) {
        if (overlaps(span, dates)) continue;
        if (span.begin == 0 && span.surface.find(' ') == std::string::npos)
            continue; // question opener ("List", "What", "Recall")
        merged.push_back(span);
    }
    std::sort(merged.begin(), merged.end(),
              [](const Span& a, const Span& b) { return a.begin < b.begin; });

    std::vector<std::string> cues;
    std::set<std::string> seen;
    for (const auto& span : merged) {
        std::string key = text::normalize_key(span.surface);
        if (seen.insert(key).second) cues.push_back(span.surface);
    }
    return cues;
}

} // namespace gsw::ie
