#include "gsw/text.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <set>
#include <sstream>

namespace gsw::text {

namespace {

bool is_space(char c) {
    return std::isspace(static_cast<unsigned char>(c)) != 0;
}

bool is_alnum(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) != 0;
}

bool is_digit(char c) {
    return std::isdigit(static_cast<unsigned char>(c)) != 0;
}

bool is_upper(char c) {
    return std::isupper(static_cast<unsigned char>(c)) != 0;
}

// Abbreviations whose trailing period does not end a sentence. Compared
// lower-cased, period included.
const std::set<std::string>& abbreviations() {
    static const std::set<std::string> abbr = {
        "dr.",   "mr.",   "mrs.",  "ms.",   "prof.", "st.",   "jr.",
        "sr.",   "vs.",   "etc.",  "e.g.",  "i.e.",  "no.",   "dept.",
        "gen.",  "col.",  "sgt.",  "lt.",   "capt.", "rev.",  "hon.",
        "ave.",  "blvd.", "mt.",   "ft.",   "approx.", "inc.", "ltd.",
        "co.",   "corp.", "fig.",  "al.",   "gov.",  "sen.",  "rep.",
    };
    return abbr;
}

const std::array<std::string_view, 12>& month_names() {
    static const std::array<std::string_view, 12> names = {
        "january", "february", "march",     "april",   "may",      "june",
        "july",    "august",   "september", "october", "november", "december"};
    return names;
}

int month_from_word(std::string_view w) {
    std::string lw = to_lower(w);
    for (std::size_t i = 0; i < month_names().size(); ++i) {
        if (lw == month_names()[i]) return static_cast<int>(i) + 1;
    }
    return 0;
}

} // namespace

std::string collapse_whitespace(std::string_view s) {
    std::string out;
    out.reserve(s.size());
    bool pending_space = false;
    for (char c : s) {
        if (is_space(c)) {
            pending_space = !out.empty();
        } else {
            if (pending_space) out.push_back(' ');
            pending_space = false;
            out.push_back(c);
        }
    }
    return out;
}

std::string to_lower(std::string_view s) {
    std::string out(s);
    std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) {
        return static_cast<char>(std::tolower(c));
    });
    return out;
}

std::string normalize_key(std::string_view s) {
    return to_lower(collapse_whitespace(s));
}

std::string strip_leading_article(std::string_view s) {
    std::string t = collapse_whitespace(s);
    std::string lower = to_lower(t);
    for (std::string_view article : {"the ", "an ", "a "}) {
        if (lower.size() > article.size() && lower.compare(0, article.size(), article) == 0) {
            return t.substr(article.size());
        }
    }
    return t;
}

std::vector<std::string> split_sentences(std::string_view raw) {
    std::string norm = collapse_whitespace(raw);
    std::vector<std::string> sentences;
    if (norm.empty()) return sentences;

    const std::size_t n = norm.size();
    std::size_t start = 0;
    std::size_t i = 0;
    while (i < n) {
        char c = norm[i];
        if (c != '.' && c != '!' && c != '?') {
            ++i;
            continue;
        }

        // Swallow terminator runs ("..."/"?!") and closing quote characters.
        std::size_t end = i;
        while (end + 1 < n && (norm[end + 1] == '.' || norm[end + 1] == '!' ||
                               norm[end + 1] == '?'))
            ++end;
        while (end + 1 < n && (norm[end + 1] == '"' || norm[end + 1] == '\'' ||
                               norm[end + 1] == ')' || norm[end + 1] == ']'))
            ++end;

        bool boundary = true;

        if (c == '.' && end == i) {
            // Decimal number: digit on both sides of the period.
            if (i > 0 && i + 1 < n && is_digit(norm[i - 1]) && is_digit(norm[i + 1]))
                boundary = false;

            // Abbreviation or single-letter initial.
            if (boundary) {
                std::size_t w = i;
                while (w > 0 && !is_space(norm[w - 1])) --w;
                std::string word = to_lower(std::string_view(norm).substr(w, i - w + 1));
                if (abbreviations().count(word) > 0) boundary = false;
                if (word.size() == 2 && std::isalpha(static_cast<unsigned char>(word[0])) &&
                    i > 0 && is_upper(norm[i - 1]))
                    boundary = false;
            }
        }

        // A boundary needs following whitespace plus an upper-case, digit, or
        // quote opener; end of text always closes the sentence.
        if (boundary && end + 1 < n) {
            if (norm[end + 1] != ' ') {
                boundary = false;
            } else {
                std::size_t k = end + 1;
                while (k < n && norm[k] == ' ') ++k;
                if (k < n && !(is_upper(norm[k]) || is_digit(norm[k]) || norm[k] == '"' ||
                               norm[k] == '\'' || norm[k] == '(' || norm[k] == '['))
                    boundary = false;
            }
        }

        if (boundary) {
            sentences.emplace_back(norm.substr(start, end - start + 1));
            start = end + 1;
            while (start < n && norm[start] == ' ') ++start;
            i = start;
        } else {
            i = end + 1;
        }
    }
    if (start < n) {
        sentences.emplace_back(norm.substr(start));
    }
    return sentences;
}

std::size_t count_tokens(std::string_view s) {
    std::size_t count = 0;
    std::size_t i = 0;
    while (i < s.size()) {
        char c = s[i];
        if (is_space(c)) {
            ++i;
        } else if (is_alnum(c)) {
            ++count;
            while (i < s.size() && is_alnum(s[i])) ++i;
        } else {
            ++count;
            ++i;
        }
    }
    return count;
}

std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : s) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string fnv1a_hex(std::string_view s) {
    static const char* digits = "0123456789abcdef";
    std::uint64_t h = fnv1a(s);
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = digits[h & 0xf];
        h >>= 4;
    }
    return out;
}

std::string CalendarDate::iso() const {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04d-%02d-%02d", year, month, day);
    return buf;
}

std::optional<CalendarDate> parse_explicit_date(std::string_view phrase) {
    std::string t = collapse_whitespace(phrase);
    // Drop trailing sentence punctuation.
    while (!t.empty() && (t.back() == '.' || t.back() == ',' || t.back() == ';'))
        t.pop_back();
    if (t.empty()) return std::nullopt;

    auto valid = [](int y, int m, int d) {
        return y >= 1 && m >= 1 && m <= 12 && d >= 1 && d <= 31;
    };

    // ISO: YYYY-MM-DD
    if (t.size() == 10 && t[4] == '-' && t[7] == '-') {
        bool digits = true;
        for (std::size_t i : {0u, 1u, 2u, 3u, 5u, 6u, 8u, 9u})
            digits = digits && is_digit(t[i]);
        if (digits) {
            CalendarDate d{std::stoi(t.substr(0, 4)), std::stoi(t.substr(5, 2)),
                           std::stoi(t.substr(8, 2))};
            if (valid(d.year, d.month, d.day)) return d;
        }
    }

    std::vector<std::string> words;
    {
        std::istringstream in(t);
        std::string w;
        while (in >> w) {
            while (!w.empty() && (w.back() == ',' || w.back() == '.')) w.pop_back();
            if (!w.empty()) words.push_back(w);
        }
    }

    auto parse_day = [](const std::string& w) -> int {
        std::string d = w;
        for (std::string_view suffix : {"st", "nd", "rd", "th"}) {
            if (d.size() > suffix.size() &&
                to_lower(d).compare(d.size() - suffix.size(), suffix.size(), suffix) == 0)
                d = d.substr(0, d.size() - suffix.size());
        }
        if (d.empty() || d.size() > 2) return 0;
        for (char c : d)
            if (!is_digit(c)) return 0;
        return std::stoi(d);
    };
    auto parse_year = [](const std::string& w) -> int {
        if (w.size() != 4) return 0;
        for (char c : w)
            if (!is_digit(c)) return 0;
        return std::stoi(w);
    };

    // "Month D, YYYY"
    if (words.size() == 3) {
        if (int m = month_from_word(words[0]); m != 0) {
            int d = parse_day(words[1]);
            int y = parse_year(words[2]);
            if (valid(y, m, d)) return CalendarDate{y, m, d};
        }
        // "D Month YYYY"
        if (int m = month_from_word(words[1]); m != 0) {
            int d = parse_day(words[0]);
            int y = parse_year(words[2]);
            if (valid(y, m, d)) return CalendarDate{y, m, d};
        }
    }
    return std::nullopt;
}

std::vector<std::string> split(std::string_view s, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    for (std::size_t i = 0; i <= s.size(); ++i) {
        if (i == s.size() || s[i] == sep) {
            parts.emplace_back(s.substr(start, i - start));
            start = i + 1;
        }
    }
    return parts;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
    std::string out;
    for (std::size_t i = 0; i < parts.size(); ++i) {
        if (i > 0) out += sep;
        out += parts[i];
    }
    return out;
}

bool starts_with_upper(std::string_view word) {
    for (char c : word) {
        if (std::isalpha(static_cast<unsigned char>(c)))
            return is_upper(c);
    }
    return false;
}

bool contains_normalized(std::string_view haystack, std::string_view needle) {
    std::string h = normalize_key(haystack);
    std::string n = normalize_key(needle);
    if (n.empty()) return false;
    return h.find(n) != std::string::npos;
}

} // namespace gsw::text
