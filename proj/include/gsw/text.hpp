#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gsw::text {

/// Collapse every run of whitespace to a single space and trim the ends.
std::string collapse_whitespace(std::string_view s);

/// ASCII lower-casing. Non-ASCII bytes pass through untouched.
std::string to_lower(std::string_view s);

/// Canonical form used for entity/cue/label matching: lower-cased,
/// whitespace-collapsed.
std::string normalize_key(std::string_view s);

/// Strip one leading article ("a", "an", "the") if present.
std::string strip_leading_article(std::string_view s);

// Rule-based sentence segmentation. Whitespace is collapsed first, then the
// text is split on ./!/? terminators with guards for common abbreviations,
// single-letter initials, decimal numbers, and trailing quote characters.
std::vector<std::string> split_sentences(std::string_view raw);

// Approximate tokenizer used whenever a provider does not report usage and
// for all context-size accounting: a token is a maximal run of alphanumeric
// characters or a single non-space symbol.
std::size_t count_tokens(std::string_view s);

std::uint64_t fnv1a(std::string_view s);
std::string fnv1a_hex(std::string_view s);

struct CalendarDate {
    int year = 0;
    int month = 0;
    int day = 0;

    auto operator<=>(const CalendarDate&) const = default;
    std::string iso() const;
};

/// Parse an explicit date phrase ("September 22, 2026", "22 September 2026",
/// "2026-09-22"). Relative phrases ("yesterday") do not parse.
std::optional<CalendarDate> parse_explicit_date(std::string_view phrase);

std::vector<std::string> split(std::string_view s, char sep);
std::string join(const std::vector<std::string>& parts, std::string_view sep);

bool starts_with_upper(std::string_view word);

/// Case-insensitive substring test after key normalization of both sides.
bool contains_normalized(std::string_view haystack, std::string_view needle);

} // namespace gsw::text
