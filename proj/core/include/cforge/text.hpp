#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace cforge {

/// Half-open byte range into a document. All span arithmetic in the
/// toolkit is character-level; ranges are stored as byte offsets that
/// always fall on UTF-8 codepoint boundaries.
struct CharRange {
    std::size_t begin = 0;
    std::size_t end = 0;

    std::size_t size() const { return end - begin; }
    bool empty() const { return begin == end; }
    bool contains(const CharRange& other) const {
        return begin <= other.begin && other.end <= end;
    }
    friend bool operator==(const CharRange&, const CharRange&) = default;
};

bool is_valid_utf8(std::string_view text);

/// Byte offsets of every codepoint start, plus text.size() as a sentinel.
std::vector<std::size_t> codepoint_index(std::string_view text);

std::size_t count_codepoints(std::string_view text);

/// One source line: [begin, end) excludes the trailing newline;
/// newline_end includes it (equals end for the last line of a file
/// without one).
struct LineSpan {
    std::size_t begin = 0;
    std::size_t end = 0;          // position of '\n', or text size
    std::size_t newline_end = 0;  // end + 1 when a newline is present
};

/// Splits on '\n'. A trailing segment without a newline counts as a
/// line; "" has zero lines.
std::vector<LineSpan> line_index(std::string_view text);

std::size_t count_lines(std::string_view text);

/// True when pos is the end of a source line: either text.size() or the
/// index of a '\n'.
bool is_line_end(std::string_view text, std::size_t pos);

/// Lowercases ASCII, collapses every run of non-alphanumeric characters
/// to a single space. Used for license keyphrase matching.
std::string normalize_for_matching(std::string_view text);

/// Whitespace-delimited token count (sensitive-word frequency base).
std::size_t count_ws_tokens(std::string_view text);

/// Character-level (codepoint) Levenshtein distance.
std::size_t levenshtein(std::string_view a, std::string_view b);

}  // namespace cforge
