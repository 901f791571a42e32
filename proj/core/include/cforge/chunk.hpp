#pragma once

#include <string_view>
#include <vector>

#include "cforge/text.hpp"
#include "cforge/tokenizer.hpp"

namespace cforge {

struct ChunkResult {
    std::vector<CharRange> chunks;
    // Count of lines that alone exceeded max_context and had to be
    // split mid-line.
    std::size_t oversize_line_splits = 0;
};

/// Splits a document into contiguous ranges that each tokenize to at
/// most max_context tokens. Boundaries land on line ends whenever a
/// line end exists inside the feasible window; a single line longer
/// than the budget is split at the character level and reported.
/// Concatenating the chunks reproduces the document exactly.
ChunkResult chunk_document(std::string_view text, const Tokenizer& tokenizer,
                           std::size_t max_context);

}  // namespace cforge
