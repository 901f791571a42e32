#include "cforge/chunk.hpp"

#include <algorithm>
#include <stdexcept>

namespace cforge {

ChunkResult chunk_document(std::string_view text, const Tokenizer& tokenizer,
                           std::size_t max_context) {
    if (max_context < 16) throw std::invalid_argument("max_context must be >= 16");
    ChunkResult res;
    if (text.empty()) return res;

    const auto lines = line_index(text);
    std::vector<std::size_t> bounds;
    bounds.reserve(lines.size());
    for (const auto& ln : lines) bounds.push_back(ln.newline_end);

    auto fits = [&](std::size_t from, std::size_t to) {
        return tokenizer.count(text.substr(from, to - from)) <= max_context;
    };

    std::vector<std::size_t> cps;  // built lazily, only for oversize lines
    std::size_t pos = 0;
    std::size_t line_i = 0;
    std::size_t last_split_line = SIZE_MAX;

    while (pos < text.size()) {
        while (line_i < lines.size() && bounds[line_i] <= pos) ++line_i;
        if (line_i >= lines.size()) {
            res.chunks.push_back({pos, text.size()});
            break;
        }
        if (fits(pos, bounds[line_i])) {
            // Largest run of whole lines that still fits.
            std::size_t lo = line_i, hi = lines.size() - 1, best = line_i;
            while (lo <= hi) {
                std::size_t mid = lo + (hi - lo) / 2;
                if (fits(pos, bounds[mid])) {
                    best = mid;
                    lo = mid + 1;
                } else {
                    if (mid == 0) break;
                    hi = mid - 1;
                }
            }
            res.chunks.push_back({pos, bounds[best]});
            pos = bounds[best];
        } else {
            // The current line alone blows the budget: character-level split.
            if (cps.empty()) cps = codepoint_index(text);
            auto first = std::upper_bound(cps.begin(), cps.end(), pos);
            auto last = std::upper_bound(cps.begin(), cps.end(), bounds[line_i]) - 1;
            std::size_t lo = static_cast<std::size_t>(first - cps.begin());
            std::size_t hi = static_cast<std::size_t>(last - cps.begin());
            std::size_t best = lo;
            while (lo <= hi) {
                std::size_t mid = lo + (hi - lo) / 2;
                if (fits(pos, cps[mid])) {
                    best = mid;
                    lo = mid + 1;
                } else {
                    if (mid == 0) break;
                    hi = mid - 1;
                }
            }
            std::size_t end = cps[best];
            while (end > pos && !fits(pos, end)) {
                // Non-monotone tokenizer guard; shrink to the previous codepoint.
                --best;
                end = cps[best];
            }
            if (end <= pos) end = cps[static_cast<std::size_t>(first - cps.begin())];
            res.chunks.push_back({pos, end});
            if (line_i != last_split_line) {
                ++res.oversize_line_splits;
                last_split_line = line_i;
            }
            pos = end;
        }
    }
    return res;
}

}  // namespace cforge
