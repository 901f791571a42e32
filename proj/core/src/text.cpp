#include "cforge/text.hpp"

#include <cctype>

namespace cforge {

namespace {

// Returns the length of the UTF-8 sequence starting at data[i], or 0 on
// malformed input. Rejects overlongs, surrogates and > U+10FFFF.
std::size_t utf8_seq_len(std::string_view s, std::size_t i) {
    unsigned char c = static_cast<unsigned char>(s[i]);
    if (c < 0x80) return 1;
    if (c < 0xC2) return 0;  // continuation byte or overlong lead
    std::size_t len;
    std::uint32_t min_cp;
    if (c < 0xE0) {
        len = 2;
        min_cp = 0x80;
    } else if (c < 0xF0) {
        len = 3;
        min_cp = 0x800;
    } else if (c < 0xF5) {
        len = 4;
        min_cp = 0x10000;
    } else {
        return 0;
    }
    if (i + len > s.size()) return 0;
    std::uint32_t cp = c & (0xFF >> (len + 1));
    for (std::size_t k = 1; k < len; ++k) {
        unsigned char cc = static_cast<unsigned char>(s[i + k]);
        if ((cc & 0xC0) != 0x80) return 0;
        cp = (cp << 6) | (cc & 0x3F);
    }
    if (cp < min_cp) return 0;
    if (cp >= 0xD800 && cp <= 0xDFFF) return 0;
    if (cp > 0x10FFFF) return 0;
    return len;
}

}  // namespace

bool is_valid_utf8(std::string_view text) {
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t len = utf8_seq_len(text, i);
        if (len == 0) return false;
        i += len;
    }
    return true;
}

std::vector<std::size_t> codepoint_index(std::string_view text) {
    std::vector<std::size_t> idx;
    idx.reserve(text.size() + 1);
    std::size_t i = 0;
    while (i < text.size()) {
        idx.push_back(i);
        std::size_t len = utf8_seq_len(text, i);
        i += (len == 0 ? 1 : len);  // tolerate junk byte-by-byte
    }
    idx.push_back(text.size());
    return idx;
}

std::size_t count_codepoints(std::string_view text) {
    std::size_t n = 0;
    std::size_t i = 0;
    while (i < text.size()) {
        std::size_t len = utf8_seq_len(text, i);
        i += (len == 0 ? 1 : len);
        ++n;
    }
    return n;
}

std::vector<LineSpan> line_index(std::string_view text) {
    std::vector<LineSpan> lines;
    std::size_t start = 0;
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] == '\n') {
            lines.push_back({start, i, i + 1});
            start = i + 1;
        }
    }
    if (start < text.size()) lines.push_back({start, text.size(), text.size()});
    return lines;
}

std::size_t count_lines(std::string_view text) {
    if (text.empty()) return 0;
    std::size_t n = 0;
    for (char c : text)
        if (c == '\n') ++n;
    if (text.back() != '\n') ++n;
    return n;
}

bool is_line_end(std::string_view text, std::size_t pos) {
    if (pos == text.size()) return true;
    return pos < text.size() && text[pos] == '\n';
}

std::string normalize_for_matching(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    bool pending_space = false;
    for (char ch : text) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (std::isalnum(c)) {
            if (pending_space && !out.empty()) out.push_back(' ');
            pending_space = false;
            out.push_back(static_cast<char>(std::tolower(c)));
        } else {
            pending_space = true;
        }
    }
    return out;
}

std::size_t count_ws_tokens(std::string_view text) {
    std::size_t n = 0;
    bool in_tok = false;
    for (char ch : text) {
        bool ws = ch == ' ' || ch == '\t' || ch == '\n' || ch == '\r' || ch == '\f' || ch == '\v';
        if (!ws && !in_tok) ++n;
        in_tok = !ws;
    }
    return n;
}

std::size_t levenshtein(std::string_view a, std::string_view b) {
    std::vector<std::size_t> ia = codepoint_index(a);
    std::vector<std::size_t> ib = codepoint_index(b);
    std::size_t n = ia.size() - 1;
    std::size_t m = ib.size() - 1;
    if (n == 0) return m;
    if (m == 0) return n;
    auto cp = [](std::string_view s, const std::vector<std::size_t>& idx, std::size_t i) {
        return s.substr(idx[i], idx[i + 1] - idx[i]);
    };
    std::vector<std::size_t> prev(m + 1);
    std::vector<std::size_t> cur(m + 1);
    for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
    for (std::size_t i = 1; i <= n; ++i) {
        cur[0] = i;
        for (std::size_t j = 1; j <= m; ++j) {
            std::size_t sub = prev[j - 1] + (cp(a, ia, i - 1) == cp(b, ib, j - 1) ? 0 : 1);
            cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
        }
        std::swap(prev, cur);
    }
    return prev[m];
}

}  // namespace cforge
