#include <algorithm>
#include <cctype>
#include <string>
#include <vector>

#include "parse_internal.hpp"

namespace cforge::detail {

namespace {

constexpr std::size_t kNoPos = static_cast<std::size_t>(-1);
constexpr std::size_t kMaxDepth = 128;

struct LLine {
    std::size_t begin = 0;       // start of first physical line
    std::size_t code_begin = 0;  // first non-whitespace char
    std::size_t code_end = 0;    // one past last code char
    std::size_t end = 0;         // one past last char, newline excluded
    std::size_t indent = 0;      // columns, tab = next multiple of 8
    std::size_t comment_begin = kNoPos;
    std::size_t header_colon = kNoPos;  // first ':' at bracket depth 0
    bool blank = true;
    std::string error;
    std::string_view first_word;
    std::string_view second_word;

    bool comment_only() const { return code_end == code_begin && comment_begin != kNoPos; }
    bool has_trailing_comment() const {
        return comment_begin != kNoPos && comment_begin >= code_end && code_end > code_begin;
    }
};

std::string_view word_at(std::string_view text, std::size_t pos) {
    std::size_t e = pos;
    while (e < text.size()) {
        char c = text[e];
        if ((c >= 'a' && c <= 'z') || c == '_') ++e;
        else break;
    }
    return text.substr(pos, e - pos);
}

struct LineScanner {
    std::string_view text;
    Deadline& deadline;
    std::vector<LLine> lines;

    enum class S { Code, Str, Triple, Comment };

    void run() {
        const std::size_t n = text.size();
        S state = S::Code;
        char quote = 0;
        long depth = 0;
        bool backslash_cont = false;

        LLine cur;
        bool have_indent = false;
        std::size_t col = 0;
        std::size_t i = 0;

        auto finalize = [&](std::size_t line_end) {
            if (!have_indent) {
                cur.code_begin = line_end;
                cur.code_end = line_end;
            }
            if (cur.code_end < cur.code_begin) cur.code_end = cur.code_begin;
            cur.end = line_end;
            cur.blank = cur.code_end == cur.code_begin && cur.comment_begin == kNoPos;
            if (!cur.blank && cur.code_end > cur.code_begin) {
                cur.first_word = word_at(text, cur.code_begin);
                std::size_t after = cur.code_begin + cur.first_word.size();
                while (after < cur.code_end && text[after] == ' ') ++after;
                cur.second_word = word_at(text, after);
            }
            lines.push_back(cur);
            cur = LLine{};
            cur.begin = line_end + 1;
            have_indent = false;
            col = 0;
            depth = 0;
        };

        while (i <= n) {
            if (deadline.expired()) return;
            const bool at_eof = i == n;
            char c = at_eof ? '\n' : text[i];

            if (c == '\n') {
                if (state == S::Str) {
                    if (cur.error.empty()) cur.error = "unterminated string literal";
                    state = S::Code;
                }
                if (state == S::Comment) state = S::Code;
                bool continues = state == S::Triple || depth > 0 || backslash_cont;
                backslash_cont = false;
                if (at_eof) {
                    if (state == S::Triple && cur.error.empty())
                        cur.error = "unterminated triple-quoted string";
                    if (depth > 0 && cur.error.empty()) cur.error = "unclosed bracket";
                    if (i > cur.begin) finalize(i);
                    return;
                }
                if (!continues) {
                    finalize(i);
                } else {
                    cur.end = i;
                }
                ++i;
                continue;
            }

            if (state == S::Comment) {
                ++i;
                continue;
            }
            if (state == S::Str || state == S::Triple) {
                if (c == '\\') {
                    i += 2;
                    continue;
                }
                if (state == S::Str && c == quote) {
                    state = S::Code;
                    cur.code_end = i + 1;
                    ++i;
                    continue;
                }
                if (state == S::Triple && c == quote && i + 3 <= n &&
                    text.substr(i, 3) == std::string(3, quote)) {
                    state = S::Code;
                    i += 3;
                    cur.code_end = i;
                    continue;
                }
                ++i;
                continue;
            }

            if (!have_indent) {
                if (c == ' ') {
                    ++col;
                    ++i;
                    continue;
                }
                if (c == '\t') {
                    col = (col / 8 + 1) * 8;
                    ++i;
                    continue;
                }
                have_indent = true;
                cur.indent = col;
                cur.code_begin = i;
                cur.code_end = i;
            }
            if (c == '#') {
                if (cur.comment_begin == kNoPos) cur.comment_begin = i;
                state = S::Comment;
                ++i;
                continue;
            }
            if (c == '\'' || c == '"') {
                if (i + 3 <= n && text[i + 1] == c && text[i + 2] == c) {
                    state = S::Triple;
                    quote = c;
                    i += 3;
                } else {
                    state = S::Str;
                    quote = c;
                    ++i;
                }
                cur.code_end = i;
                continue;
            }
            if (c == '(' || c == '[' || c == '{') ++depth;
            if (c == ')' || c == ']' || c == '}') {
                --depth;
                if (depth < 0) {
                    if (cur.error.empty()) cur.error = "unmatched closing bracket";
                    depth = 0;
                }
            }
            if (c == ':' && depth == 0 && cur.header_colon == kNoPos) cur.header_colon = i;
            if (c == '\\' && (i + 1 == n || text[i + 1] == '\n')) {
                backslash_cont = true;
                ++i;
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(c)) == 0) cur.code_end = i + 1;
            ++i;
        }
    }
};

bool is_clause_word(std::string_view w) {
    return w == "elif" || w == "else" || w == "except" || w == "finally";
}

struct Parser {
    std::string_view text;
    Deadline& deadline;
    const std::vector<LLine>& lines;
    std::size_t idx = 0;
    std::string first_error;

    Parser(std::string_view t, Deadline& d, const std::vector<LLine>& l)
        : text(t), deadline(d), lines(l) {}

    void note_error(std::size_t offset, std::string_view what) {
        if (first_error.empty())
            first_error = std::string(what) + " at offset " + std::to_string(offset);
    }

    SyntaxNode error_node(std::size_t b, std::size_t e, std::string_view what) {
        note_error(b, what);
        return {"error", {b, e}, {}, true};
    }

    bool done() const { return idx >= lines.size(); }

    std::size_t peek_meaningful() const {
        std::size_t j = idx;
        while (j < lines.size() && lines[j].blank) ++j;
        return j < lines.size() ? j : kNoPos;
    }

    void append_trailing_comment(std::vector<SyntaxNode>& out, const LLine& line) {
        if (line.has_trailing_comment())
            out.push_back({"comment", {line.comment_begin, line.end}, {}, false});
    }

    void emit_simple(std::vector<SyntaxNode>& out, const LLine& line) {
        if (line.comment_only()) {
            out.push_back({"comment", {line.comment_begin, line.end}, {}, false});
        } else if (text[line.code_begin] == '@') {
            out.push_back({"decorator", {line.code_begin, line.code_end}, {}, false});
            append_trailing_comment(out, line);
        } else {
            out.push_back({"statement", {line.code_begin, line.code_end}, {}, false});
            append_trailing_comment(out, line);
        }
        ++idx;
    }

    void parse_level(std::vector<SyntaxNode>& out, std::size_t level, std::size_t depth) {
        while (!done()) {
            if (deadline.expired()) return;
            const LLine& line = lines[idx];
            if (line.blank) {
                ++idx;
                continue;
            }
            if (line.indent < level) return;
            if (!line.error.empty()) {
                out.push_back(error_node(line.code_begin, line.end, line.error));
                ++idx;
                continue;
            }
            if (line.indent > level) {
                out.push_back(error_node(line.code_begin, line.end, "unexpected indent"));
                ++idx;
                continue;
            }
            if (line.comment_only()) {
                out.push_back({"comment", {line.comment_begin, line.end}, {}, false});
                ++idx;
                continue;
            }
            std::string_view w = line.first_word;
            std::string_view w2 = line.second_word;
            if (w == "async" && (w2 == "def" || w2 == "for" || w2 == "with")) w = w2;
            const bool header = line.header_colon != kNoPos;

            if (w == "def" && header) {
                out.push_back(parse_def(level, depth));
            } else if (w == "class" && header) {
                out.push_back(parse_class(level, depth));
            } else if (w == "if" && header) {
                out.push_back(parse_if(level, depth));
            } else if ((w == "for" || w == "while") && header) {
                out.push_back(parse_loop(level, depth, w == "for"));
            } else if (w == "try" && header) {
                out.push_back(parse_try(level, depth));
            } else if (w == "with" && header) {
                out.push_back(parse_with(level, depth));
            } else if (w == "match" && header) {
                out.push_back(parse_match(level, depth));
            } else if (is_clause_word(w) && header) {
                out.push_back(error_node(line.code_begin, line.end, "orphan clause"));
                ++idx;
            } else {
                emit_simple(out, line);
            }
        }
    }

    // Condition text between the keyword and the header colon, trimmed.
    SyntaxNode condition_node(const LLine& line, std::size_t keyword_end) {
        std::size_t b = keyword_end;
        std::size_t e = line.header_colon;
        while (b < e && std::isspace(static_cast<unsigned char>(text[b])) != 0) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1])) != 0) --e;
        if (b >= e) return error_node(line.code_begin, line.code_end, "empty condition");
        return {"condition", {b, e}, {}, false};
    }

    // The caller sits on the header line; consumes it and its suite.
    SyntaxNode parse_suite(std::size_t level, std::size_t depth) {
        const LLine& header = lines[idx];
        ++idx;
        std::size_t b = header.header_colon + 1;
        std::size_t e = header.has_trailing_comment() ? header.comment_begin : header.code_end;
        if (e > header.code_end) e = header.code_end;
        while (b < e && std::isspace(static_cast<unsigned char>(text[b])) != 0) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1])) != 0) --e;
        if (b < e) {
            SyntaxNode block{"block", {b, e}, {}, false};
            block.children.push_back({"statement", {b, e}, {}, false});
            return block;
        }

        std::size_t j = peek_meaningful();
        if (j == kNoPos || lines[j].indent <= level) {
            return SyntaxNode{
                "block",
                {header.end, header.end},
                {error_node(header.end, header.end, "expected indented block")},
                false};
        }
        std::size_t body_indent = lines[j].indent;
        SyntaxNode block{"block", {lines[j].code_begin, lines[j].end}, {}, false};
        if (depth > kMaxDepth) {
            while (!done()) {
                const LLine& line = lines[idx];
                if (line.blank) {
                    ++idx;
                    continue;
                }
                if (line.indent <= level) break;
                block.children.push_back(
                    {"statement", {line.code_begin, line.code_end}, {}, false});
                ++idx;
            }
        } else {
            parse_level(block.children, body_indent, depth + 1);
        }
        if (block.children.empty()) {
            block.children.push_back(
                error_node(header.end, header.end, "expected indented block"));
        }
        block.char_range.begin = block.children.front().char_range.begin;
        block.char_range.end = block.children.back().char_range.end;
        return block;
    }

    SyntaxNode parse_def(std::size_t level, std::size_t depth) {
        const LLine& header = lines[idx];
        SyntaxNode node{"function_definition", {header.code_begin, header.end}, {}, false};
        node.children.push_back(
            {"signature", {header.code_begin, header.header_colon + 1}, {}, false});
        if (header.has_trailing_comment())
            node.children.push_back({"comment", {header.comment_begin, header.end}, {}, false});
        node.children.push_back(parse_suite(level, depth));
        node.char_range.end = node.children.back().char_range.end;
        return node;
    }

    SyntaxNode parse_class(std::size_t level, std::size_t depth) {
        const LLine& header = lines[idx];
        SyntaxNode node{"class_definition", {header.code_begin, header.end}, {}, false};
        if (header.has_trailing_comment())
            node.children.push_back({"comment", {header.comment_begin, header.end}, {}, false});
        node.children.push_back(parse_suite(level, depth));
        node.char_range.end = node.children.back().char_range.end;
        return node;
    }

    std::size_t keyword_end(const LLine& line) const {
        std::size_t b = line.code_begin;
        if (line.first_word == "async") {
            b += 5;
            while (b < line.code_end && text[b] == ' ') ++b;
        }
        return b + word_at(text, b).size();
    }

    SyntaxNode parse_if(std::size_t level, std::size_t depth) {
        const LLine& header = lines[idx];
        SyntaxNode node{"if_statement", {header.code_begin, header.end}, {}, false};
        node.children.push_back(condition_node(header, keyword_end(header)));
        node.children.push_back(parse_suite(level, depth));
        while (true) {
            std::size_t j = peek_meaningful();
            if (j == kNoPos || lines[j].indent != level ||
                lines[j].header_colon == kNoPos)
                break;
            std::string_view w = lines[j].first_word;
            if (w == "elif") {
                idx = j;
                const LLine& cl = lines[idx];
                SyntaxNode clause{"elif_clause", {cl.code_begin, cl.end}, {}, false};
                clause.children.push_back(condition_node(cl, cl.code_begin + 4));
                clause.children.push_back(parse_suite(level, depth));
                clause.char_range.end = clause.children.back().char_range.end;
                node.children.push_back(std::move(clause));
            } else if (w == "else") {
                idx = j;
                node.children.push_back(parse_simple_clause("else_clause", level, depth));
                break;
            } else {
                break;
            }
        }
        node.char_range.end = node.children.back().char_range.end;
        return node;
    }

    SyntaxNode parse_simple_clause(const char* kind, std::size_t level, std::size_t depth) {
        const LLine& cl = lines[idx];
        SyntaxNode clause{kind, {cl.code_begin, cl.end}, {}, false};
        clause.children.push_back(parse_suite(level, depth));
        clause.char_range.end = clause.children.back().char_range.end;
        return clause;
    }

    SyntaxNode parse_loop(std::size_t level, std::size_t depth, bool is_for) {
        const LLine& header = lines[idx];
        SyntaxNode node{is_for ? "for_statement" : "while_statement",
                        {header.code_begin, header.end},
                        {},
                        false};
        node.children.push_back(condition_node(header, keyword_end(header)));
        node.children.push_back(parse_suite(level, depth));
        std::size_t j = peek_meaningful();
        if (j != kNoPos && lines[j].indent == level && lines[j].first_word == "else" &&
            lines[j].header_colon != kNoPos) {
            idx = j;
            node.children.push_back(parse_simple_clause("else_clause", level, depth));
        }
        node.char_range.end = node.children.back().char_range.end;
        return node;
    }

    SyntaxNode parse_try(std::size_t level, std::size_t depth) {
        const LLine& header = lines[idx];
        SyntaxNode node{"try_statement", {header.code_begin, header.end}, {}, false};
        node.children.push_back(parse_suite(level, depth));
        while (true) {
            std::size_t j = peek_meaningful();
            if (j == kNoPos || lines[j].indent != level ||
                lines[j].header_colon == kNoPos)
                break;
            std::string_view w = lines[j].first_word;
            if (w == "except") {
                idx = j;
                const LLine& cl = lines[idx];
                SyntaxNode clause{"except_clause", {cl.code_begin, cl.end}, {}, false};
                std::size_t kw_end = cl.code_begin + 6;
                if (kw_end < cl.header_colon) {
                    SyntaxNode cond = condition_node(cl, kw_end);
                    if (!cond.is_error) clause.children.push_back(std::move(cond));
                }
                clause.children.push_back(parse_suite(level, depth));
                clause.char_range.end = clause.children.back().char_range.end;
                node.children.push_back(std::move(clause));
            } else if (w == "finally") {
                idx = j;
                node.children.push_back(parse_simple_clause("finally_clause", level, depth));
            } else if (w == "else") {
                idx = j;
                node.children.push_back(parse_simple_clause("else_clause", level, depth));
            } else {
                break;
            }
        }
        node.char_range.end = node.children.back().char_range.end;
        return node;
    }

    SyntaxNode parse_with(std::size_t level, std::size_t depth) {
        const LLine& header = lines[idx];
        SyntaxNode node{"with_statement", {header.code_begin, header.end}, {}, false};
        node.children.push_back(condition_node(header, keyword_end(header)));
        node.children.push_back(parse_suite(level, depth));
        node.char_range.end = node.children.back().char_range.end;
        return node;
    }

    SyntaxNode parse_match(std::size_t level, std::size_t depth) {
        const LLine& header = lines[idx];
        SyntaxNode node{"match_statement", {header.code_begin, header.end}, {}, false};
        node.children.push_back(condition_node(header, keyword_end(header)));
        ++idx;

        std::size_t j = peek_meaningful();
        if (j == kNoPos || lines[j].indent <= level) {
            node.children.push_back(SyntaxNode{
                "block",
                {header.end, header.end},
                {error_node(header.end, header.end, "expected indented block")},
                false});
            node.char_range.end = header.end;
            return node;
        }
        std::size_t case_indent = lines[j].indent;
        SyntaxNode block{"block", {lines[j].code_begin, lines[j].end}, {}, false};
        while (!done()) {
            if (deadline.expired()) break;
            std::size_t k = peek_meaningful();
            if (k == kNoPos || lines[k].indent < case_indent) break;
            idx = k;
            const LLine& line = lines[idx];
            if (line.indent == case_indent && line.first_word == "case" &&
                line.header_colon != kNoPos && line.error.empty()) {
                SyntaxNode clause{"case_clause", {line.code_begin, line.end}, {}, false};
                clause.children.push_back(condition_node(line, line.code_begin + 4));
                clause.children.push_back(parse_suite(case_indent, depth + 1));
                clause.char_range.end = clause.children.back().char_range.end;
                block.children.push_back(std::move(clause));
            } else if (!line.error.empty()) {
                block.children.push_back(error_node(line.code_begin, line.end, line.error));
                ++idx;
            } else {
                emit_simple(block.children, line);
            }
        }
        if (block.children.empty())
            block.children.push_back(
                error_node(header.end, header.end, "expected case clause"));
        block.char_range.begin = block.children.front().char_range.begin;
        block.char_range.end = block.children.back().char_range.end;
        node.children.push_back(std::move(block));
        node.char_range.end = node.children.back().char_range.end;
        return node;
    }
};

}  // namespace

ParserResult parse_python(std::string_view text, Deadline& deadline) {
    ParserResult result;
    LineScanner scanner{text, deadline};
    scanner.run();

    Parser parser(text, deadline, scanner.lines);
    SyntaxNode root{"module", {0, text.size()}, {}, false};
    std::size_t base_indent = 0;
    for (const LLine& line : scanner.lines) {
        if (!line.blank) {
            base_indent = line.indent;
            break;
        }
    }
    parser.parse_level(root.children, base_indent, 0);
    while (!parser.done()) {
        const LLine& line = scanner.lines[parser.idx];
        if (!line.blank)
            root.children.push_back(
                parser.error_node(line.code_begin, line.end, "inconsistent dedent"));
        ++parser.idx;
    }
    result.root = std::move(root);
    result.timed_out = deadline.hit();
    result.error_detail = parser.first_error;
    return result;
}

}  // namespace cforge::detail
