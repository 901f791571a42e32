#include <algorithm>
#include <cctype>
#include <string>
#include <vector>

#include "parse_internal.hpp"

namespace cforge::detail {

namespace {

struct Tok {
    enum Kind { Ident, Num, Str, Comment, Preproc, Punct } kind;
    std::size_t begin;
    std::size_t end;
};

bool ident_start(unsigned char c) {
    return std::isalpha(c) != 0 || c == '_' || c == '$' || c >= 0x80;
}
bool ident_cont(unsigned char c) {
    return std::isalnum(c) != 0 || c == '_' || c == '$' || c >= 0x80;
}

struct Lexer {
    std::string_view text;
    Language lang;
    Deadline& deadline;
    std::vector<Tok> toks;
    std::vector<std::pair<std::size_t, std::string>> lex_errors;

    Lexer(std::string_view t, Language l, Deadline& d) : text(t), lang(l), deadline(d) {}

    char at(std::size_t i) const { return i < text.size() ? text[i] : '\0'; }

    bool prev_allows_regex() const {
        for (auto it = toks.rbegin(); it != toks.rend(); ++it) {
            if (it->kind == Tok::Comment) continue;
            if (it->kind == Tok::Punct) return true;
            if (it->kind == Tok::Ident) {
                std::string_view w = text.substr(it->begin, it->end - it->begin);
                return w == "return" || w == "typeof" || w == "case" || w == "in" ||
                       w == "of" || w == "instanceof" || w == "new" || w == "delete" ||
                       w == "void" || w == "do" || w == "else";
            }
            return false;
        }
        return true;
    }

    void run() {
        std::size_t i = 0;
        const std::size_t n = text.size();
        bool line_start = true;
        while (i < n) {
            if (deadline.expired()) return;
            unsigned char c = static_cast<unsigned char>(text[i]);
            if (c == '\n') {
                line_start = true;
                ++i;
                continue;
            }
            if (std::isspace(c)) {
                ++i;
                continue;
            }
            if (c == '#' && line_start && lang == Language::Cpp) {
                std::size_t b = i;
                while (i < n) {
                    if (text[i] == '\n' && !(i > 0 && text[i - 1] == '\\')) break;
                    ++i;
                }
                toks.push_back({Tok::Preproc, b, i});
                line_start = true;
                continue;
            }
            line_start = false;
            if (c == '/' && at(i + 1) == '/') {
                std::size_t b = i;
                while (i < n && text[i] != '\n') ++i;
                toks.push_back({Tok::Comment, b, i});
                continue;
            }
            if (c == '/' && at(i + 1) == '*') {
                std::size_t b = i;
                std::size_t close = text.find("*/", i + 2);
                if (close == std::string_view::npos) {
                    lex_errors.emplace_back(b, "unterminated block comment");
                    i = n;
                } else {
                    i = close + 2;
                }
                toks.push_back({Tok::Comment, b, i});
                continue;
            }
            if (c == '"' || c == '\'') {
                lex_quoted(i, static_cast<char>(c));
                continue;
            }
            if (c == '`' && lang == Language::JavaScript) {
                lex_template(i);
                continue;
            }
            if (c == '/' && lang == Language::JavaScript && at(i + 1) != '/' &&
                at(i + 1) != '*' && prev_allows_regex()) {
                if (lex_regex(i)) continue;
            }
            if (ident_start(c)) {
                std::size_t b = i;
                while (i < n && ident_cont(static_cast<unsigned char>(text[i]))) ++i;
                // C++ raw string literal: prefix ending in R directly before a quote
                if (lang == Language::Cpp && at(i) == '"' && text[i - 1] == 'R') {
                    lex_raw_string(b, i);
                    continue;
                }
                toks.push_back({Tok::Ident, b, i});
                continue;
            }
            if (std::isdigit(c) != 0 || (c == '.' && std::isdigit(static_cast<unsigned char>(at(i + 1))) != 0)) {
                std::size_t b = i;
                ++i;
                while (i < n) {
                    unsigned char d = static_cast<unsigned char>(text[i]);
                    if (std::isalnum(d) != 0 || d == '.' || d == '\'') {
                        ++i;
                    } else if ((d == '+' || d == '-') && i > b &&
                               (text[i - 1] == 'e' || text[i - 1] == 'E' ||
                                text[i - 1] == 'p' || text[i - 1] == 'P')) {
                        ++i;
                    } else {
                        break;
                    }
                }
                toks.push_back({Tok::Num, b, i});
                continue;
            }
            toks.push_back({Tok::Punct, i, i + 1});
            ++i;
        }
    }

    void lex_quoted(std::size_t& i, char quote) {
        std::size_t b = i;
        ++i;
        while (i < text.size() && text[i] != quote && text[i] != '\n') {
            if (text[i] == '\\' && i + 1 < text.size()) ++i;
            ++i;
        }
        if (i >= text.size() || text[i] != quote) {
            lex_errors.emplace_back(b, "unterminated string literal");
        } else {
            ++i;
        }
        toks.push_back({Tok::Str, b, i});
    }

    void lex_template(std::size_t& i) {
        std::size_t b = i;
        ++i;
        int interp = 0;
        while (i < text.size()) {
            char c = text[i];
            if (c == '\\' && i + 1 < text.size()) {
                i += 2;
                continue;
            }
            if (interp == 0 && c == '`') {
                ++i;
                toks.push_back({Tok::Str, b, i});
                return;
            }
            if (c == '$' && at(i + 1) == '{') {
                ++interp;
                i += 2;
                continue;
            }
            if (interp > 0) {
                if (c == '{') ++interp;
                if (c == '}') --interp;
            }
            ++i;
        }
        lex_errors.emplace_back(b, "unterminated template literal");
        toks.push_back({Tok::Str, b, i});
    }

    bool lex_regex(std::size_t& i) {
        std::size_t j = i + 1;
        bool in_class = false;
        while (j < text.size() && text[j] != '\n') {
            char c = text[j];
            if (c == '\\' && j + 1 < text.size()) {
                j += 2;
                continue;
            }
            if (c == '[') in_class = true;
            else if (c == ']') in_class = false;
            else if (c == '/' && !in_class) {
                ++j;
                while (j < text.size() && ident_cont(static_cast<unsigned char>(text[j]))) ++j;
                toks.push_back({Tok::Str, i, j});
                i = j;
                return true;
            }
            ++j;
        }
        return false;  // no closing slash on the line: treat '/' as operator
    }

    void lex_raw_string(std::size_t prefix_begin, std::size_t& i) {
        // i sits on the opening quote
        std::size_t j = i + 1;
        std::string delim;
        while (j < text.size() && text[j] != '(' && j - i < 20) delim += text[j++];
        if (j >= text.size() || text[j] != '(') {
            lex_errors.emplace_back(prefix_begin, "malformed raw string");
            toks.push_back({Tok::Str, prefix_begin, j});
            i = j;
            return;
        }
        std::string closer = ")" + delim + "\"";
        std::size_t close = text.find(closer, j + 1);
        if (close == std::string_view::npos) {
            lex_errors.emplace_back(prefix_begin, "unterminated raw string");
            i = text.size();
        } else {
            i = close + closer.size();
        }
        toks.push_back({Tok::Str, prefix_begin, i});
    }
};

bool kw_control(std::string_view w) {
    return w == "if" || w == "for" || w == "while" || w == "do" || w == "switch" ||
           w == "try";
}

bool kw_class_like(std::string_view w, Language lang) {
    if (w == "class" || w == "struct" || w == "union" || w == "enum") return true;
    if (lang == Language::Java && w == "interface") return true;
    if (lang == Language::Cpp && w == "namespace") return true;
    return false;
}

// Identifiers that must never be read as a function name before '('.
bool kw_not_callee(std::string_view w) {
    return kw_control(w) || w == "return" || w == "new" || w == "delete" || w == "throw" ||
           w == "sizeof" || w == "typeof" || w == "catch" || w == "else" || w == "case" ||
           w == "default" || w == "synchronized" || w == "assert" || w == "in" ||
           w == "of" || w == "instanceof" || w == "await" || w == "yield" ||
           w == "alignof" || w == "decltype" || w == "typeid" || w == "static_assert";
}

constexpr std::size_t kMaxDepth = 256;

struct Parser {
    std::string_view text;
    Language lang;
    Deadline& deadline;
    const std::vector<Tok>& toks;
    std::size_t pos = 0;
    std::string first_error;

    Parser(std::string_view t, Language l, Deadline& d, const std::vector<Tok>& tk)
        : text(t), lang(l), deadline(d), toks(tk) {}

    bool done() const { return pos >= toks.size(); }
    const Tok& cur() const { return toks[pos]; }
    std::string_view word(const Tok& t) const {
        return text.substr(t.begin, t.end - t.begin);
    }
    bool is_punct(const Tok& t, char c) const {
        return t.kind == Tok::Punct && text[t.begin] == c;
    }

    void note_error(std::size_t offset, const std::string& what) {
        if (first_error.empty())
            first_error = what + " at offset " + std::to_string(offset);
    }

    SyntaxNode error_node(std::size_t b, std::size_t e, const std::string& what) {
        note_error(b, what);
        SyntaxNode n;
        n.kind = "error";
        n.char_range = {b, e};
        n.is_error = true;
        return n;
    }

    void parse_items(std::vector<SyntaxNode>& out, bool stop_at_close, std::size_t depth) {
        while (!done()) {
            if (deadline.expired()) return;
            const Tok& t = cur();
            if (t.kind == Tok::Comment) {
                out.push_back({"comment", {t.begin, t.end}, {}, false});
                ++pos;
                continue;
            }
            if (t.kind == Tok::Preproc) {
                out.push_back({"preproc", {t.begin, t.end}, {}, false});
                ++pos;
                continue;
            }
            if (is_punct(t, '}')) {
                if (stop_at_close) return;
                out.push_back(error_node(t.begin, t.end, "unmatched '}'"));
                ++pos;
                continue;
            }
            if (is_punct(t, ';')) {
                ++pos;
                continue;
            }
            if (is_punct(t, '{')) {
                out.push_back(parse_block(depth + 1));
                continue;
            }
            if (t.kind == Tok::Ident && kw_control(word(t))) {
                out.push_back(parse_control(depth + 1));
                continue;
            }
            out.push_back(parse_statement_or_definition(depth + 1));
        }
    }

    SyntaxNode parse_block(std::size_t depth) {
        const Tok& open = cur();
        ++pos;
        SyntaxNode block{"block", {open.begin, open.end}, {}, false};
        if (depth > kMaxDepth) {
            // Too deep to recurse: skip balanced content without structure.
            std::size_t brace = 1;
            while (!done() && brace > 0) {
                if (deadline.expired()) break;
                if (is_punct(cur(), '{')) ++brace;
                if (is_punct(cur(), '}')) --brace;
                block.char_range.end = cur().end;
                ++pos;
            }
            block.children.push_back(
                error_node(open.begin, block.char_range.end, "nesting too deep"));
            return block;
        }
        parse_items(block.children, true, depth);
        if (!done() && is_punct(cur(), '}')) {
            block.char_range.end = cur().end;
            ++pos;
        } else {
            std::size_t e = toks.empty() ? open.end : toks.back().end;
            block.children.push_back(error_node(open.begin, e, "unclosed block"));
            block.char_range.end = e;
        }
        return block;
    }

    // Balanced ( ... ) as an opaque condition node.
    SyntaxNode parse_condition() {
        const Tok& open = cur();
        if (!is_punct(open, '(')) {
            return error_node(open.begin, open.end, "expected '('");
        }
        std::size_t b = open.begin;
        std::size_t depth = 0;
        std::size_t e = open.end;
        while (!done()) {
            if (deadline.expired()) break;
            const Tok& t = cur();
            if (is_punct(t, '(')) ++depth;
            if (is_punct(t, ')')) {
                --depth;
                e = t.end;
                ++pos;
                if (depth == 0) return {"condition", {b, e}, {}, false};
                continue;
            }
            e = t.end;
            ++pos;
        }
        return error_node(b, e, "unclosed '('");
    }

    SyntaxNode parse_embedded_body(std::size_t depth) {
        if (done()) return error_node(text.size(), text.size(), "missing body");
        if (is_punct(cur(), '{')) return parse_block(depth);
        if (cur().kind == Tok::Ident && kw_control(word(cur()))) return parse_control(depth);
        return parse_statement_or_definition(depth);
    }

    SyntaxNode parse_control(std::size_t depth) {
        const Tok& kw = cur();
        std::string_view w = word(kw);
        if (w == "if") return parse_if(depth);
        if (w == "for" || w == "while") {
            std::string kind = w == "for" ? "for_statement" : "while_statement";
            ++pos;
            SyntaxNode node{kind, {kw.begin, kw.end}, {}, false};
            node.children.push_back(parse_condition());
            node.children.push_back(parse_embedded_body(depth));
            node.char_range.end = node.children.back().char_range.end;
            return node;
        }
        if (w == "do") return parse_do(depth);
        if (w == "switch") return parse_switch(depth);
        return parse_try(depth);
    }

    SyntaxNode parse_if(std::size_t depth) {
        const Tok& kw = cur();
        ++pos;
        SyntaxNode node{"if_statement", {kw.begin, kw.end}, {}, false};
        node.children.push_back(parse_condition());
        node.children.push_back(parse_embedded_body(depth));
        while (!done() && cur().kind == Tok::Ident && word(cur()) == "else") {
            const Tok& else_kw = cur();
            ++pos;
            SyntaxNode clause{"else_clause", {else_kw.begin, else_kw.end}, {}, false};
            if (!done() && cur().kind == Tok::Ident && word(cur()) == "if") {
                clause.children.push_back(parse_if(depth));
            } else {
                clause.children.push_back(parse_embedded_body(depth));
            }
            clause.char_range.end = clause.children.back().char_range.end;
            node.children.push_back(std::move(clause));
        }
        node.char_range.end = node.children.back().char_range.end;
        return node;
    }

    SyntaxNode parse_do(std::size_t depth) {
        const Tok& kw = cur();
        ++pos;
        SyntaxNode node{"do_statement", {kw.begin, kw.end}, {}, false};
        node.children.push_back(parse_embedded_body(depth));
        node.char_range.end = node.children.back().char_range.end;
        if (!done() && cur().kind == Tok::Ident && word(cur()) == "while") {
            ++pos;
            node.children.push_back(parse_condition());
            node.char_range.end = node.children.back().char_range.end;
            if (!done() && is_punct(cur(), ';')) {
                node.char_range.end = cur().end;
                ++pos;
            }
        } else {
            std::size_t at = done() ? text.size() : cur().begin;
            node.children.push_back(error_node(at, at, "do without while"));
        }
        return node;
    }

    SyntaxNode parse_switch(std::size_t depth) {
        const Tok& kw = cur();
        ++pos;
        SyntaxNode node{"switch_statement", {kw.begin, kw.end}, {}, false};
        node.children.push_back(parse_condition());
        if (done() || !is_punct(cur(), '{')) {
            std::size_t at = done() ? text.size() : cur().begin;
            node.children.push_back(error_node(at, at, "switch without body"));
            node.char_range.end = node.children.back().char_range.end;
            return node;
        }
        const Tok& open = cur();
        ++pos;
        SyntaxNode block{"block", {open.begin, open.end}, {}, false};
        while (!done() && !is_punct(cur(), '}')) {
            if (deadline.expired()) break;
            if (cur().kind == Tok::Comment) {
                block.children.push_back({"comment", {cur().begin, cur().end}, {}, false});
                ++pos;
                continue;
            }
            if (cur().kind == Tok::Ident &&
                (word(cur()) == "case" || word(cur()) == "default")) {
                block.children.push_back(parse_case_clause(depth));
                continue;
            }
            // stray content before the first label
            parse_items_single(block.children, depth);
        }
        if (!done() && is_punct(cur(), '}')) {
            block.char_range.end = cur().end;
            ++pos;
        } else {
            block.children.push_back(
                error_node(open.begin, text.size(), "unclosed switch body"));
            block.char_range.end = text.size();
        }
        node.children.push_back(std::move(block));
        node.char_range.end = node.children.back().char_range.end;
        return node;
    }

    // One item, for contexts that drive their own loop.
    void parse_items_single(std::vector<SyntaxNode>& out, std::size_t depth) {
        if (done()) return;
        const Tok& t = cur();
        if (is_punct(t, ';')) {
            ++pos;
            return;
        }
        if (is_punct(t, '{')) {
            out.push_back(parse_block(depth));
            return;
        }
        if (t.kind == Tok::Ident && kw_control(word(t))) {
            out.push_back(parse_control(depth));
            return;
        }
        out.push_back(parse_statement_or_definition(depth));
    }

    SyntaxNode parse_case_clause(std::size_t depth) {
        const Tok& kw = cur();
        ++pos;
        SyntaxNode clause{"case_clause", {kw.begin, kw.end}, {}, false};
        // label expression through ':'
        while (!done() && !is_punct(cur(), ':') && !is_punct(cur(), '}')) {
            clause.char_range.end = cur().end;
            ++pos;
        }
        if (!done() && is_punct(cur(), ':')) {
            clause.char_range.end = cur().end;
            ++pos;
        }
        while (!done() && !is_punct(cur(), '}')) {
            if (deadline.expired()) break;
            if (cur().kind == Tok::Ident &&
                (word(cur()) == "case" || word(cur()) == "default"))
                break;
            parse_items_single(clause.children, depth);
            if (!clause.children.empty())
                clause.char_range.end = clause.children.back().char_range.end;
        }
        return clause;
    }

    SyntaxNode parse_try(std::size_t depth) {
        const Tok& kw = cur();
        ++pos;
        SyntaxNode node{"try_statement", {kw.begin, kw.end}, {}, false};
        node.children.push_back(parse_embedded_body(depth));
        while (!done() && cur().kind == Tok::Ident &&
               (word(cur()) == "catch" || word(cur()) == "finally")) {
            const Tok& ckw = cur();
            bool is_catch = word(ckw) == "catch";
            ++pos;
            SyntaxNode clause{is_catch ? "catch_clause" : "finally_clause",
                              {ckw.begin, ckw.end},
                              {},
                              false};
            if (is_catch && !done() && is_punct(cur(), '('))
                clause.children.push_back(parse_condition());
            clause.children.push_back(parse_embedded_body(depth));
            clause.char_range.end = clause.children.back().char_range.end;
            node.children.push_back(std::move(clause));
        }
        node.char_range.end = node.children.back().char_range.end;
        return node;
    }

    // Consume a balanced { ... } with no structure, for initializer braces.
    std::size_t skip_braces() {
        std::size_t brace = 0;
        std::size_t end = cur().end;
        while (!done()) {
            if (deadline.expired()) break;
            if (is_punct(cur(), '{')) ++brace;
            if (is_punct(cur(), '}')) {
                --brace;
                end = cur().end;
                ++pos;
                if (brace == 0) return end;
                continue;
            }
            end = cur().end;
            ++pos;
        }
        note_error(end, "unclosed brace initializer");
        return end;
    }

    SyntaxNode parse_statement_or_definition(std::size_t depth) {
        const std::size_t start_pos = pos;
        const std::size_t start = cur().begin;
        if (is_punct(cur(), ')') || is_punct(cur(), ']')) {
            SyntaxNode e = error_node(cur().begin, cur().end, "unmatched close");
            ++pos;
            return e;
        }

        long paren_depth = 0;
        bool seen_eq = false;
        bool have_class_kw = false;
        std::string_view class_kw;
        bool have_candidate = false;
        bool candidate_closed = false;  // candidate's paren group fully scanned
        long candidate_depth_at_open = 0;
        std::size_t last_end = cur().begin;
        const Tok* prev_sig = nullptr;  // previous significant token
        const Tok* prev_prev_sig = nullptr;

        while (!done()) {
            if (deadline.expired()) break;
            const Tok& t = cur();
            if (t.kind == Tok::Comment || t.kind == Tok::Preproc) {
                last_end = t.end;
                ++pos;
                continue;
            }
            if (is_punct(t, ';') && paren_depth == 0) {
                last_end = t.end;
                ++pos;
                return {"statement", {start, last_end}, {}, false};
            }
            if (is_punct(t, '(') || is_punct(t, '[')) {
                if (is_punct(t, '(') && paren_depth == 0 && !have_candidate &&
                    prev_sig != nullptr && prev_sig->kind == Tok::Ident &&
                    !kw_not_callee(word(*prev_sig))) {
                    have_candidate = true;
                    candidate_closed = false;
                    candidate_depth_at_open = paren_depth;
                }
                ++paren_depth;
                prev_prev_sig = prev_sig;
                prev_sig = &t;
                last_end = t.end;
                ++pos;
                continue;
            }
            if (is_punct(t, ')') || is_punct(t, ']')) {
                if (paren_depth == 0) {
                    // closes something we never opened: end the statement here
                    if (pos == start_pos) {
                        SyntaxNode e = error_node(t.begin, t.end, "unmatched close");
                        ++pos;
                        return e;
                    }
                    return {"statement", {start, last_end}, {}, false};
                }
                --paren_depth;
                if (have_candidate && paren_depth == candidate_depth_at_open)
                    candidate_closed = true;
                prev_prev_sig = prev_sig;
                prev_sig = &t;
                last_end = t.end;
                ++pos;
                continue;
            }
            if (is_punct(t, '=') && paren_depth == 0) {
                bool after_operator = prev_sig != nullptr &&
                                      ((prev_sig->kind == Tok::Ident &&
                                        word(*prev_sig) == "operator") ||
                                       (prev_sig->kind == Tok::Punct &&
                                        (text[prev_sig->begin] == '=' ||
                                         text[prev_sig->begin] == '!' ||
                                         text[prev_sig->begin] == '<' ||
                                         text[prev_sig->begin] == '>')));
                if (!after_operator) seen_eq = true;
                prev_prev_sig = prev_sig;
                prev_sig = &t;
                last_end = t.end;
                ++pos;
                continue;
            }
            if (t.kind == Tok::Ident && paren_depth == 0 && !seen_eq && !have_candidate &&
                kw_class_like(word(t), lang)) {
                have_class_kw = true;
                class_kw = word(t);
                prev_prev_sig = prev_sig;
                prev_sig = &t;
                last_end = t.end;
                ++pos;
                continue;
            }
            if (is_punct(t, '{')) {
                if (paren_depth > 0) {
                    // brace inside parens: part of the expression
                    prev_prev_sig = prev_sig;
                    prev_sig = &t;
                    last_end = t.end;
                    ++pos;
                    continue;
                }
                if (have_class_kw) {
                    SyntaxNode node{class_kw == "namespace" ? "namespace_definition"
                                                            : "class_definition",
                                    {start, t.end},
                                    {},
                                    false};
                    node.children.push_back(parse_block(depth));
                    node.char_range.end = node.children.back().char_range.end;
                    if (!done() && is_punct(cur(), ';')) {
                        node.char_range.end = cur().end;
                        ++pos;
                    }
                    return node;
                }
                bool member_brace_init =
                    prev_sig != nullptr && prev_sig->kind == Tok::Ident &&
                    prev_prev_sig != nullptr && prev_prev_sig->kind == Tok::Punct &&
                    (text[prev_prev_sig->begin] == ':' || text[prev_prev_sig->begin] == ',');
                if (have_candidate && candidate_closed && !seen_eq && !member_brace_init) {
                    SyntaxNode node{"function_definition", {start, t.end}, {}, false};
                    node.children.push_back({"signature", {start, last_end}, {}, false});
                    node.children.push_back(parse_block(depth));
                    node.char_range.end = node.children.back().char_range.end;
                    return node;
                }
                std::size_t brace_end = skip_braces();
                last_end = brace_end;
                if (!done() && is_punct(cur(), ';') && paren_depth == 0) {
                    last_end = cur().end;
                    ++pos;
                }
                return {"statement", {start, last_end}, {}, false};
            }
            if (t.kind == Tok::Ident && paren_depth == 0 && kw_control(word(t)) &&
                pos != start_pos && prev_sig != nullptr && prev_sig->kind == Tok::Punct &&
                text[prev_sig->begin] == ')') {
                // e.g. `do { } while (...)` already consumed; bail out safely
                return {"statement", {start, last_end}, {}, false};
            }
            prev_prev_sig = prev_sig;
            prev_sig = &t;
            last_end = t.end;
            ++pos;
        }
        return {"statement", {start, last_end}, {}, false};
    }
};

}  // namespace

ParserResult parse_cfamily(std::string_view text, Language lang, Deadline& deadline) {
    ParserResult result;
    Lexer lexer(text, lang, deadline);
    lexer.run();

    Parser parser(text, lang, deadline, lexer.toks);
    SyntaxNode root{lang == Language::Cpp ? "translation_unit" : "program",
                    {0, text.size()},
                    {},
                    false};
    parser.parse_items(root.children, false, 0);

    for (const auto& [offset, what] : lexer.lex_errors) {
        insert_error_leaf(root, offset, std::min(offset + 1, text.size()));
        if (result.error_detail.empty())
            result.error_detail = what + " at offset " + std::to_string(offset);
    }
    if (result.error_detail.empty()) result.error_detail = parser.first_error;
    result.timed_out = deadline.hit();
    result.root = std::move(root);
    return result;
}

}  // namespace cforge::detail
