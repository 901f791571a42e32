#include <algorithm>
#include <stdexcept>

#include "cforge/syntax.hpp"
#include "parse_internal.hpp"

namespace cforge {

namespace {

const SyntaxNode* first_error(const SyntaxNode& n) {
    if (n.is_error) return &n;
    for (const auto& c : n.children) {
        if (const SyntaxNode* e = first_error(c)) return e;
    }
    return nullptr;
}

std::size_t line_at(std::string_view text, std::size_t offset) {
    return 1 + static_cast<std::size_t>(
                   std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

std::string_view slice(std::string_view text, CharRange r) {
    return text.substr(r.begin, r.end - r.begin);
}

bool whitespace_only(std::string_view s) {
    return s.find_first_not_of(" \t\r\n") == std::string_view::npos;
}

std::string_view trimmed(std::string_view s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return {};
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

}  // namespace

namespace detail {

void insert_error_leaf(SyntaxNode& node, std::size_t begin, std::size_t end) {
    begin = std::max(begin, node.char_range.begin);
    end = std::min(end, node.char_range.end);
    if (begin >= end) return;
    for (auto& child : node.children) {
        if (child.char_range.begin <= begin && end <= child.char_range.end) {
            insert_error_leaf(child, begin, end);
            return;
        }
    }
    std::size_t i = 0;
    while (i < node.children.size() && node.children[i].char_range.end <= begin) ++i;
    if (i < node.children.size() && node.children[i].char_range.begin < begin) {
        // Range starts inside a child but leaks past it; charge the child.
        insert_error_leaf(node.children[i], begin, node.children[i].char_range.end);
        return;
    }
    if (i < node.children.size()) end = std::min(end, node.children[i].char_range.begin);
    if (begin >= end) return;  // bytes already covered by structured children
    SyntaxNode leaf;
    leaf.kind = "error";
    leaf.char_range = {begin, end};
    leaf.is_error = true;
    node.children.insert(node.children.begin() + static_cast<long>(i), std::move(leaf));
}

}  // namespace detail

bool parser_supported(Language lang) {
    switch (lang) {
        case Language::Java:
        case Language::Python:
        case Language::Cpp:
        case Language::JavaScript:
            return true;
        default:
            return false;
    }
}

ParseOutcome parse_text(std::string_view text, Language lang, const ParseOptions& opts) {
    if (!parser_supported(lang)) {
        throw std::invalid_argument("parse_text: unsupported language " +
                                    to_string(LanguageTag{lang, ""}));
    }
    detail::Deadline deadline(opts.timeout_ms);
    detail::ParserResult res = lang == Language::Python
                                   ? detail::parse_python(text, deadline)
                                   : detail::parse_cfamily(text, lang, deadline);
    if (res.timed_out) {
        return ParseFailure{ParseFailure::Kind::Timeout, "parse deadline exceeded"};
    }
    auto [errors, total] = count_error_nodes(res.root);
    // A lexical error with no surviving error leaf still fails the parse.
    if (errors == 0 && !res.error_detail.empty()) errors = 1;
    if (errors > 0 &&
        static_cast<double>(errors) > opts.max_error_fraction * static_cast<double>(total)) {
        std::string detail_msg = res.error_detail;
        if (detail_msg.empty()) {
            const SyntaxNode* e = first_error(res.root);
            std::size_t off = e != nullptr ? e->char_range.begin : 0;
            detail_msg = "syntax error at offset " + std::to_string(off) + " (line " +
                         std::to_string(line_at(text, off)) + ")";
        }
        return ParseFailure{ParseFailure::Kind::SyntaxError, detail_msg};
    }
    return std::move(res.root);
}

ParseOutcome parse_source(const SourceFile& file, const ParseOptions& opts) {
    return parse_text(file.content, file.language.lang, opts);
}

std::pair<std::size_t, std::size_t> count_error_nodes(const SyntaxNode& root) {
    std::size_t errors = root.is_error ? 1 : 0;
    std::size_t total = 1;
    for (const auto& c : root.children) {
        auto [e, t] = count_error_nodes(c);
        errors += e;
        total += t;
    }
    return {errors, total};
}

namespace {

bool check_nesting(const SyntaxNode& n) {
    if (n.char_range.end < n.char_range.begin) return false;
    std::size_t prev_end = n.char_range.begin;
    for (const auto& c : n.children) {
        if (c.char_range.begin < prev_end || c.char_range.end > n.char_range.end) return false;
        if (!check_nesting(c)) return false;
        prev_end = c.char_range.end;
    }
    return true;
}

}  // namespace

bool tree_well_formed(const SyntaxNode& root, std::size_t text_len) {
    if (root.char_range.begin != 0 || root.char_range.end != text_len) return false;
    return check_nesting(root);
}

namespace {

// Keywords that may directly precede '(' in a signature without naming it.
bool name_excluded(const std::string& s) {
    static const std::set<std::string> kExcluded = {
        "if",      "for",     "while",   "switch",   "catch",        "return",
        "sizeof",  "new",     "delete",  "throw",    "typeof",       "decltype",
        "alignof", "typeid",  "static_assert",       "assert",       "synchronized",
        "function", "async",  "await",   "yield",    "case",         "in",
        "of",      "instanceof"};
    return kExcluded.count(s) > 0;
}

std::optional<std::string> function_name(std::string_view signature, Language lang) {
    std::vector<CodeToken> toks = lex_code(signature);
    std::vector<const CodeToken*> code;
    for (const auto& t : toks) {
        if (t.kind != CodeToken::Kind::Comment) code.push_back(&t);
    }
    if (lang == Language::Python) {
        for (std::size_t i = 0; i + 1 < code.size(); ++i) {
            if (code[i]->kind == CodeToken::Kind::Identifier && code[i]->text == "def" &&
                code[i + 1]->kind == CodeToken::Kind::Identifier) {
                return code[i + 1]->text;
            }
        }
        return std::nullopt;
    }
    for (std::size_t i = 0; i < code.size(); ++i) {
        if (code[i]->kind != CodeToken::Kind::Identifier) continue;
        if (code[i]->text == "operator" && i + 1 < code.size()) {
            std::string name = "operator";
            std::size_t j = i + 1;
            if (code[j]->text == "(" && j + 1 < code.size() && code[j + 1]->text == ")") {
                return name + "()";
            }
            while (j < code.size() && j < i + 4 && code[j]->text != "(") {
                name += code[j]->text;
                ++j;
            }
            return name;
        }
        if (name_excluded(code[i]->text)) continue;
        if (i + 1 < code.size() && code[i + 1]->text == "(") return code[i]->text;
    }
    return std::nullopt;
}

void collect_functions(const SyntaxNode& node, std::string_view text, Language lang,
                       std::vector<FunctionSpan>& out) {
    if (node.kind == "function_definition") {
        const SyntaxNode* sig = nullptr;
        const SyntaxNode* body = nullptr;
        for (const auto& c : node.children) {
            if (sig == nullptr && c.kind == "signature") sig = &c;
            if (body == nullptr && c.kind == "block") body = &c;
        }
        if (sig != nullptr && body != nullptr) {
            FunctionSpan fn;
            fn.name = function_name(slice(text, sig->char_range), lang);
            fn.char_range = node.char_range;
            fn.signature_range = sig->char_range;
            fn.body_range = body->char_range;
            fn.tree = &node;
            out.push_back(std::move(fn));
        }
    }
    for (const auto& c : node.children) collect_functions(c, text, lang, out);
}

}  // namespace

std::vector<FunctionSpan> list_functions(const SyntaxNode& root, std::string_view text,
                                         Language lang) {
    std::vector<FunctionSpan> out;
    collect_functions(root, text, lang, out);
    std::stable_sort(out.begin(), out.end(), [](const FunctionSpan& a, const FunctionSpan& b) {
        return a.char_range.begin < b.char_range.begin;
    });
    return out;
}

std::string to_string(SpanType t) {
    switch (t) {
        case SpanType::MethodSignature: return "MethodSignature";
        case SpanType::MethodBody: return "MethodBody";
        case SpanType::SingleLineStatement: return "SingleLineStatement";
        case SpanType::MethodWithComment: return "MethodWithComment";
        case SpanType::EmptyBlock: return "EmptyBlock";
        case SpanType::BodyTop: return "BodyTop";
        case SpanType::BodyMid: return "BodyMid";
        case SpanType::BodyBottom: return "BodyBottom";
        case SpanType::IfStatement: return "IfStatement";
        case SpanType::ForLoop: return "ForLoop";
        case SpanType::WhileLoop: return "WhileLoop";
        case SpanType::TryStatement: return "TryStatement";
        case SpanType::SwitchCase: return "SwitchCase";
    }
    throw std::invalid_argument("to_string: bad SpanType");
}

SpanType span_type_from_string(std::string_view s) {
    for (SpanType t : kAllSpanTypes) {
        if (to_string(t) == s) return t;
    }
    throw std::invalid_argument("span_type_from_string: unknown span type " + std::string(s));
}

SpanType body_third(std::size_t r, std::size_t line_count) {
    if (line_count == 0 || r == 0 || r > line_count) {
        throw std::invalid_argument("body_third: need 1 <= r <= line_count");
    }
    std::size_t idx = 3 * (r - 1) / line_count;
    if (idx == 0) return SpanType::BodyTop;
    if (idx == 1) return SpanType::BodyMid;
    return SpanType::BodyBottom;
}

namespace {

bool python_pass_only(const SyntaxNode& block, std::string_view text) {
    const SyntaxNode* only = nullptr;
    for (const auto& c : block.children) {
        if (c.kind == "comment") continue;
        if (only != nullptr) return false;
        only = &c;
    }
    return only != nullptr && only->kind == "statement" &&
           trimmed(slice(text, only->char_range)) == "pass";
}

bool cfamily_no_statements(const SyntaxNode& block) {
    for (const auto& c : block.children) {
        if (c.kind != "comment") return false;
    }
    return true;
}

}  // namespace

std::optional<SpanType> classify_node(const SyntaxNode& node, const ClassifyContext& ctx) {
    const std::string& k = node.kind;
    if (k == "if_statement") return SpanType::IfStatement;
    if (k == "for_statement") return SpanType::ForLoop;
    if (k == "while_statement" || k == "do_statement") return SpanType::WhileLoop;
    if (k == "try_statement") return SpanType::TryStatement;
    if (k == "switch_statement" || k == "match_statement" || k == "case_clause") {
        return SpanType::SwitchCase;
    }
    if (k == "block") {
        bool empty = ctx.lang == Language::Python ? python_pass_only(node, ctx.text)
                                                  : cfamily_no_statements(node);
        if (empty) return SpanType::EmptyBlock;
        if (ctx.parent != nullptr && ctx.parent->kind == "function_definition") {
            return SpanType::MethodBody;
        }
        return std::nullopt;
    }
    if (k == "signature") {
        if (ctx.parent != nullptr && ctx.parent->kind == "function_definition") {
            return SpanType::MethodSignature;
        }
        return std::nullopt;
    }
    if (k == "function_definition") {
        if (ctx.prev_sibling != nullptr && ctx.prev_sibling->kind == "comment" &&
            ctx.prev_sibling->char_range.end <= node.char_range.begin &&
            whitespace_only(ctx.text.substr(
                ctx.prev_sibling->char_range.end,
                node.char_range.begin - ctx.prev_sibling->char_range.end))) {
            return SpanType::MethodWithComment;
        }
        return std::nullopt;
    }
    if (k == "statement") {
        std::string_view body = slice(ctx.text, node.char_range);
        if (body.find('\n') == std::string_view::npos) return SpanType::SingleLineStatement;
        if (ctx.parent != nullptr && ctx.parent->kind == "block" &&
            ctx.parent->char_range.end > ctx.parent->char_range.begin) {
            std::size_t block_line = line_at(ctx.text, ctx.parent->char_range.begin);
            std::size_t stmt_line = line_at(ctx.text, node.char_range.begin);
            std::size_t last_line = line_at(ctx.text, ctx.parent->char_range.end - 1);
            std::size_t r = stmt_line - block_line + 1;
            std::size_t line_count = last_line - block_line + 1;
            return body_third(r, line_count);
        }
        return std::nullopt;
    }
    return std::nullopt;
}

const std::vector<SpanTypeMappingRow>& span_type_mapping() {
    static const std::vector<SpanTypeMappingRow> kTable = {
        {"*", "if_statement", "", "IfStatement"},
        {"*", "for_statement", "", "ForLoop"},
        {"*", "while_statement", "", "WhileLoop"},
        {"cpp", "do_statement", "", "WhileLoop"},
        {"java", "do_statement", "", "WhileLoop"},
        {"javascript", "do_statement", "", "WhileLoop"},
        {"*", "try_statement", "", "TryStatement"},
        {"cpp", "switch_statement", "", "SwitchCase"},
        {"java", "switch_statement", "", "SwitchCase"},
        {"javascript", "switch_statement", "", "SwitchCase"},
        {"python", "match_statement", "", "SwitchCase"},
        {"*", "case_clause", "", "SwitchCase"},
        {"python", "block", "single pass statement, comments allowed", "EmptyBlock"},
        {"cpp", "block", "no statements, comments allowed", "EmptyBlock"},
        {"java", "block", "no statements, comments allowed", "EmptyBlock"},
        {"javascript", "block", "no statements, comments allowed", "EmptyBlock"},
        {"*", "block", "non-empty, direct child of function_definition", "MethodBody"},
        {"*", "signature", "direct child of function_definition", "MethodSignature"},
        {"*", "function_definition", "comment sibling immediately above, whitespace gap",
         "MethodWithComment"},
        {"*", "statement", "spans a single line", "SingleLineStatement"},
        {"*", "statement", "multi-line, inside a block, first third of the body lines",
         "BodyTop"},
        {"*", "statement", "multi-line, inside a block, middle third of the body lines",
         "BodyMid"},
        {"*", "statement", "multi-line, inside a block, last third of the body lines",
         "BodyBottom"},
    };
    return kTable;
}

}  // namespace cforge
