#include <algorithm>
#include <cctype>
#include <map>

#include "cforge/syntax.hpp"

namespace cforge {

namespace {

bool ident_start(unsigned char c) {
    return std::isalpha(c) != 0 || c == '_' || c == '$' || c >= 0x80;
}
bool ident_cont(unsigned char c) {
    return std::isalnum(c) != 0 || c == '_' || c == '$' || c >= 0x80;
}

const char* kOps3[] = {"<<=", ">>=", "===", "!==", "**=", "//=", "...", "->*", "?\?="};
const char* kOps2[] = {"::", "->", "=>", "==", "!=", "<=", ">=", "&&", "||", "++",
                       "--", "+=", "-=", "*=", "/=", "%=", "&=", "|=", "^=", "<<",
                       ">>", "**", "??", "?.", "//"};

bool is_punct_char(char c) {
    return c == '(' || c == ')' || c == '[' || c == ']' || c == '{' || c == '}' ||
           c == ';' || c == ',' || c == '.';
}

}  // namespace

std::vector<CodeToken> lex_code(std::string_view text) {
    std::vector<CodeToken> out;
    std::size_t i = 0;
    const std::size_t n = text.size();
    auto push = [&](CodeToken::Kind k, std::size_t b, std::size_t e) {
        out.push_back({k, std::string(text.substr(b, e - b)), b});
    };
    while (i < n) {
        unsigned char c = static_cast<unsigned char>(text[i]);
        if (std::isspace(c)) {
            ++i;
            continue;
        }
        if (c == '#') {
            std::size_t b = i;
            while (i < n && text[i] != '\n') ++i;
            push(CodeToken::Kind::Comment, b, i);
            continue;
        }
        if (c == '/' && i + 1 < n && text[i + 1] == '/') {
            std::size_t b = i;
            while (i < n && text[i] != '\n') ++i;
            push(CodeToken::Kind::Comment, b, i);
            continue;
        }
        if (c == '/' && i + 1 < n && text[i + 1] == '*') {
            std::size_t b = i;
            std::size_t close = text.find("*/", i + 2);
            i = close == std::string_view::npos ? n : close + 2;
            push(CodeToken::Kind::Comment, b, i);
            continue;
        }
        if (c == '"' || c == '\'' || c == '`') {
            std::size_t b = i;
            char q = static_cast<char>(c);
            ++i;
            while (i < n && text[i] != q) {
                if (text[i] == '\\' && i + 1 < n) ++i;
                if (q != '`' && text[i] == '\n') break;
                ++i;
            }
            if (i < n && text[i] == q) ++i;
            push(CodeToken::Kind::String, b, i);
            continue;
        }
        if (ident_start(c)) {
            std::size_t b = i;
            while (i < n && ident_cont(static_cast<unsigned char>(text[i]))) ++i;
            push(CodeToken::Kind::Identifier, b, i);
            continue;
        }
        if (std::isdigit(c) != 0 ||
            (c == '.' && i + 1 < n && std::isdigit(static_cast<unsigned char>(text[i + 1])) != 0)) {
            std::size_t b = i;
            ++i;
            while (i < n) {
                unsigned char d = static_cast<unsigned char>(text[i]);
                if (std::isalnum(d) != 0 || d == '.') ++i;
                else if ((d == '+' || d == '-') &&
                         (text[i - 1] == 'e' || text[i - 1] == 'E' || text[i - 1] == 'p' ||
                          text[i - 1] == 'P'))
                    ++i;
                else break;
            }
            push(CodeToken::Kind::Number, b, i);
            continue;
        }
        bool matched = false;
        if (i + 3 <= n) {
            for (const char* op : kOps3) {
                if (text.substr(i, 3) == op) {
                    push(CodeToken::Kind::Operator, i, i + 3);
                    i += 3;
                    matched = true;
                    break;
                }
            }
        }
        if (matched) continue;
        if (i + 2 <= n) {
            for (const char* op : kOps2) {
                if (text.substr(i, 2) == op) {
                    push(CodeToken::Kind::Operator, i, i + 2);
                    i += 2;
                    matched = true;
                    break;
                }
            }
        }
        if (matched) continue;
        push(is_punct_char(static_cast<char>(c)) ? CodeToken::Kind::Punct
                                                 : CodeToken::Kind::Operator,
             i, i + 1);
        ++i;
    }
    return out;
}

const std::set<std::string>& language_keywords(Language lang) {
    static const std::set<std::string> kPython = {
        "False",  "None",   "True",    "and",    "as",     "assert", "async",
        "await",  "break",  "class",   "continue", "def",  "del",    "elif",
        "else",   "except", "finally", "for",    "from",   "global", "if",
        "import", "in",     "is",      "lambda", "match",  "case",   "nonlocal",
        "not",    "or",     "pass",    "raise",  "return", "try",    "while",
        "with",   "yield"};
    static const std::set<std::string> kCpp = {
        "alignas",   "alignof",  "auto",      "bool",     "break",    "case",
        "catch",     "char",     "class",     "const",    "constexpr", "consteval",
        "constinit", "continue", "decltype",  "default",  "delete",   "do",
        "double",    "else",     "enum",      "explicit", "extern",   "false",
        "float",     "for",      "friend",    "goto",     "if",       "inline",
        "int",       "long",     "mutable",   "namespace", "new",     "noexcept",
        "nullptr",   "operator", "private",   "protected", "public",  "register",
        "reinterpret_cast", "return", "short", "signed",   "sizeof",  "static",
        "static_cast", "struct", "switch",    "template", "this",     "throw",
        "true",      "try",      "typedef",   "typeid",   "typename", "union",
        "unsigned",  "using",    "virtual",   "void",     "volatile", "while",
        "concept",   "requires", "co_await",  "co_return", "co_yield", "dynamic_cast",
        "const_cast", "wchar_t", "char8_t",   "char16_t", "char32_t", "thread_local",
        "export",    "static_assert"};
    static const std::set<std::string> kJava = {
        "abstract", "assert",    "boolean",  "break",    "byte",      "case",
        "catch",    "char",      "class",    "const",    "continue",  "default",
        "do",       "double",    "else",     "enum",     "extends",   "final",
        "finally",  "float",     "for",      "goto",     "if",        "implements",
        "import",   "instanceof", "int",     "interface", "long",     "native",
        "new",      "package",   "private",  "protected", "public",   "return",
        "short",    "static",    "strictfp", "super",    "switch",    "synchronized",
        "this",     "throw",     "throws",   "transient", "try",      "void",
        "volatile", "while",     "true",     "false",    "null",      "var",
        "record",   "sealed",    "permits",  "yield"};
    static const std::set<std::string> kJs = {
        "break",    "case",    "catch",  "class",      "const",  "continue",
        "debugger", "default", "delete", "do",         "else",   "export",
        "extends",  "finally", "for",    "function",   "if",     "import",
        "in",       "instanceof", "let", "new",        "of",     "return",
        "super",    "switch",  "this",   "throw",      "try",    "typeof",
        "var",      "void",    "while",  "with",       "yield",  "async",
        "await",    "static",  "get",    "set",        "true",   "false",
        "null",     "undefined"};
    static const std::set<std::string> kNone;
    switch (lang) {
        case Language::Python: return kPython;
        case Language::Cpp: return kCpp;
        case Language::Java: return kJava;
        case Language::JavaScript: return kJs;
        default: return kNone;
    }
}

std::vector<std::pair<std::string, std::string>> def_use_edges(std::string_view text,
                                                               Language lang) {
    const std::set<std::string>& keywords = language_keywords(lang);
    std::vector<CodeToken> all = lex_code(text);
    std::vector<CodeToken> toks;
    for (auto& t : all) {
        if (t.kind != CodeToken::Kind::Comment) toks.push_back(std::move(t));
    }

    auto is_assign_op = [](const std::string& s) {
        if (s == "=" || s == "+=" || s == "-=" || s == "*=" || s == "/=" || s == "%=" ||
            s == "&=" || s == "|=" || s == "^=" || s == "<<=" || s == ">>=" ||
            s == "**=" || s == "//=")
            return true;
        return false;
    };

    // Statement boundaries: ';' everywhere; '{'/'}' for brace languages;
    // newlines outside brackets for Python.
    std::vector<std::pair<std::size_t, std::size_t>> stmts;
    std::size_t begin = 0;
    long depth = 0;
    for (std::size_t i = 0; i < toks.size(); ++i) {
        const std::string& s = toks[i].text;
        bool brace_lang = lang != Language::Python;
        if (s == "(" || s == "[") ++depth;
        if (s == ")" || s == "]") --depth;
        if (!brace_lang && (s == "{")) ++depth;
        if (!brace_lang && (s == "}")) --depth;
        bool boundary = false;
        if (s == ";" && depth <= 0) boundary = true;
        if (brace_lang && (s == "{" || s == "}")) boundary = true;
        if (lang == Language::Python && depth <= 0 && i + 1 < toks.size()) {
            std::string_view gap = text.substr(toks[i].offset + toks[i].text.size(),
                                               toks[i + 1].offset - toks[i].offset -
                                                   toks[i].text.size());
            if (gap.find('\n') != std::string_view::npos) boundary = true;
        }
        if (boundary) {
            std::size_t end = s == ";" || s == "{" || s == "}" ? i : i + 1;
            if (end > begin) stmts.emplace_back(begin, end);
            begin = i + 1;
        }
    }
    if (toks.size() > begin) stmts.emplace_back(begin, toks.size());

    std::map<std::string, std::string> canon;
    auto canonical = [&](const std::string& name) -> std::string {
        auto it = canon.find(name);
        if (it != canon.end()) return it->second;
        std::string id = "v" + std::to_string(canon.size());
        canon.emplace(name, id);
        return id;
    };

    std::vector<std::pair<std::string, std::string>> edges;
    for (auto [b, e] : stmts) {
        std::size_t op = e;
        long d2 = 0;
        for (std::size_t i = b; i < e; ++i) {
            const std::string& s = toks[i].text;
            if (s == "(" || s == "[") ++d2;
            if (s == ")" || s == "]") --d2;
            if (d2 == 0 && toks[i].kind == CodeToken::Kind::Operator && is_assign_op(s)) {
                op = i;
                break;
            }
        }
        if (op == e) continue;

        auto prev_text = [&](std::size_t i) -> const std::string* {
            return i > b ? &toks[i - 1].text : nullptr;
        };
        auto is_var = [&](std::size_t i) {
            if (toks[i].kind != CodeToken::Kind::Identifier) return false;
            if (keywords.count(toks[i].text) > 0) return false;
            const std::string* p = prev_text(i);
            if (p != nullptr && (*p == "." || *p == "->" || *p == "::" || *p == "?.")) return false;
            return true;
        };

        std::string lhs;
        for (std::size_t i = b; i < op; ++i) {
            if (is_var(i)) {
                lhs = toks[i].text;
                break;
            }
        }
        if (lhs.empty()) continue;

        std::string lhs_canon = canonical(lhs);
        for (std::size_t i = op + 1; i < e; ++i) {
            if (!is_var(i)) continue;
            if (i + 1 < e && toks[i + 1].text == "(") continue;  // call name
            edges.emplace_back(lhs_canon, canonical(toks[i].text));
        }
    }
    std::sort(edges.begin(), edges.end());
    edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
    return edges;
}

}  // namespace cforge
