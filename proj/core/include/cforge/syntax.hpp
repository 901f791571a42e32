#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cforge/types.hpp"

namespace cforge {

struct SyntaxNode {
    std::string kind;
    CharRange char_range;
    std::vector<SyntaxNode> children;
    bool is_error = false;
};

struct ParseFailure {
    enum class Kind { SyntaxError, Timeout };
    Kind kind = Kind::SyntaxError;
    std::string detail;
};

struct ParseOptions {
    std::uint64_t timeout_ms = 5000;
    // Fraction of error nodes tolerated before the tree is rejected.
    // 0 means any error node fails the parse.
    double max_error_fraction = 0.0;
};

using ParseOutcome = std::variant<SyntaxNode, ParseFailure>;

bool parser_supported(Language lang);

ParseOutcome parse_text(std::string_view text, Language lang, const ParseOptions& opts = {});
ParseOutcome parse_source(const SourceFile& file, const ParseOptions& opts = {});

/// Counts (error_nodes, total_nodes) in a tree.
std::pair<std::size_t, std::size_t> count_error_nodes(const SyntaxNode& root);

/// Child ranges nested, ordered, non-overlapping; root covers [0, len).
bool tree_well_formed(const SyntaxNode& root, std::size_t text_len);

struct FunctionSpan {
    std::optional<std::string> name;
    CharRange char_range;
    CharRange signature_range;
    CharRange body_range;
    const SyntaxNode* tree = nullptr;  // subtree inside the parsed root
};

/// All function/method definitions in the tree, ordered by start offset;
/// nested definitions listed independently. `text` is the parsed source.
std::vector<FunctionSpan> list_functions(const SyntaxNode& root, std::string_view text,
                                         Language lang);

enum class SpanType {
    MethodSignature,
    MethodBody,
    SingleLineStatement,
    MethodWithComment,
    EmptyBlock,
    BodyTop,
    BodyMid,
    BodyBottom,
    IfStatement,
    ForLoop,
    WhileLoop,
    TryStatement,
    SwitchCase,
};

inline constexpr std::array<SpanType, 13> kAllSpanTypes = {
    SpanType::MethodSignature, SpanType::MethodBody,   SpanType::SingleLineStatement,
    SpanType::MethodWithComment, SpanType::EmptyBlock, SpanType::BodyTop,
    SpanType::BodyMid,          SpanType::BodyBottom,  SpanType::IfStatement,
    SpanType::ForLoop,          SpanType::WhileLoop,   SpanType::TryStatement,
    SpanType::SwitchCase,
};

std::string to_string(SpanType t);
SpanType span_type_from_string(std::string_view s);

struct ClassifyContext {
    const SyntaxNode* parent = nullptr;
    // Sibling immediately before the node in the parent, if any.
    const SyntaxNode* prev_sibling = nullptr;
    std::string_view text;
    Language lang = Language::Other;
};

/// Deterministic node -> span-type mapping; nullopt = NotApplicable.
/// Priority: control > EmptyBlock > method tier > single-line > body thirds.
std::optional<SpanType> classify_node(const SyntaxNode& node, const ClassifyContext& ctx);

/// Body-position third for a statement starting at 1-based relative line r
/// of an L-line body: floor(3*(r-1)/L), ties to the earlier third.
SpanType body_third(std::size_t r, std::size_t line_count);

struct SpanTypeMappingRow {
    std::string language;   // "*" = every supported language
    std::string node_kind;
    std::string condition;  // human-readable side condition
    std::string span_type;
};

/// The audited node-kind -> span-type mapping table.
const std::vector<SpanTypeMappingRow>& span_type_mapping();

const std::set<std::string>& language_keywords(Language lang);

/// Code token with its kind, as produced by the language-agnostic lexer.
struct CodeToken {
    enum class Kind { Identifier, Number, String, Comment, Operator, Punct };
    Kind kind = Kind::Operator;
    std::string text;
    std::size_t offset = 0;
};

/// Language-agnostic code lexer used by BLEU/CodeBLEU and dataflow
/// extraction. Comments are produced as tokens; callers filter.
std::vector<CodeToken> lex_code(std::string_view text);

/// Def-use edges from assignment statements, variables canonicalized by
/// first-occurrence order ("v0", "v1", ...). Call and attribute names are
/// not variables. Edges are (canonical lhs, canonical rhs use), sorted.
std::vector<std::pair<std::string, std::string>> def_use_edges(std::string_view text,
                                                               Language lang);

}  // namespace cforge
