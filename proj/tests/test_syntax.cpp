#include <doctest.h>

#include <algorithm>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "cforge/sequence.hpp"
#include "cforge/syntax.hpp"
#include "cforge/text.hpp"
#include "cforge/tokenizer.hpp"
#include "fixtures.hpp"

using namespace cforge;

namespace {

SyntaxNode parse_ok(std::string_view text, Language lang) {
    ParseOutcome out = parse_text(text, lang);
    REQUIRE(std::holds_alternative<SyntaxNode>(out));
    return std::get<SyntaxNode>(std::move(out));
}

struct NodeCtx {
    const SyntaxNode* node;
    ClassifyContext ctx;
};

void walk(const SyntaxNode& node, const SyntaxNode* parent, const SyntaxNode* prev,
          std::string_view text, Language lang, std::vector<NodeCtx>& out) {
    out.push_back({&node, {parent, prev, text, lang}});
    const SyntaxNode* p = nullptr;
    for (const auto& c : node.children) {
        walk(c, &node, p, text, lang, out);
        p = &c;
    }
}

std::vector<NodeCtx> all_nodes(const SyntaxNode& root, std::string_view text, Language lang) {
    std::vector<NodeCtx> out;
    walk(root, nullptr, nullptr, text, lang, out);
    return out;
}

std::optional<SpanType> first_of_kind(const SyntaxNode& root, std::string_view text,
                                      Language lang, std::string_view kind) {
    for (const NodeCtx& n : all_nodes(root, text, lang)) {
        if (n.node->kind == kind) return classify_node(*n.node, n.ctx);
    }
    return std::nullopt;
}

}  // namespace

TEST_CASE("parser support set") {
    CHECK(parser_supported(Language::Java));
    CHECK(parser_supported(Language::Python));
    CHECK(parser_supported(Language::Cpp));
    CHECK(parser_supported(Language::JavaScript));
    CHECK_FALSE(parser_supported(Language::TypeScript));
    CHECK_FALSE(parser_supported(Language::CSharp));
    CHECK_FALSE(parser_supported(Language::Other));
    CHECK_THROWS_AS(parse_text("x", Language::CSharp), std::invalid_argument);
}

TEST_CASE("fixture files parse clean with well formed trees") {
    for (const SourceFile& f : fixtures::sfim_function_files()) {
        CAPTURE(f.rel_path);
        SyntaxNode root = parse_ok(f.content, f.language.lang);
        CHECK(tree_well_formed(root, f.content.size()));
        auto [errors, total] = count_error_nodes(root);
        CHECK(errors == 0);
        CHECK(total > 1);
    }
}

TEST_CASE("list_functions finds every generated function in order") {
    for (const SourceFile& f : fixtures::sfim_function_files()) {
        CAPTURE(f.rel_path);
        SyntaxNode root = parse_ok(f.content, f.language.lang);
        auto fns = list_functions(root, f.content, f.language.lang);
        CHECK(fns.size() == 60);  // fixture generator count
        std::size_t prev = 0;
        for (const FunctionSpan& fn : fns) {
            CHECK(fn.char_range.begin >= prev);
            prev = fn.char_range.begin;
            CHECK(fn.char_range.contains(fn.signature_range));
            CHECK(fn.signature_range.end <= fn.body_range.begin);
            CHECK(fn.body_range.end <= fn.char_range.end);
            CHECK(fn.body_range.size() > 0);
            REQUIRE(fn.tree != nullptr);
            CHECK(fn.tree->char_range == fn.char_range);
            REQUIRE(fn.name.has_value());
            CHECK(fn.name->rfind("fn", 0) == 0);
        }
    }
}

TEST_CASE("parse failures carry the kind") {
    ParseOutcome bad = parse_text("int f() { if (x) { return 1; \n", Language::Cpp);
    REQUIRE(std::holds_alternative<ParseFailure>(bad));
    CHECK(std::get<ParseFailure>(bad).kind == ParseFailure::Kind::SyntaxError);
    CHECK_FALSE(std::get<ParseFailure>(bad).detail.empty());

    // tolerant error budget lets the same text through
    ParseOptions tolerant;
    tolerant.max_error_fraction = 1.0;
    ParseOutcome ok = parse_text("int f() { if (x) { return 1; \n", Language::Cpp, tolerant);
    CHECK(std::holds_alternative<SyntaxNode>(ok));

    ParseOptions instant;
    instant.timeout_ms = 0;
    std::string big;
    for (int i = 0; i < 20000; ++i) big += "def f" + std::to_string(i) + "():\n    return 1\n";
    ParseOutcome slow = parse_text(big, Language::Python, instant);
    REQUIRE(std::holds_alternative<ParseFailure>(slow));
    CHECK(std::get<ParseFailure>(slow).kind == ParseFailure::Kind::Timeout);
}

TEST_CASE("body_third follows the floor formula") {
    for (std::size_t L = 1; L <= 12; ++L) {
        for (std::size_t r = 1; r <= L; ++r) {
            std::size_t idx = 3 * (r - 1) / L;
            SpanType expect = idx == 0   ? SpanType::BodyTop
                              : idx == 1 ? SpanType::BodyMid
                                         : SpanType::BodyBottom;
            CHECK(body_third(r, L) == expect);
        }
    }
    CHECK(body_third(1, 1) == SpanType::BodyTop);
    CHECK_THROWS_AS(body_third(0, 5), std::invalid_argument);
    CHECK_THROWS_AS(body_third(6, 5), std::invalid_argument);
}

TEST_CASE("classify_node maps control statements") {
    std::string py =
        "def f(x):\n"
        "    if x:\n"
        "        return 1\n"
        "    for i in range(3):\n"
        "        x += i\n"
        "    while x > 0:\n"
        "        x -= 1\n"
        "    try:\n"
        "        g()\n"
        "    except ValueError:\n"
        "        pass\n"
        "    return x\n";
    SyntaxNode root = parse_ok(py, Language::Python);
    CHECK(first_of_kind(root, py, Language::Python, "if_statement") == SpanType::IfStatement);
    CHECK(first_of_kind(root, py, Language::Python, "for_statement") == SpanType::ForLoop);
    CHECK(first_of_kind(root, py, Language::Python, "while_statement") == SpanType::WhileLoop);
    CHECK(first_of_kind(root, py, Language::Python, "try_statement") == SpanType::TryStatement);

    std::string cpp =
        "int f(int x) {\n"
        "    switch (x) {\n"
        "        case 1: return 2;\n"
        "        default: return 0;\n"
        "    }\n"
        "}\n";
    SyntaxNode croot = parse_ok(cpp, Language::Cpp);
    CHECK(first_of_kind(croot, cpp, Language::Cpp, "switch_statement") == SpanType::SwitchCase);
}

TEST_CASE("classify_node maps method tiers and empties") {
    std::string py =
        "# adds one\n"
        "def f(x):\n"
        "    return x + 1\n"
        "\n"
        "def g(x):\n"
        "    pass\n";
    SyntaxNode root = parse_ok(py, Language::Python);
    auto nodes = all_nodes(root, py, Language::Python);

    bool saw_with_comment = false, saw_plain = false, saw_empty = false, saw_body = false,
         saw_sig = false, saw_single = false;
    for (const NodeCtx& n : nodes) {
        auto t = classify_node(*n.node, n.ctx);
        if (n.node->kind == "function_definition") {
            if (t == SpanType::MethodWithComment) saw_with_comment = true;
            if (!t.has_value()) saw_plain = true;
        }
        if (n.node->kind == "block" && t == SpanType::EmptyBlock) saw_empty = true;
        if (n.node->kind == "block" && t == SpanType::MethodBody) saw_body = true;
        if (t == SpanType::MethodSignature) saw_sig = true;
        if (t == SpanType::SingleLineStatement) saw_single = true;
    }
    CHECK(saw_with_comment);  // f has the comment directly above
    CHECK(saw_plain);         // g does not
    CHECK(saw_empty);         // pass-only body
    CHECK(saw_body);
    CHECK(saw_sig);
    CHECK(saw_single);
}

TEST_CASE("span type table is closed over the enum") {
    const auto& rows = span_type_mapping();
    CHECK_FALSE(rows.empty());
    std::set<SpanType> covered;
    for (const auto& row : rows) {
        CHECK_FALSE(row.node_kind.empty());
        covered.insert(span_type_from_string(row.span_type));  // throws on a bad name
    }
    CHECK(covered.size() == kAllSpanTypes.size());
    for (SpanType t : kAllSpanTypes) {
        CHECK(span_type_from_string(to_string(t)) == t);
    }
}

TEST_CASE("code lexer token kinds and offsets") {
    std::string src = "int x = 42; // note\nstr s = \"hi\";\n";
    auto toks = lex_code(src);
    REQUIRE_FALSE(toks.empty());
    std::size_t prev = 0;
    bool ident = false, num = false, str = false, comment = false;
    for (const auto& t : toks) {
        CHECK(t.offset >= prev);
        prev = t.offset;
        CHECK(src.substr(t.offset, t.text.size()) == t.text);
        if (t.kind == CodeToken::Kind::Identifier && t.text == "x") ident = true;
        if (t.kind == CodeToken::Kind::Number && t.text == "42") num = true;
        if (t.kind == CodeToken::Kind::String) str = true;
        if (t.kind == CodeToken::Kind::Comment) comment = true;
    }
    CHECK(ident);
    CHECK(num);
    CHECK(str);
    CHECK(comment);
}

TEST_CASE("def-use edges canonicalize by first occurrence") {
    auto edges = def_use_edges("a = b + c\nd = a\n", Language::Python);
    std::vector<std::pair<std::string, std::string>> expect{
        {"v0", "v1"}, {"v0", "v2"}, {"v3", "v0"}};
    CHECK(edges == expect);
    CHECK(std::is_sorted(edges.begin(), edges.end()));
    // renaming-invariant
    auto renamed = def_use_edges("x = y + z\nw = x\n", Language::Python);
    CHECK(renamed == expect);
    CHECK(def_use_edges("f(1)\n", Language::Python).empty());
}

TEST_CASE("language keywords exist per language") {
    for (Language lang :
         {Language::Java, Language::Python, Language::Cpp, Language::JavaScript}) {
        const auto& kw = language_keywords(lang);
        CHECK(kw.count("if") == 1);
        CHECK(kw.count("return") == 1);
    }
    CHECK(language_keywords(Language::Python).count("def") == 1);
    CHECK(language_keywords(Language::Cpp).count("template") == 1);
}

// ---------------------------------------------------------------- sequences

TEST_CASE("mix and sentinel validation") {
    ObjectiveMix mix;
    CHECK_NOTHROW(mix.validate());
    mix.code_sfim = 0.9;  // code sum now 1.2
    CHECK_THROWS_AS(mix.validate(), std::invalid_argument);
    mix = {};
    mix.nl_fim = 0.7;
    CHECK_THROWS_AS(mix.validate(), std::invalid_argument);
    mix = {};
    mix.fim_psm = 1.5;
    CHECK_THROWS_AS(mix.validate(), std::invalid_argument);

    SentinelSet s;
    CHECK_NOTHROW(s.validate());
    SentinelSet empty = s;
    empty.mid = "";
    CHECK_THROWS_AS(empty.validate(), std::invalid_argument);
    SentinelSet esc = s;
    esc.pre = "<P\x1bRE>";
    CHECK_THROWS_AS(esc.validate(), std::invalid_argument);
    SentinelSet pref = s;
    pref.suf = "<PRE>X";  // pre is a prefix of suf
    CHECK_THROWS_AS(pref.validate(), std::invalid_argument);
    SentinelSet dup = s;
    dup.eos = dup.mid;
    CHECK_THROWS_AS(dup.validate(), std::invalid_argument);
}

TEST_CASE("objective and mode draws stay in their supports") {
    ObjectiveMix mix;
    RandomStream rng(17);
    bool nl_saw_sfim = false;
    for (int i = 0; i < 2000; ++i) {
        Objective code = choose_objective(DocKind::Code, mix, rng);
        CHECK((code == Objective::SFIM || code == Objective::FIM || code == Objective::NTP));
        Objective nl = choose_objective(DocKind::NL, mix, rng);
        if (nl == Objective::SFIM) nl_saw_sfim = true;
        CHECK(choose_mode(Objective::NTP, mix, rng) == SerializationMode::PSM);
    }
    CHECK_FALSE(nl_saw_sfim);  // SFIM needs syntax; NL never draws it
}

TEST_CASE("ntp span covers the whole document") {
    std::string doc = "alpha\nbeta\n";
    SpanSelection s = ntp_span(doc, "d0");
    CHECK(s.objective == Objective::NTP);
    CHECK(spans_partition_document(s, doc.size()));
    CHECK(s.prefix_range.empty());
    CHECK(s.suffix_range.empty());
    CHECK(s.middle_range == CharRange{0, doc.size()});
    CHECK(s.doc_ref == "d0");
}

TEST_CASE("fim spans partition at codepoint boundaries with bounded middles") {
    std::string doc = "caf\xc3\xa9 time\nsecond line\nthird \xe4\xb8\xad line\n";
    auto cps = codepoint_index(doc);
    std::size_t n = count_codepoints(doc);
    RandomStream rng(23);
    for (int i = 0; i < 3000; ++i) {
        auto s = select_fim_span(doc, "d", rng);
        REQUIRE(s.has_value());
        CHECK(spans_partition_document(*s, doc.size()));
        CHECK(s->objective == Objective::FIM);
        // boundaries are codepoint offsets
        CHECK(std::binary_search(cps.begin(), cps.end(), s->middle_range.begin));
        CHECK(std::binary_search(cps.begin(), cps.end(), s->middle_range.end));
        std::size_t mid_cp = count_codepoints(
            doc.substr(s->middle_range.begin, s->middle_range.size()));
        CHECK(mid_cp >= 1);
        CHECK(mid_cp <= (n + 1) / 2);
    }
    RandomStream r2(1);
    CHECK_FALSE(select_fim_span("", "d", r2).has_value());
    CHECK_FALSE(select_fim_span("x", "d", r2).has_value());
    CHECK(select_fim_span("xy", "d", r2).has_value());
}

TEST_CASE("sfim spans end on line boundaries inside a real function") {
    auto files = fixtures::sfim_function_files();
    RandomStream rng(31);
    for (const SourceFile& f : files) {
        CAPTURE(f.rel_path);
        SyntaxNode root = parse_ok(f.content, f.language.lang);
        std::size_t hits = 0;
        for (int i = 0; i < 200; ++i) {
            auto pick = select_sfim_span(f.content, "d", root, rng);
            if (!pick.has_value()) continue;
            ++hits;
            const SpanSelection& s = pick->span;
            CHECK(s.objective == Objective::SFIM);
            CHECK(spans_partition_document(s, f.content.size()));
            CHECK(is_line_end(f.content, s.middle_range.end));
            CHECK(s.middle_range.size() > 0);
            CHECK(pick->function_range.contains(s.middle_range));
            CHECK(pick->node_range.contains(s.middle_range));
            CHECK_FALSE(pick->node_kind.empty());
            CHECK(pick->node_kind != "module");
            CHECK(s.span_meta == pick->node_kind);
        }
        CHECK(hits > 100);  // fallback stays the exception on function-dense files
    }

    // no functions at all -> always fallback
    std::string flat = "x = 1\ny = 2\n";
    SyntaxNode froot = parse_ok(flat, Language::Python);
    RandomStream r2(5);
    for (int i = 0; i < 50; ++i) {
        CHECK_FALSE(select_sfim_span(flat, "d", froot, r2).has_value());
    }
}

TEST_CASE("offset function trees shift sfim into window coordinates") {
    std::string file = fixtures::function_file(Language::Python, 3, 7);
    SyntaxNode root = parse_ok(file, Language::Python);
    auto fns = list_functions(root, file, Language::Python);
    REQUIRE_FALSE(fns.empty());

    // window = the file with a synthetic prologue stripped of 10 bytes
    std::string window = file.substr(10);
    std::vector<OffsetFunctionTree> offered;
    for (const auto& fn : fns) {
        if (fn.char_range.begin >= 10)
            offered.push_back({fn.tree, -10});
    }
    REQUIRE_FALSE(offered.empty());
    RandomStream rng(9);
    std::size_t hits = 0;
    for (int i = 0; i < 200; ++i) {
        auto pick = select_sfim_span(window, "w", offered, rng);
        if (!pick.has_value()) continue;
        ++hits;
        CHECK(spans_partition_document(pick->span, window.size()));
        CHECK(is_line_end(window, pick->span.middle_range.end));
        CHECK(pick->function_range.end <= window.size());
    }
    CHECK(hits > 0);
}

TEST_CASE("sentinel escaping round trips and counts collisions") {
    SentinelSet s;
    std::string hostile = "a<PRE>b\x1b<MID>c<EOS><SUF>\x1b\x1b";
    std::size_t collisions = 0;
    std::string esc = escape_sentinels(hostile, s, &collisions);
    CHECK(collisions == 4);
    CHECK(esc.find("<PRE>") != std::string::npos);  // escaped but still readable
    CHECK(unescape_sentinels(esc, s) == hostile);
    CHECK(escape_sentinels("plain", s) == "plain");

    auto tok = default_tokenizer();
    CHECK(sentinel_overhead(s, *tok, Objective::NTP) == s.eos.size());
    CHECK(sentinel_overhead(s, *tok, Objective::FIM) ==
          s.pre.size() + s.suf.size() + s.mid.size() + s.eos.size());
    CHECK(sentinel_overhead(s, *tok, Objective::SFIM) ==
          sentinel_overhead(s, *tok, Objective::FIM));
}

TEST_CASE("serialize and deserialize are inverse for all layouts") {
    SentinelSet s;
    auto tok = default_tokenizer();
    std::string doc = "prefix text\nmiddle <PRE> part\nsuffix tail\n";

    for (Objective obj : {Objective::FIM, Objective::SFIM}) {
        for (SerializationMode mode : {SerializationMode::PSM, SerializationMode::SPM}) {
            SpanSelection span;
            span.doc_ref = "d";
            span.objective = obj;
            span.mode = mode;
            span.prefix_range = {0, 12};
            span.middle_range = {12, 30};
            span.suffix_range = {30, doc.size()};
            REQUIRE(spans_partition_document(span, doc.size()));

            std::size_t collisions = 0;
            TrainingSequence seq = serialize_sequence(doc, span, s, *tok, &collisions);
            CHECK(collisions == 1);  // the embedded <PRE>
            CHECK(seq.objective == obj);
            CHECK(seq.mode == mode);
            CHECK(seq.tokens == tok->encode(seq.text_form));

            DeserializedSequence back = deserialize_sequence(seq.text_form, s);
            CHECK(back.objective == Objective::FIM);  // SFIM shares the layout
            CHECK(back.mode == mode);
            CHECK(back.document == doc);
            CHECK(back.prefix == doc.substr(0, 12));
            CHECK(back.middle == doc.substr(12, 18));
            CHECK(back.suffix == doc.substr(30));
        }
    }

    TrainingSequence ntp = serialize_sequence(doc, ntp_span(doc, "d"), s, *tok);
    DeserializedSequence back = deserialize_sequence(ntp.text_form, s);
    CHECK(back.objective == Objective::NTP);
    CHECK(back.document == doc);

    CHECK_THROWS_AS(deserialize_sequence("garbage", s), std::invalid_argument);
    CHECK_THROWS_AS(deserialize_sequence("<PRE>a<MID>b<EOS>", s), std::invalid_argument);
}
