#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cforge/chunk.hpp"
#include "cforge/hash.hpp"
#include "cforge/jsonl.hpp"
#include "cforge/rng.hpp"
#include "cforge/sequence.hpp"
#include "cforge/text.hpp"
#include "cforge/tokenizer.hpp"

using namespace cforge;

TEST_CASE("utf8 validity") {
    CHECK(is_valid_utf8(""));
    CHECK(is_valid_utf8("plain ascii"));
    CHECK(is_valid_utf8("caf\xc3\xa9"));
    CHECK(is_valid_utf8("\xe4\xb8\xad\xe6\x96\x87"));
    CHECK(is_valid_utf8("\xf0\x9f\x99\x82"));
    CHECK_FALSE(is_valid_utf8("\xc3"));              // truncated
    CHECK_FALSE(is_valid_utf8("\x80"));              // bare continuation
    CHECK_FALSE(is_valid_utf8("\xc0\xaf"));          // overlong
    CHECK_FALSE(is_valid_utf8("\xed\xa0\x80"));      // surrogate
    CHECK_FALSE(is_valid_utf8("\xf5\x80\x80\x80"));  // above U+10FFFF
}

TEST_CASE("codepoint index against a hand decode") {
    // "aé中🙂b": a(1) é(2) 中(3) 🙂(4) b(1)
    std::string s = "a\xc3\xa9\xe4\xb8\xad\xf0\x9f\x99\x82\x62";
    std::vector<std::size_t> expected{0, 1, 3, 6, 10, 11};
    CHECK(codepoint_index(s) == expected);
    CHECK(count_codepoints(s) == 5);
    CHECK(count_codepoints("") == 0);
}

TEST_CASE("line index invariants") {
    auto lines = line_index("ab\ncd\n");
    REQUIRE(lines.size() == 2);
    CHECK(lines[0].begin == 0);
    CHECK(lines[0].end == 2);
    CHECK(lines[0].newline_end == 3);
    CHECK(lines[1].newline_end == 6);

    auto tail = line_index("ab\ncd");
    REQUIRE(tail.size() == 2);
    CHECK(tail[1].end == 5);
    CHECK(tail[1].newline_end == 5);

    CHECK(line_index("").empty());
    CHECK(count_lines("x\ny\nz") == 3);

    std::string t = "ab\ncd";
    CHECK(is_line_end(t, 2));
    CHECK(is_line_end(t, 5));
    CHECK_FALSE(is_line_end(t, 1));
    CHECK_FALSE(is_line_end(t, 3));
}

TEST_CASE("levenshtein is codepoint level") {
    CHECK(levenshtein("", "") == 0);
    CHECK(levenshtein("abc", "abc") == 0);
    CHECK(levenshtein("abc", "axc") == 1);
    CHECK(levenshtein("kitten", "sitting") == 3);
    // é is one edit away from e, not two bytes worth
    CHECK(levenshtein("caf\xc3\xa9", "cafe") == 1);
}

TEST_CASE("hash primitives are stable and sensitive") {
    // published splitmix64 test vector
    CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
    CHECK(hash_bytes("abc") == hash_bytes("abc"));
    CHECK(hash_bytes("abc") != hash_bytes("abd"));
    CHECK(hash_bytes("") != hash_bytes(std::string_view("\x00", 1)));
    CHECK(hash_combine(1, 2) != hash_combine(2, 1));
}

TEST_CASE("rng streams are deterministic and well ranged") {
    RandomStream a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());

    RandomStream r(7);
    for (int i = 0; i < 2000; ++i) {
        double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
    std::set<std::uint64_t> seen;
    for (int i = 0; i < 4000; ++i) {
        std::uint64_t v = r.uniform_int(3, 9);
        CHECK(v >= 3);
        CHECK(v <= 9);
        seen.insert(v);
    }
    CHECK(seen.size() == 7);  // every value reachable

    // derived streams differ by stage and by item
    RandomStream base(11);
    auto s1 = base.derive("stage", "x");
    auto s2 = base.derive("stage", "y");
    auto s3 = base.derive("other", "x");
    CHECK(s1.next_u64() != s2.next_u64());
    auto s1b = base.derive("stage", "x");
    CHECK(s1b.next_u64() != s3.next_u64());
    // derive is const: base unaffected
    RandomStream base2(11);
    (void)base2.derive("stage", "x");
    RandomStream base3(11);
    CHECK(base2.next_u64() == base3.next_u64());
}

TEST_CASE("shuffle yields a permutation, uniform-ish over small cases") {
    RandomStream r(5);
    std::vector<int> v{1, 2, 3, 4, 5, 6, 7, 8};
    auto sorted = v;
    r.shuffle(v);
    auto check = v;
    std::sort(check.begin(), check.end());
    CHECK(check == sorted);

    // all 6 orders of 3 elements appear over many shuffles
    std::map<std::vector<int>, int> counts;
    for (int i = 0; i < 3000; ++i) {
        std::vector<int> t{1, 2, 3};
        r.shuffle(t);
        counts[t]++;
    }
    CHECK(counts.size() == 6);
}

TEST_CASE("byte tokenizer contract") {
    auto tok = default_tokenizer();
    std::string text = "hi\n\xc3\xa9";
    auto ids = tok->encode(text);
    CHECK(ids.size() == text.size());
    CHECK(tok->decode(ids) == text);
    CHECK(tok->count(text) == text.size());
    CHECK(tok->count("") == 0);
}

TEST_CASE("token record binary roundtrip") {
    std::stringstream ss(std::ios::in | std::ios::out | std::ios::binary);
    std::vector<std::vector<std::uint32_t>> recs{
        {}, {0}, {1, 2, 3}, {0xFFFFFFFFu, 7, 42}};
    for (const auto& r : recs) append_token_record(ss, r);
    auto back = read_token_records(ss);
    CHECK(back == recs);
}

TEST_CASE("chunking partitions the document within budget") {
    auto tok = default_tokenizer();
    std::string doc;
    for (int i = 0; i < 120; ++i) doc += "line number " + std::to_string(i) + "\n";

    for (std::size_t budget : {16, 40, 100, 1000, 100000}) {
        ChunkResult res = chunk_document(doc, *tok, budget);
        std::string glued;
        std::size_t prev_end = 0;
        for (const CharRange& c : res.chunks) {
            CHECK(c.begin == prev_end);  // contiguous
            CHECK(c.end > c.begin);
            CHECK(tok->count(doc.substr(c.begin, c.end - c.begin)) <= budget);
            glued += doc.substr(c.begin, c.end - c.begin);
            prev_end = c.end;
        }
        CHECK(prev_end == doc.size());
        CHECK(glued == doc);
    }
}

TEST_CASE("chunk boundaries land on line ends when feasible") {
    auto tok = default_tokenizer();
    std::string doc;
    for (int i = 0; i < 50; ++i) doc += "abcdefgh\n";  // 9 bytes per line
    ChunkResult res = chunk_document(doc, *tok, 30);
    CHECK(res.oversize_line_splits == 0);
    for (std::size_t i = 0; i + 1 < res.chunks.size(); ++i) {
        CHECK(doc[res.chunks[i].end - 1] == '\n');
    }
    // a single line above the budget must be split and counted
    std::string one(100, 'x');
    ChunkResult split = chunk_document(one, *tok, 32);
    CHECK(split.oversize_line_splits > 0);
    CHECK(split.chunks.size() == 4);
}

TEST_CASE("jsonl record roundtrips with hostile content") {
    SourceFile f;
    f.repo_id = "repo/x";
    f.rel_path = "dir/caf\xc3\xa9.py";
    f.content = "line \"quoted\"\n\ttab \xf0\x9f\x99\x82";
    f.language = language_from_path(f.rel_path);
    f.byte_len = f.content.size();
    SourceFile f2 = jsonl::parse_source_file(jsonl::to_json(f));
    CHECK(f2.repo_id == f.repo_id);
    CHECK(f2.rel_path == f.rel_path);
    CHECK(f2.content == f.content);
    CHECK(f2.byte_len == f.byte_len);
    CHECK(f2.language == f.language);

    Repository r;
    r.repo_id = "alpha";
    r.owner = "o";
    r.stars = 5;
    r.commit_count = 9;
    r.test_file_count = 1;
    r.license = LicenseVerdict{"MIT", true, LicenseSource::DeclaredMetadata};
    r.files.push_back(f);
    Repository r2 = jsonl::parse_repository(jsonl::to_json(r));
    CHECK(r2.repo_id == r.repo_id);
    CHECK(r2.license == r.license);
    REQUIRE(r2.files.size() == 1);
    CHECK(r2.files[0].content == f.content);

    NaturalDoc d{"alpha:README.md", "hello \xe4\xb8\xad", NaturalLanguage::Chinese};
    NaturalDoc d2 = jsonl::parse_natural_doc(jsonl::to_json(d));
    CHECK(d2.doc_id == d.doc_id);
    CHECK(d2.content == d.content);
    CHECK(d2.language == d.language);

    jsonl::SignatureRecord sig;
    sig.file = "alpha:a.py";
    sig.values = {1, 2, 3};
    sig.shingle_width = 5;
    sig.has_shingles = true;
    sig.shingles = {10, 20};
    jsonl::SignatureRecord sig2 = jsonl::parse_signature(jsonl::to_json(sig));
    CHECK(sig2.values == sig.values);
    CHECK(sig2.shingles == sig.shingles);
    CHECK(sig2.has_shingles);

    jsonl::OrderingRecord ord{"alpha", "DepGraph", {"b.py", "a.py"}};
    jsonl::OrderingRecord ord2 = jsonl::parse_ordering(jsonl::to_json(ord));
    CHECK(ord2.strategy == "DepGraph");
    CHECK(ord2.files == ord.files);

    jsonl::ClusterRecord cl{"alpha:a.py", {"alpha:a.py", "beta:b.py"}, {1.0, 0.93}};
    jsonl::ClusterRecord cl2 = jsonl::parse_cluster(jsonl::to_json(cl));
    CHECK(cl2.members == cl.members);
    CHECK(cl2.verified_jaccard == cl.verified_jaccard);

    jsonl::GateRecord g{"alpha:a.py", "timeout", 12.5};
    jsonl::GateRecord g2 = jsonl::parse_gate(jsonl::to_json(g));
    CHECK(g2.verdict == "timeout");
    CHECK(g2.parse_ms == doctest::Approx(12.5));

    jsonl::VerdictRecord v{"alpha:a.py", false, {"long_line"}};
    jsonl::VerdictRecord v2 = jsonl::parse_verdict(jsonl::to_json(v));
    CHECK_FALSE(v2.keep);
    CHECK(v2.reasons == v.reasons);
}

TEST_CASE("malformed jsonl lines throw with context") {
    CHECK_THROWS_WITH_AS(jsonl::parse_repository("{not json"),
                         doctest::Contains("malformed JSON line"), std::runtime_error);
    CHECK_THROWS_AS(jsonl::parse_source_file("[1,2]"), std::runtime_error);
}

TEST_CASE("file id format") {
    SourceFile f;
    f.repo_id = "alpha";
    f.rel_path = "src/a.py";
    CHECK(jsonl::file_id(f) == "alpha:src/a.py");
    CHECK(jsonl::file_id("r", "p") == "r:p");
}

TEST_CASE("training sequence json carries the count, not the ids") {
    TrainingSequence s;
    s.tokens = {1, 2, 3};
    s.text_form = "abc";
    s.objective = Objective::FIM;
    s.mode = SerializationMode::SPM;
    s.source_doc = "alpha#0";
    std::string line = jsonl::to_json(s);
    CHECK(line.find("\"token_count\":3") != std::string::npos);
    CHECK(line.find("tokens\":[") == std::string::npos);
    TrainingSequence s2 = jsonl::parse_training_sequence(line);
    CHECK(s2.text_form == s.text_form);
    CHECK(s2.objective == Objective::FIM);
    CHECK(s2.mode == SerializationMode::SPM);
    CHECK(s2.source_doc == s.source_doc);
}
