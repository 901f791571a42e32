#include <benchmark/benchmark.h>

#include <string>
#include <variant>
#include <vector>

#include "cforge/dedup.hpp"
#include "cforge/metrics.hpp"
#include "cforge/rng.hpp"
#include "cforge/sampler.hpp"
#include "cforge/syntax.hpp"
#include "cforge/text.hpp"

namespace {

std::string synthetic_code(std::size_t lines, std::uint64_t salt) {
    std::string out;
    cforge::RandomStream rng(salt);
    for (std::size_t i = 0; i < lines; ++i) {
        out += "int v" + std::to_string(rng.uniform_int(0, 500)) + " = f" +
               std::to_string(i % 40) + "(a" + std::to_string(rng.uniform_int(0, 99)) +
               ", " + std::to_string(i) + ");\n";
    }
    return out;
}

std::string synthetic_python(std::size_t functions) {
    std::string out;
    for (std::size_t i = 0; i < functions; ++i) {
        std::string n = std::to_string(i);
        out += "def fn" + n + "(x):\n";
        out += "    if x > " + n + ":\n";
        out += "        return x - " + n + "\n";
        out += "    for i in range(" + n + "):\n";
        out += "        x += i\n";
        out += "    return x\n\n";
    }
    return out;
}

void minhash_signature_bench(benchmark::State& state) {
    std::string doc = synthetic_code(static_cast<std::size_t>(state.range(0)), 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(cforge::minhash_signature(doc, 5, 7));
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * doc.size()));
}
BENCHMARK(minhash_signature_bench)->Arg(64)->Arg(512)->Arg(4096);

void estimate_jaccard_bench(benchmark::State& state) {
    auto a = cforge::minhash_signature(synthetic_code(512, 1), 5, 7);
    auto b = cforge::minhash_signature(synthetic_code(512, 2), 5, 7);
    for (auto _ : state) benchmark::DoNotOptimize(cforge::estimate_jaccard(a, b));
}
BENCHMARK(estimate_jaccard_bench);

void parse_python_bench(benchmark::State& state) {
    std::string doc = synthetic_python(static_cast<std::size_t>(state.range(0)));
    for (auto _ : state) {
        auto outcome = cforge::parse_text(doc, cforge::Language::Python);
        benchmark::DoNotOptimize(std::holds_alternative<cforge::SyntaxNode>(outcome));
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * doc.size()));
}
BENCHMARK(parse_python_bench)->Arg(8)->Arg(64)->Arg(256);

void parse_cpp_bench(benchmark::State& state) {
    std::string doc;
    for (int i = 0; i < state.range(0); ++i) {
        std::string n = std::to_string(i);
        doc += "int fn" + n + "(int x) {\n    while (x > " + n +
               ") {\n        x -= 2;\n    }\n    return x;\n}\n";
    }
    for (auto _ : state) {
        auto outcome = cforge::parse_text(doc, cforge::Language::Cpp);
        benchmark::DoNotOptimize(std::holds_alternative<cforge::SyntaxNode>(outcome));
    }
    state.SetBytesProcessed(static_cast<std::int64_t>(state.iterations() * doc.size()));
}
BENCHMARK(parse_cpp_bench)->Arg(8)->Arg(64)->Arg(256);

void levenshtein_bench(benchmark::State& state) {
    std::string a = synthetic_code(static_cast<std::size_t>(state.range(0)), 3);
    std::string b = a;
    for (std::size_t i = 20; i < b.size(); i += 37) b[i] = '#';
    for (auto _ : state) benchmark::DoNotOptimize(cforge::levenshtein(a, b));
}
BENCHMARK(levenshtein_bench)->Arg(8)->Arg(32);

void bleu4_bench(benchmark::State& state) {
    std::string ref = synthetic_code(40, 4);
    std::string pred = synthetic_code(40, 5);
    for (auto _ : state) benchmark::DoNotOptimize(cforge::bleu4(pred, ref));
}
BENCHMARK(bleu4_bench);

void code_bleu_bench(benchmark::State& state) {
    std::string ref = synthetic_python(20);
    std::string pred = synthetic_python(19) + "def extra(x):\n    return x\n";
    for (auto _ : state) {
        benchmark::DoNotOptimize(cforge::code_bleu(pred, ref, cforge::Language::Python));
    }
}
BENCHMARK(code_bleu_bench);

void tfidf_bench(benchmark::State& state) {
    std::vector<std::string> docs;
    for (int i = 0; i < state.range(0); ++i) docs.push_back(synthetic_code(80, 10 + i));
    std::vector<std::string_view> views(docs.begin(), docs.end());
    for (auto _ : state) benchmark::DoNotOptimize(cforge::tfidf_vectors(views));
}
BENCHMARK(tfidf_bench)->Arg(16)->Arg(128);

void kmeans_bench(benchmark::State& state) {
    std::vector<std::string> docs;
    for (int i = 0; i < 128; ++i) docs.push_back(synthetic_code(60, 700 + i));
    std::vector<std::string_view> views(docs.begin(), docs.end());
    auto vecs = cforge::tfidf_vectors(views);
    for (auto _ : state) {
        cforge::RandomStream rng(1);
        benchmark::DoNotOptimize(
            cforge::kmeans_assign(vecs, static_cast<std::size_t>(state.range(0)), rng));
    }
}
BENCHMARK(kmeans_bench)->Arg(4)->Arg(16);

}  // namespace

BENCHMARK_MAIN();
