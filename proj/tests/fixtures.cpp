#include "fixtures.hpp"

#include <fstream>
#include <stdexcept>

namespace fixtures {

using cforge::Language;
using cforge::SourceFile;
namespace fs = std::filesystem;

namespace {

std::string py_function(std::size_t salt, std::size_t i) {
    const std::string name = "fn" + std::to_string(salt) + "_" + std::to_string(i);
    const std::string k = std::to_string(i + 1);
    std::string out;
    switch (i % 5) {
        case 0:
            out = "def " + name + "(x):\n"
                  "    if x > " + k + ":\n"
                  "        return x - " + k + "\n"
                  "    total = " + k + "\n"
                  "    for j in range(x):\n"
                  "        total += j\n"
                  "    return total\n";
            break;
        case 1:
            out = "def " + name + "(x):\n"
                  "    total = x + " + k + "\n"
                  "    while total > 100:\n"
                  "        total -= 7\n"
                  "    if total < 0:\n"
                  "        total = 0\n"
                  "    return total\n";
            break;
        case 2:
            out = "def " + name + "(items):\n"
                  "    total = 0\n"
                  "    for v in items:\n"
                  "        if v > " + k + ":\n"
                  "            total += v\n"
                  "    return total\n";
            break;
        case 3:
            out = "def " + name + "(x):\n"
                  "    try:\n"
                  "        return " + k + " // x\n"
                  "    except ZeroDivisionError:\n"
                  "        return 0\n";
            break;
        default:
            out = "# scales x by " + k + " with a floor\n"
                  "def " + name + "(x):\n"
                  "    if x < 0:\n"
                  "        return 0\n"
                  "    scaled = x * " + k + "\n"
                  "    return scaled\n";
            break;
    }
    return out + "\n";
}

std::string brace_body(const std::string& k, const char* decl_int, const char* incr) {
    std::string b;
    b += "    if (x > " + k + ") {\n"
         "        return x - " + k + ";\n"
         "    }\n";
    b += "    " + std::string(decl_int) + " total = " + k + ";\n";
    b += "    for (" + std::string(decl_int) + " j = 0; j < x; " + incr + ") {\n"
         "        total += j;\n"
         "    }\n";
    b += "    while (total > 100) {\n"
         "        total -= 7;\n"
         "    }\n"
         "    return total;\n";
    return b;
}

std::string cpp_function(std::size_t salt, std::size_t i) {
    const std::string name = "fn" + std::to_string(salt) + "_" + std::to_string(i);
    const std::string k = std::to_string(i + 1);
    std::string out;
    switch (i % 4) {
        case 0:
            out = "int " + name + "(int x) {\n" + brace_body(k, "int", "++j") + "}\n";
            break;
        case 1:
            out = "int " + name + "(int x) {\n"
                  "    switch (x % 3) {\n"
                  "        case 0:\n"
                  "            return " + k + ";\n"
                  "        case 1:\n"
                  "            return x + " + k + ";\n"
                  "        default:\n"
                  "            return x - " + k + ";\n"
                  "    }\n"
                  "}\n";
            break;
        case 2:
            out = "// clamps against " + k + "\n"
                  "int " + name + "(int x) {\n"
                  "    if (x < " + k + ") {\n"
                  "        return " + k + ";\n"
                  "    }\n"
                  "    return x;\n"
                  "}\n";
            break;
        default:
            out = "void " + name + "(int x) {\n"
                  "    int held = x * " + k + ";\n"
                  "    if (held > 0) {\n"
                  "        held = 0;\n"
                  "    }\n"
                  "}\n";
            break;
    }
    return out + "\n";
}

std::string java_method(std::size_t salt, std::size_t i) {
    const std::string name = "fn" + std::to_string(salt) + "_" + std::to_string(i);
    const std::string k = std::to_string(i + 1);
    std::string body;
    switch (i % 3) {
        case 0:
            body = "        if (x > " + k + ") {\n"
                   "            return x - " + k + ";\n"
                   "        }\n"
                   "        int total = " + k + ";\n"
                   "        for (int j = 0; j < x; j++) {\n"
                   "            total += j;\n"
                   "        }\n"
                   "        return total;\n";
            break;
        case 1:
            body = "        int total = x + " + k + ";\n"
                   "        while (total > 100) {\n"
                   "            total -= 7;\n"
                   "        }\n"
                   "        return total;\n";
            break;
        default:
            body = "        if (x < 0) {\n"
                   "            return 0;\n"
                   "        }\n"
                   "        return x * " + k + ";\n";
            break;
    }
    return "    static int " + name + "(int x) {\n" + body + "    }\n\n";
}

std::string js_function(std::size_t salt, std::size_t i) {
    const std::string name = "fn" + std::to_string(salt) + "_" + std::to_string(i);
    const std::string k = std::to_string(i + 1);
    std::string out;
    switch (i % 3) {
        case 0:
            out = "function " + name + "(x) {\n"
                  "    if (x > " + k + ") {\n"
                  "        return x - " + k + ";\n"
                  "    }\n"
                  "    let total = " + k + ";\n"
                  "    for (let j = 0; j < x; j += 1) {\n"
                  "        total += j;\n"
                  "    }\n"
                  "    return total;\n"
                  "}\n";
            break;
        case 1:
            out = "function " + name + "(x) {\n"
                  "    let total = x + " + k + ";\n"
                  "    while (total > 100) {\n"
                  "        total -= 7;\n"
                  "    }\n"
                  "    return total;\n"
                  "}\n";
            break;
        default:
            out = "// floors negative input\n"
                  "function " + name + "(x) {\n"
                  "    if (x < 0) {\n"
                  "        return 0;\n"
                  "    }\n"
                  "    return x * " + k + ";\n"
                  "}\n";
            break;
    }
    return out + "\n";
}

void write(const fs::path& p, const std::string& content) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("fixture write failed: " + p.string());
    out << content;
}

std::string dedup_base(std::size_t fid, std::size_t lines) {
    std::string out;
    for (std::size_t j = 0; j < lines; ++j) {
        out += "int a" + std::to_string(fid) + "_" + std::to_string(j) + " = " +
               std::to_string(j * 7 + fid) + ";\n";
    }
    return out;
}

}  // namespace

std::string function_file(Language lang, std::size_t count, std::size_t salt) {
    std::string out;
    switch (lang) {
        case Language::Python:
            for (std::size_t i = 0; i < count; ++i) out += py_function(salt, i);
            break;
        case Language::Cpp:
            out = "#include <cstddef>\n\n";
            for (std::size_t i = 0; i < count; ++i) out += cpp_function(salt, i);
            break;
        case Language::Java:
            out = "public class Gen" + std::to_string(salt) + " {\n";
            for (std::size_t i = 0; i < count; ++i) out += java_method(salt, i);
            out += "}\n";
            break;
        case Language::JavaScript:
            for (std::size_t i = 0; i < count; ++i) out += js_function(salt, i);
            break;
        default:
            throw std::runtime_error("no generator for this language");
    }
    return out;
}

std::vector<SourceFile> sfim_function_files() {
    std::vector<SourceFile> files;
    auto add = [&](Language lang, const char* rel, std::size_t salt) {
        SourceFile f;
        f.repo_id = "fixture";
        f.rel_path = rel;
        f.content = function_file(lang, 60, salt);
        f.language = cforge::language_from_path(rel);
        f.byte_len = f.content.size();
        files.push_back(std::move(f));
    };
    add(Language::Python, "gen_py.py", 21);
    add(Language::Cpp, "gen_cpp.cpp", 22);
    add(Language::Java, "GenJava.java", 23);
    add(Language::JavaScript, "gen_js.js", 24);
    return files;
}

DedupCorpus dedup_corpus() {
    DedupCorpus out;
    auto push = [&](std::size_t fid, std::string content) {
        SourceFile f;
        f.repo_id = "corpus_d";
        f.rel_path = "f" + std::to_string(fid) + ".py";
        f.byte_len = content.size();
        f.content = std::move(content);
        f.language = cforge::language_from_path(f.rel_path);
        out.files.push_back(std::move(f));
    };

    constexpr std::size_t kLines = 260;
    constexpr std::size_t kTailEdit = 8;
    for (std::size_t p = 0; p < 20; ++p) {
        std::string base = dedup_base(p, kLines);
        std::string twin = dedup_base(p, kLines - kTailEdit);
        for (std::size_t j = kLines - kTailEdit; j < kLines; ++j) {
            twin += "int b" + std::to_string(p) + "_" + std::to_string(j) + " = " +
                    std::to_string(j * 11 + 3) + ";\n";
        }
        std::size_t first = out.files.size();
        push(2 * p, std::move(base));
        push(2 * p + 1, std::move(twin));
        out.planted.emplace_back(first, first + 1);
    }
    for (std::size_t s = 0; s < 160; ++s) {
        push(40 + s, dedup_base(1000 + s * 13, 40));
    }
    return out;
}

void write_fixture_corpus(const fs::path& root) {
    fs::remove_all(root);

    auto meta = [](const char* owner, unsigned stars, unsigned commits, const char* license) {
        std::string j = "{\"owner\": \"" + std::string(owner) + "\", \"stars\": " +
                        std::to_string(stars) + ", \"commit_count\": " + std::to_string(commits);
        if (license != nullptr) j += ", \"license\": \"" + std::string(license) + "\"";
        return j + "}\n";
    };
    const std::string mit_text =
        "MIT License\n\nPermission is hereby granted, free of charge, to any person "
        "obtaining a copy of this software and associated documentation files.\n";

    write(root / "r0_py/repo.json", meta("ada", 50, 300, "MIT"));
    write(root / "r0_py/a.py", function_file(Language::Python, 8, 1));
    write(root / "r0_py/b.py", function_file(Language::Python, 6, 2));
    write(root / "r0_py/README.md",
          "# r0\n\nNumeric helpers. Maintainer: ada@example.com.\n");

    write(root / "r1_py/repo.json", meta("bea", 35, 210, nullptr));
    write(root / "r1_py/LICENSE", mit_text);
    write(root / "r1_py/core.py", function_file(Language::Python, 7, 3));
    write(root / "r1_py/util.py", function_file(Language::Python, 5, 4));
    write(root / "r1_py/docs/guide.md", "# guide\n\nUsage notes for r1.\n");

    write(root / "r2_cpp/repo.json", meta("cal", 80, 400, "MIT"));
    write(root / "r2_cpp/main.cpp", function_file(Language::Cpp, 6, 5));
    write(root / "r2_cpp/lib.cpp", function_file(Language::Cpp, 6, 6));
    write(root / "r2_cpp/README.md", "# r2\n\nBuilds at 192.168.4.7 nightly.\n");

    write(root / "r3_cpp/repo.json", meta("dot", 65, 150, "BSD-3-Clause"));
    write(root / "r3_cpp/src/engine.cpp", function_file(Language::Cpp, 8, 7));
    write(root / "r3_cpp/src/tests/test_engine.cpp", function_file(Language::Cpp, 4, 8));
    write(root / "r3_cpp/notes.txt", "Engine exploration notes.\n");

    write(root / "r4_java/repo.json", meta("eli", 44, 260, "MIT"));
    write(root / "r4_java/App.java", function_file(Language::Java, 6, 9));
    write(root / "r4_java/Util.java", function_file(Language::Java, 6, 10));

    write(root / "r5_java/repo.json", meta("fay", 72, 330, "Apache-2.0"));
    write(root / "r5_java/Service.java", function_file(Language::Java, 7, 11));
    write(root / "r5_java/README.md", "# r5\n\nService scaffolding.\n");

    write(root / "r6_js/repo.json", meta("gus", 28, 120, "MIT"));
    write(root / "r6_js/index.js", function_file(Language::JavaScript, 6, 12));
    write(root / "r6_js/lib/helpers.js", function_file(Language::JavaScript, 6, 13));

    write(root / "r7_js/repo.json", meta("hal", 90, 500, "BSD-2-Clause"));
    write(root / "r7_js/app.js", function_file(Language::JavaScript, 7, 14));
    write(root / "r7_js/vendor.js", function_file(Language::JavaScript, 4, 15));

    write(root / "r8_mix/repo.json", meta("ivy", 55, 280, "Apache-2.0"));
    write(root / "r8_mix/py/one.py", function_file(Language::Python, 5, 16));
    write(root / "r8_mix/cpp/two.cpp", function_file(Language::Cpp, 5, 17));
    write(root / "r8_mix/java/Three.java", function_file(Language::Java, 5, 18));
    write(root / "r8_mix/js/four.js", function_file(Language::JavaScript, 5, 19));
    write(root / "r8_mix/py/dup_a.py", function_file(Language::Python, 4, 20));
    write(root / "r8_mix/py/dup_b.py", function_file(Language::Python, 4, 20));
    write(root / "r8_mix/README.md", "# r8\n\nMixed-language fixture repo.\n");

    write(root / "r9_gpl/repo.json", meta("joe", 61, 140, "GPL-3.0-only"));
    write(root / "r9_gpl/g.py", function_file(Language::Python, 5, 25));

    write(root / "README.md", "Fixture corpus of ten small repositories.\n");
}

void write_holdout_corpus(const fs::path& root) {
    fs::remove_all(root);
    write(root / "hold_py/repo.json",
          "{\"owner\": \"kim\", \"stars\": 9, \"commit_count\": 40, \"license\": \"MIT\"}\n");
    write(root / "hold_py/tool.py", function_file(Language::Python, 12, 90));
    write(root / "hold_cpp/repo.json",
          "{\"owner\": \"lou\", \"stars\": 11, \"commit_count\": 52, \"license\": \"MIT\"}\n");
    write(root / "hold_cpp/grid.cpp", function_file(Language::Cpp, 12, 91));
}

}  // namespace fixtures
