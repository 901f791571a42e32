#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cforge/bench.hpp"
#include "cforge/jsonl.hpp"
#include "cforge/metrics.hpp"
#include "cforge/pipeline.hpp"
#include "fixtures.hpp"

using namespace cforge;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& leaf) {
    fs::path p = fs::temp_directory_path() / "cforge_tests" / leaf;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream out;
    out << in.rdbuf();
    return out.str();
}

void spit(const fs::path& p, const std::string& text) {
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << text;
}

json manifest(const fs::path& dir) { return json::parse(slurp(dir / "manifest.json")); }

PipelineConfig small_config(const fs::path& in, const fs::path& out) {
    PipelineConfig cfg;
    cfg.seed = 1;
    cfg.jobs = 2;
    cfg.max_context = 256;
    cfg.input_root = in.string();
    cfg.output_root = out.string();
    return cfg;
}

}  // namespace

TEST_CASE("config text parsing and precedence") {
    PipelineConfig cfg = parse_config_text(
        "# comment\n"
        "seed = 9\n"
        "\n"
        "jobs=3\n"
        "  max_context = 512  \n"
        "mask_names = true\n"
        "dedup_threshold = 0.8\n"
        "bench_languages = python, cpp\n");
    CHECK(cfg.seed == 9);
    CHECK(cfg.jobs == 3);
    CHECK(cfg.max_context == 512);
    CHECK(cfg.mask_names);
    CHECK(cfg.dedup.threshold == doctest::Approx(0.8));
    CHECK(cfg.bench_languages ==
          std::vector<Language>{Language::Python, Language::Cpp});

    CHECK_THROWS_AS(parse_config_text("mystery = 1\n"), PipelineError);
    CHECK_THROWS_AS(parse_config_text("seed = banana\n"), PipelineError);
    try {
        parse_config_text("seed = 1\nbroken line\n");
        FAIL("expected PipelineError");
    } catch (const PipelineError& e) {
        CHECK(e.exit_code == kExitConfig);
        CHECK(std::string(e.what()).find("2") != std::string::npos);  // cites the line
    }
}

TEST_CASE("config json round trip covers every key") {
    PipelineConfig cfg;
    cfg.seed = 77;
    cfg.jobs = 5;
    cfg.mask_names = true;
    cfg.prune_fraction = 0.25;
    cfg.dedup.threshold = 0.9;
    cfg.dedup.shingle_width = 7;
    cfg.mix.code_sfim = 0.6;
    cfg.mix.code_fim = 0.25;
    cfg.sentinels.pre = "<P>";
    cfg.bench_languages = {Language::JavaScript};
    cfg.bench_quota = 11;
    cfg.predictions_file = "preds.jsonl";
    cfg.eval_k = 4;

    PipelineConfig back = config_from_json(config_to_json(cfg));
    CHECK(back.seed == cfg.seed);
    CHECK(back.jobs == cfg.jobs);
    CHECK(back.mask_names == cfg.mask_names);
    CHECK(back.prune_fraction == cfg.prune_fraction);
    CHECK(back.dedup.threshold == cfg.dedup.threshold);
    CHECK(back.dedup.shingle_width == cfg.dedup.shingle_width);
    CHECK(back.mix.code_sfim == cfg.mix.code_sfim);
    CHECK(back.mix.code_fim == cfg.mix.code_fim);
    CHECK(back.sentinels.pre == cfg.sentinels.pre);
    CHECK(back.bench_languages == cfg.bench_languages);
    CHECK(back.bench_quota == cfg.bench_quota);
    CHECK(back.predictions_file == cfg.predictions_file);
    CHECK(back.eval_k == cfg.eval_k);
}

TEST_CASE("load_config accepts text, json, and manifests") {
    fs::path dir = scratch("config_load");
    spit(dir / "a.conf", "seed = 5\nmax_context = 128\n");
    PipelineConfig a = load_config((dir / "a.conf").string());
    CHECK(a.seed == 5);
    CHECK(a.max_context == 128);

    PipelineConfig src;
    src.seed = 8;
    spit(dir / "b.json", config_to_json(src));
    CHECK(load_config((dir / "b.json").string()).seed == 8);

    json man;
    man["stage"] = "clean";
    man["config"] = json::parse(config_to_json(src));
    spit(dir / "manifest.json", man.dump(2));
    CHECK(load_config((dir / "manifest.json").string()).seed == 8);

    CHECK_THROWS_AS(load_config((dir / "missing.conf").string()), PipelineError);
}

TEST_CASE("environment overrides beat the file") {
    PipelineConfig cfg;
    cfg.seed = 1;
    ::setenv("CFORGE_SEED", "42", 1);
    ::setenv("CFORGE_MASK_NAMES", "true", 1);
    apply_env_overrides(cfg);
    ::unsetenv("CFORGE_SEED");
    ::unsetenv("CFORGE_MASK_NAMES");
    CHECK(cfg.seed == 42);
    CHECK(cfg.mask_names);
}

TEST_CASE("validate_config catches bad knobs") {
    PipelineConfig cfg;
    CHECK(validate_config(cfg).empty());
    cfg.jobs = 0;
    CHECK_FALSE(validate_config(cfg).empty());
    cfg = {};
    cfg.dedup.bands = 7;  // 7*8 != 256
    CHECK_FALSE(validate_config(cfg).empty());
    cfg = {};
    cfg.mix.code_sfim = 0.9;
    CHECK_FALSE(validate_config(cfg).empty());
    cfg = {};
    cfg.sentinels.eos = "";
    CHECK_FALSE(validate_config(cfg).empty());
    cfg = {};
    cfg.max_context = 8;  // below sentinel overhead + slack
    CHECK_FALSE(validate_config(cfg).empty());
    cfg = {};
    cfg.bench_languages = {Language::CSharp};
    CHECK_FALSE(validate_config(cfg).empty());
}

TEST_CASE("ingest reads a repo tree") {
    fs::path root = scratch("ingest_tree");
    fixtures::write_fixture_corpus(root);
    IngestResult in = ingest_corpus(root.string());

    REQUIRE(in.repos.size() == 10);
    REQUIRE(in.licenses.size() == 10);
    for (std::size_t i = 1; i < in.repos.size(); ++i)
        CHECK(in.repos[i - 1].repo_id < in.repos[i].repo_id);

    const Repository* r0 = nullptr;
    const Repository* r1 = nullptr;
    const Repository* r3 = nullptr;
    for (std::size_t i = 0; i < in.repos.size(); ++i) {
        if (in.repos[i].repo_id == "r0_py") r0 = &in.repos[i];
        if (in.repos[i].repo_id == "r1_py") {
            r1 = &in.repos[i];
            CHECK(in.licenses[i].file_text.has_value());  // LICENSE file captured
            CHECK_FALSE(in.licenses[i].declared.has_value());
        }
        if (in.repos[i].repo_id == "r3_cpp") r3 = &in.repos[i];
    }
    REQUIRE(r0 != nullptr);
    CHECK(r0->owner == "ada");
    CHECK(r0->stars > 0);
    CHECK(r0->files.size() == 2);  // README is a doc, not a file
    for (const auto& f : r0->files) CHECK(f.rel_path.find("README") == std::string::npos);
    REQUIRE(r1 != nullptr);
    for (const auto& f : r1->files) CHECK(f.rel_path.find("LICENSE") == std::string::npos);
    REQUIRE(r3 != nullptr);
    CHECK(r3->test_file_count == 1);  // src/tests/test_engine.cpp

    bool loose = false;
    for (const auto& d : in.docs) {
        CHECK_FALSE(d.content.empty());
        if (d.doc_id.find(':') == std::string::npos) loose = true;
    }
    CHECK(loose);  // root README.md rides along without a repo prefix

    CHECK_THROWS_AS(ingest_corpus((root / "nope").string()), PipelineError);
}

TEST_CASE("ingest reads a jsonl corpus and drops duplicate ids") {
    fs::path dir = scratch("ingest_jsonl");
    Repository r;
    r.repo_id = "solo";
    r.owner = "o";
    SourceFile f;
    f.repo_id = "solo";
    f.rel_path = "a.py";
    f.content = "x = 1\n";
    f.language = language_from_path(f.rel_path);
    f.byte_len = f.content.size();
    r.files.push_back(f);
    std::string line = jsonl::to_json(r);
    spit(dir / "corpus.jsonl", line + "\n" + line + "\n");

    IngestResult in = ingest_corpus((dir / "corpus.jsonl").string());
    CHECK(in.repos.size() == 1);
    CHECK_FALSE(in.warnings.empty());  // duplicate reported
}

TEST_CASE("clean stage filters and masks") {
    fs::path root = scratch("stage_clean_in");
    fs::path out = scratch("stage_clean_out");
    fixtures::write_fixture_corpus(root);
    PipelineConfig cfg = small_config(root, out);
    std::ostringstream log;
    run_clean(cfg, log);

    auto repos = jsonl::read_records<Repository>((out / "clean" / "repos.jsonl").string(),
                                                 [](const std::string& l) {
                                                     return jsonl::parse_repository(l);
                                                 });
    std::set<std::string> ids;
    for (const auto& r : repos) {
        ids.insert(r.repo_id);
        CHECK(r.license.permissive);
    }
    CHECK(ids.count("r9_gpl") == 0);  // non-permissive license dropped
    CHECK(ids.count("r0_py") == 1);

    // PII scrubbed from docs and manifests count it
    std::string docs = slurp(out / "clean" / "docs.jsonl");
    CHECK(docs.find("ada@example.com") == std::string::npos);
    CHECK(docs.find("<EMAIL>") != std::string::npos);

    json m = manifest(out / "clean");
    CHECK(m["stage"] == "clean");
    CHECK(m["repos"]["dropped_license"].get<int>() >= 1);
    CHECK(m["files"]["kept"].get<int>() > 0);
    CHECK(m["gate"]["checked"].get<int>() > 0);
    CHECK(m["gate"]["syntax_error"].get<int>() == 0);
    // drop buckets plus kept account for every input file
    int buckets = 0;
    for (const auto& [key, val] : m["files"]["dropped"].items()) buckets += val.get<int>();
    CHECK(m["files"]["input"].get<int>() == m["files"]["kept"].get<int>() + buckets);
    CHECK(m["config"].contains("seed"));
    CHECK_FALSE(m["config"].contains("output_root"));  // self-reference stays out
}

TEST_CASE("stages demand their inputs in order") {
    fs::path out = scratch("stage_order");
    PipelineConfig cfg = small_config(out / "in", out);
    std::ostringstream log;
    try {
        run_dedup(cfg, log);
        FAIL("expected PipelineError");
    } catch (const PipelineError& e) {
        CHECK(e.exit_code == kExitMissingInput);
        CHECK(std::string(e.what()).find("clean") != std::string::npos);
    }
    try {
        run_forge(cfg, log);
        FAIL("expected PipelineError");
    } catch (const PipelineError& e) {
        CHECK(e.exit_code == kExitMissingInput);
    }
}

TEST_CASE("full pipeline produces coherent artifacts") {
    fs::path root = scratch("stage_all_in");
    fs::path hold = scratch("stage_all_hold");
    fs::path out = scratch("stage_all_out");
    fixtures::write_fixture_corpus(root);
    fixtures::write_holdout_corpus(hold);

    PipelineConfig cfg = small_config(root, out);
    cfg.bench_input_root = hold.string();
    cfg.bench_quota = 2;
    cfg.bench_languages = {Language::Python, Language::Cpp};
    std::ostringstream log;
    int rc = run_pipeline("all", cfg, log);
    CHECK(rc == kExitOk);

    // dedup collapsed the planted identical pair inside r8_mix
    auto clusters = jsonl::read_records<jsonl::ClusterRecord>(
        (out / "dedup" / "clusters.jsonl").string(),
        [](const std::string& l) { return jsonl::parse_cluster(l); });
    bool planted = false;
    for (const auto& c : clusters) {
        for (const auto& mmb : c.members)
            if (mmb.find("dup_") != std::string::npos) planted = true;
    }
    CHECK(planted);

    // every surviving file appears in exactly one ordering record
    auto repos = jsonl::read_records<Repository>((out / "dedup" / "repos.jsonl").string(),
                                                 [](const std::string& l) {
                                                     return jsonl::parse_repository(l);
                                                 });
    auto orderings = jsonl::read_records<jsonl::OrderingRecord>(
        (out / "sample" / "ordering.jsonl").string(),
        [](const std::string& l) { return jsonl::parse_ordering(l); });
    REQUIRE(orderings.size() == repos.size());
    for (std::size_t i = 0; i < repos.size(); ++i) {
        std::multiset<std::string> have, want;
        for (const auto& f : repos[i].files) want.insert(f.rel_path);
        for (const auto& p : orderings[i].files) have.insert(p);
        CHECK(have == want);
    }

    // forge emitted sequences whose text reassembles (spot-check manifest)
    json fm = manifest(out / "forge");
    CHECK(fm["sequences"].get<int>() > 0);
    CHECK(fm["total_tokens"].get<long long>() > 0);
    int obj_total = 0;
    for (const auto& [k, v] : fm["objectives"].items()) obj_total += v.get<int>();
    CHECK(obj_total == fm["sequences"].get<int>());

    // token sidecar matches the jsonl token counts record by record
    auto seqs = jsonl::read_records<TrainingSequence>(
        (out / "forge" / "sequences.jsonl").string(),
        [](const std::string& l) { return jsonl::parse_training_sequence(l); });
    std::ifstream bin(out / "forge" / "tokens.bin", std::ios::binary);
    auto tokens = read_token_records(bin);
    REQUIRE(tokens.size() == seqs.size());

    // bench produced typed samples for both languages
    auto samples = jsonl::read_records<BenchmarkSample>(
        (out / "bench" / "benchmark.jsonl").string(),
        [](const std::string& l) { return parse_benchmark_sample(l); });
    CHECK_FALSE(samples.empty());
    std::set<Language> langs;
    for (const auto& s : samples) langs.insert(s.language);
    CHECK(langs == std::set<Language>{Language::Python, Language::Cpp});

    json top = json::parse(slurp(out / "manifest.json"));
    CHECK(top["command"] == "all");
    CHECK(top["stages"].size() == 5);  // clean..forge + bench

    // eval over echo predictions closes the loop
    std::ostringstream preds;
    for (const auto& s : samples)
        preds << to_json(Prediction{s.id, s.reference_middle}) << "\n";
    spit(out / "preds.jsonl", preds.str());
    cfg.predictions_file = (out / "preds.jsonl").string();
    run_eval(cfg, log);
    json report = json::parse(slurp(out / "eval" / "report.json"));
    CHECK(report["mean_em"].get<double>() == doctest::Approx(1.0));
    CHECK(report["mean_es"].get<double>() == doctest::Approx(1.0));
    CHECK(fs::exists(out / "eval" / "report.csv"));
}

TEST_CASE("unknown command and config errors map to exit codes") {
    std::ostringstream log;
    PipelineConfig cfg;
    CHECK(run_pipeline("explode", cfg, log) == kExitConfig);
    cfg.dedup.bands = 3;
    CHECK(run_pipeline("clean", cfg, log) == kExitConfig);
    PipelineConfig missing;
    missing.input_root = "/nonexistent/corpus";
    missing.output_root = (fs::temp_directory_path() / "cforge_tests" / "noout").string();
    CHECK(run_pipeline("clean", missing, log) == kExitMissingInput);
}

#ifdef CFORGE_BIN
namespace {

struct CliResult {
    int exit_code;
    std::string output;
};

CliResult run_cli(const std::string& args) {
    fs::path tmp = fs::temp_directory_path() / "cforge_tests" / "cli_out.txt";
    fs::create_directories(tmp.parent_path());
    std::string cmd = std::string(CFORGE_BIN) + " " + args + " > " + tmp.string() + " 2>&1";
    int raw = std::system(cmd.c_str());
    CliResult r;
    r.exit_code = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
    r.output = slurp(tmp);
    return r;
}

}  // namespace

TEST_CASE("cli wires config, env, and flags with the right precedence") {
    fs::path root = scratch("cli_in");
    fs::path out = scratch("cli_out");
    fixtures::write_fixture_corpus(root);

    CliResult help = run_cli("--help");
    CHECK(help.exit_code == 0);
    for (const char* sub : {"clean", "dedup", "sample", "forge", "bench", "eval", "all"})
        CHECK(help.output.find(sub) != std::string::npos);

    CHECK(run_cli("").exit_code == kExitConfig);         // subcommand required
    CHECK(run_cli("explode").exit_code == kExitConfig);  // unknown subcommand
    CHECK(run_cli("clean --input /nonexistent --output " + (out / "x").string()).exit_code ==
          kExitMissingInput);

    // config file sets the input; the flag overrides the file's output
    fs::path conf = out / "run.conf";
    spit(conf, "seed = 3\ninput_root = " + root.string() + "\noutput_root = " +
                   (out / "from_file").string() + "\nmax_context = 256\n");
    CliResult ran = run_cli("clean --config " + conf.string() + " --output " +
                            (out / "from_flag").string());
    CHECK(ran.exit_code == 0);
    CHECK(fs::exists(out / "from_flag" / "clean" / "repos.jsonl"));
    CHECK_FALSE(fs::exists(out / "from_file"));

    json m = json::parse(slurp(out / "from_flag" / "clean" / "manifest.json"));
    CHECK(m["config"]["seed"].get<int>() == 3);

    // environment slots between file and flags (system() inherits it)
    ::setenv("CFORGE_SEED", "7", 1);
    CliResult ran2 = run_cli("clean --config " + conf.string() + " --output " +
                             (out / "env_wins").string());
    CHECK(ran2.exit_code == 0);
    json m2 = json::parse(slurp(out / "env_wins" / "clean" / "manifest.json"));
    CHECK(m2["config"]["seed"].get<int>() == 7);

    CliResult ran3 = run_cli("clean --config " + conf.string() + " --seed 11 --output " +
                             (out / "flag_wins").string());
    ::unsetenv("CFORGE_SEED");
    CHECK(ran3.exit_code == 0);
    json m3 = json::parse(slurp(out / "flag_wins" / "clean" / "manifest.json"));
    CHECK(m3["config"]["seed"].get<int>() == 11);
}
#endif
