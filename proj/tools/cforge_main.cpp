#include <iostream>
#include <string>
#include <string_view>

#include <CLI11.hpp>

#include "cforge/pipeline.hpp"

// Precedence: built-in defaults < config file < CFORGE_* environment
// < command-line flags. The config file is loaded before CLI11 parses
// so that flags land on top of it.
int main(int argc, char** argv) {
    std::string config_path;
    for (int i = 1; i < argc; ++i) {
        std::string_view arg = argv[i];
        if ((arg == "--config" || arg == "-c") && i + 1 < argc) {
            config_path = argv[i + 1];
        } else if (arg.rfind("--config=", 0) == 0) {
            config_path = std::string(arg.substr(9));
        }
    }

    cforge::PipelineConfig cfg;
    try {
        if (!config_path.empty()) cfg = cforge::load_config(config_path);
        cforge::apply_env_overrides(cfg);
    } catch (const cforge::PipelineError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code;
    }

    CLI::App app{"syntax-aware corpus pipeline and evaluation toolkit"};
    app.require_subcommand(1);

    std::string config_sink;  // consumed in the pre-scan above
    app.add_option("-c,--config", config_sink,
                   "config file: 'key = value' lines, or a JSON object / run manifest");
    app.add_option("--seed", cfg.seed, "global random seed");
    app.add_option("-j,--jobs", cfg.jobs, "worker threads");
    app.add_option("--max-context", cfg.max_context, "token budget per training sequence");
    app.add_option("--input", cfg.input_root, "corpus root: repo directory tree or .jsonl file");
    app.add_option("--output", cfg.output_root, "output tree root");
    app.add_option("--bench-input", cfg.bench_input_root, "held-out corpus for benchmark mining");
    app.add_option("--benchmark", cfg.benchmark_file, "benchmark .jsonl to evaluate against");
    app.add_option("--predictions", cfg.predictions_file, "model completions .jsonl");
    app.add_option("--outcomes", cfg.outcomes_file, "pass@k outcome records .jsonl");
    app.add_option("-k,--k", cfg.eval_k, "k for pass@k");
    app.add_flag("--strict-leakage,!--no-strict-leakage", cfg.strict_leakage,
                 "drop benchmark samples that overlap training survivors");

    const char* stages[][2] = {
        {"clean", "ingest, license-gate, filter, parse-gate, and mask the corpus"},
        {"dedup", "drop exact and near duplicate files"},
        {"sample", "draw a file ordering strategy per repository"},
        {"forge", "chunk and serialize training sequences"},
        {"bench", "mine a typed completion benchmark from held-out repos"},
        {"eval", "score predictions against a benchmark"},
        {"all", "run every stage in order"},
    };
    for (const auto& s : stages) app.add_subcommand(s[0], s[1])->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : cforge::kExitConfig;
    }

    const std::string command = app.get_subcommands().front()->get_name();
    return cforge::run_pipeline(command, cfg, std::cerr);
}
