#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "cforge/dedup.hpp"
#include "cforge/filters.hpp"
#include "cforge/sequence.hpp"
#include "cforge/syntax.hpp"
#include "cforge/types.hpp"

namespace cforge {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitMissingInput = 3;
inline constexpr int kExitUnwritableOutput = 4;

struct PipelineError : std::runtime_error {
    int exit_code;
    PipelineError(int code, const std::string& message)
        : std::runtime_error(message), exit_code(code) {}
};

/// Every knob of every stage. Serialized into each run manifest, so a
/// manifest alone reproduces its run.
struct PipelineConfig {
    std::uint64_t seed = 0;
    std::size_t jobs = 1;
    std::size_t max_context = kDefaultMaxContext;
    std::string input_root;   // repo directory tree, or a .jsonl of Repository records
    std::string output_root = "out";
    bool strict_leakage = false;

    // clean
    std::string permissive_list_file;     // empty -> bundled list
    std::string sensitive_wordlist_file;  // empty -> no sensitive pruning
    double prune_fraction = 0.10;
    RepoScoreWeights score_weights;
    double sensitive_freq_threshold = 5.0;
    bool mask_names = false;
    FileFilterConfig file_filters;
    std::uint64_t parse_timeout_ms = 5000;
    double parse_max_error_fraction = 0.0;

    // dedup (seed field is ignored; the global seed feeds MinHash)
    NearDedupConfig dedup;

    // forge
    ObjectiveMix mix;
    SentinelSet sentinels;

    // bench
    std::string bench_input_root;
    std::vector<Language> bench_languages = {Language::Java, Language::Python,
                                             Language::Cpp, Language::JavaScript};
    std::size_t bench_quota = 0;  // 0 -> published per-language preset
    std::size_t context_budget = 0;
    std::string excluded_repos_file;

    // eval
    std::string benchmark_file;  // empty -> <output_root>/bench/benchmark.jsonl
    std::string predictions_file;
    std::string outcomes_file;
    std::size_t eval_k = 1;
};

/// Applies one "key = value" pair. Throws PipelineError(kExitConfig) on
/// an unknown key or unparseable value.
void apply_config_entry(PipelineConfig& cfg, std::string_view key, std::string_view value);

/// Commented key=value text ("# ..." and blank lines skipped).
PipelineConfig parse_config_text(std::string_view text);

/// Loads either key=value text or JSON (a bare config object, or a run
/// manifest whose "config" member is reused).
PipelineConfig load_config(const std::string& path);

/// CFORGE_<KEY> environment variables override the matching config key.
void apply_env_overrides(PipelineConfig& cfg);

/// Empty when the config is runnable; otherwise one message per problem.
std::vector<std::string> validate_config(const PipelineConfig& cfg);

std::string config_to_json(const PipelineConfig& cfg);
PipelineConfig config_from_json(std::string_view json_text);

struct RepoRawLicense {
    std::optional<std::string> declared;   // repo.json "license" field
    std::optional<std::string> file_text;  // root LICENSE*/COPYING* contents
};

struct IngestResult {
    std::vector<Repository> repos;   // sorted by repo_id
    std::vector<RepoRawLicense> licenses;  // parallel to repos
    std::vector<NaturalDoc> docs;    // in-repo docs in repo order, loose docs last
    std::vector<std::string> warnings;
};

/// Reads a corpus. A directory: each subdirectory is one repository
/// (optional repo.json metadata, LICENSE*/COPYING* consumed for license
/// detection, .md/.txt/.rst become natural-language docs). A .jsonl
/// file: one Repository record per line.
IngestResult ingest_corpus(const std::string& input_root);

// Stage runners. Each reads its inputs (the previous stage's files under
// cfg.output_root), writes its outputs plus a manifest, and streams
// progress and gate records to `log`. Throws PipelineError on failure.
void run_clean(const PipelineConfig& cfg, std::ostream& log);
void run_dedup(const PipelineConfig& cfg, std::ostream& log);
void run_sample(const PipelineConfig& cfg, std::ostream& log);
void run_forge(const PipelineConfig& cfg, std::ostream& log);
void run_bench(const PipelineConfig& cfg, std::ostream& log);
void run_eval(const PipelineConfig& cfg, std::ostream& log);

/// command in {clean, dedup, sample, forge, bench, eval, all}; returns a
/// process exit code. `all` composes clean through forge, then bench when
/// bench_input_root is set, then eval when predictions_file is set.
int run_pipeline(const std::string& command, const PipelineConfig& cfg, std::ostream& log);

}  // namespace cforge
