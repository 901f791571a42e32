#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "cforge/dedup.hpp"
#include "cforge/jsonl.hpp"
#include "cforge/rng.hpp"
#include "cforge/syntax.hpp"
#include "cforge/tokenizer.hpp"
#include "cforge/types.hpp"

namespace cforge {

struct SampleOrigin {
    std::string repo_id;
    std::string rel_path;
    CharRange char_range;  // slice of the origin file the reference occupies

    friend bool operator==(const SampleOrigin&, const SampleOrigin&) = default;
};

/// One fill-in-the-middle task. prefix_context + reference_middle +
/// suffix_context reassembles a contiguous slice of the origin file; the
/// slice is the whole file unless a context budget trimmed the ends.
struct BenchmarkSample {
    std::string id;  // "<language>/<span_type>/<seq>"
    Language language = Language::Other;
    SpanType span_type = SpanType::SingleLineStatement;
    std::string prefix_context;
    std::string suffix_context;
    std::string reference_middle;
    SampleOrigin origin;
};

using TypeQuotas = std::array<std::size_t, kAllSpanTypes.size()>;
using BenchmarkQuotas = std::map<Language, TypeQuotas>;

/// Same quota for every span type of every requested language.
BenchmarkQuotas uniform_quotas(const std::vector<Language>& languages,
                               std::size_t per_type_quota);

/// Published benchmark shape: 16,140 samples over four languages
/// (C++ 4080, Java 4080, Python 3900, JavaScript 4080), each total spread
/// as evenly as possible across the span types, remainder to the
/// earliest-declared types.
BenchmarkQuotas preset_quotas();

struct BenchmarkBuild {
    std::vector<BenchmarkSample> samples;  // ordered (language, span_type, id)
    std::map<std::string, std::size_t> type_counts;  // "<language>/<span_type>" -> emitted
    std::vector<std::string> warnings;  // one line per unmet quota
    std::size_t skipped_excluded = 0;   // repos dropped by the exclusion list
    std::size_t parse_failures = 0;     // files skipped as unparseable
};

/// Mines typed middles from held-out repos. Every node classify_node
/// labels is a candidate; quotas pick uniformly without replacement.
/// Body-position references are line-bounded sub-spans of the statement;
/// every other type references the full node text. A short pool emits
/// what exists and records a warning. context_budget 0 keeps whole-file
/// contexts; otherwise each side keeps at most budget/2 tokens (prefix
/// tail, suffix head), cut on codepoint boundaries.
BenchmarkBuild build_benchmark(const std::vector<Repository>& repos,
                               const BenchmarkQuotas& quotas, const RandomStream& rng,
                               const std::set<std::string>& excluded_repo_ids,
                               const Tokenizer& tokenizer, std::size_t context_budget = 0);

/// Convenience form: one uniform per-type quota over `languages`.
BenchmarkBuild build_benchmark(const std::vector<Repository>& repos,
                               std::size_t per_type_quota,
                               const std::vector<Language>& languages,
                               const RandomStream& rng,
                               const std::set<std::string>& excluded_repo_ids,
                               const Tokenizer& tokenizer, std::size_t context_budget = 0);

/// Estimates below this floor skip exact verification. Far enough under
/// the link threshold that a truly leaking pair cannot estimate past it.
inline constexpr double kLeakageEstimateFloor = 0.7;

struct LeakageFlag {
    std::string sample_id;
    std::string origin_file;    // file_id of the benchmark origin
    std::string training_file;  // worst-offending training file
    double jaccard = 0.0;       // exact when the record stored shingles
};

struct LeakageReport {
    std::vector<LeakageFlag> flags;  // one per flagged sample, id order
    std::size_t origin_files_checked = 0;
    std::size_t pairs_verified = 0;  // exact-Jaccard computations
    std::vector<std::string> unresolved_origins;  // origins missing from `repos`
};

/// Flags every sample whose origin file exceeds cfg.threshold Jaccard
/// with some training file. cfg must carry the shingle_width and seed the
/// training signatures were built with; records without stored shingles
/// are judged on the signature estimate alone.
LeakageReport leakage_check(const std::vector<BenchmarkSample>& samples,
                            const std::vector<Repository>& repos,
                            const std::vector<jsonl::SignatureRecord>& training,
                            const NearDedupConfig& cfg = {});

/// Drops every flagged sample, preserving order.
std::vector<BenchmarkSample> apply_leakage_filter(std::vector<BenchmarkSample> samples,
                                                  const LeakageReport& report);

std::string to_json(const BenchmarkSample& s);
BenchmarkSample parse_benchmark_sample(std::string_view line);

}  // namespace cforge
