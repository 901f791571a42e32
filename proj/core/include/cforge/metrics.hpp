#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cforge/tokenizer.hpp"
#include "cforge/types.hpp"

namespace cforge {

/// 1 - prod_{i=n-c+1..n} (1 - k/i). Exact 0 for c=0, exact 1 for c=n.
/// Throws std::domain_error unless 0 <= c <= n and 1 <= k <= n.
double pass_at_k(std::uint64_t n, std::uint64_t c, std::uint64_t k);

enum class EmNormalization {
    TrimTrailingWs,  // strip trailing spaces/tabs/CR from every line
    Raw,
};

bool exact_match(std::string_view pred, std::string_view ref,
                 EmNormalization norm = EmNormalization::TrimTrailingWs);

/// 1 - Levenshtein(pred, ref) / max(|pred|, |ref|), codepoint-level;
/// 1.0 when both are empty.
double edit_similarity(std::string_view pred, std::string_view ref);

/// Sentence-level BLEU, uniform weights over 1..4-gram precisions,
/// brevity penalty, add-one smoothing on zero numerators of order > 1.
/// Tokens come from the code lexer (comments excluded). Empty pred -> 0
/// unless ref is empty too (-> 1).
double bleu4(std::string_view pred, std::string_view ref);

/// 0.25*BLEU + 0.25*keyword-weighted BLEU (n-grams containing a keyword
/// weigh 5x) + 0.25*syntax subtree match (ref subtrees of depth <= 3
/// found in pred, kind-sequence hashing) + 0.25*dataflow match
/// (canonicalized def-use pairs). An unparseable pred zeroes the syntax
/// and dataflow components only.
double code_bleu(std::string_view pred, std::string_view ref, Language language);

struct LengthRatio {
    double ratio = 0.0;
    std::uint64_t pred_tokens = 0;
    std::uint64_t ref_tokens = 0;
};

/// Sum-of-tokens ratio; throws std::domain_error when the refs tokenize
/// to zero tokens total.
LengthRatio length_ratio(const std::vector<std::string>& preds,
                         const std::vector<std::string>& refs, const Tokenizer& tok);

/// "%.2f(pred/ref)", e.g. "2.14(340/159)".
std::string render_length_ratio(const LengthRatio& r);

struct SampleScore {
    std::string sample_id;
    bool em = false;
    double es = 0.0;
    double bleu4 = 0.0;
    double codebleu = 0.0;
    std::uint64_t pred_tokens = 0;
    std::uint64_t ref_tokens = 0;
};

struct EvalInput {
    std::string sample_id;
    std::string reference;
    Language language = Language::Other;
};

struct Prediction {
    std::string sample_id;
    std::string completion;
};

std::string to_json(const Prediction& p);
Prediction parse_prediction(std::string_view line);

/// Pass@k outcome for one task: n generated, c passed.
struct PassOutcome {
    std::string task_id;
    std::uint64_t n = 0;
    std::uint64_t c = 0;
};

std::string to_json(const PassOutcome& o);
PassOutcome parse_pass_outcome(std::string_view line);

double mean_pass_at_k(const std::vector<PassOutcome>& outcomes, std::uint64_t k);

struct EvalReport {
    std::vector<SampleScore> samples;
    double mean_em = 0.0;
    double mean_es = 0.0;
    double mean_bleu4 = 0.0;
    double mean_codebleu = 0.0;
    LengthRatio length;
    std::optional<double> pass_at_k_value;
    std::uint64_t missing_predictions = 0;  // scored against ""
};

/// Scores predictions against references, pairing on sample_id. A
/// reference without a prediction scores against the empty string.
EvalReport evaluate(const std::vector<EvalInput>& refs, const std::vector<Prediction>& preds,
                    const Tokenizer& tok,
                    EmNormalization norm = EmNormalization::TrimTrailingWs);

std::string to_json(const EvalReport& r);

/// Header + one row per sample.
std::string eval_report_csv(const EvalReport& r);

}  // namespace cforge
