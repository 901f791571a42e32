#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>
#include <unordered_map>
#include <variant>

#include <json.hpp>

#include "cforge/hash.hpp"
#include "cforge/metrics.hpp"
#include "cforge/syntax.hpp"
#include "cforge/text.hpp"

namespace cforge {

using nlohmann::json;

double pass_at_k(std::uint64_t n, std::uint64_t c, std::uint64_t k) {
    if (c > n) throw std::domain_error("pass_at_k: c > n");
    if (k < 1 || k > n) throw std::domain_error("pass_at_k: need 1 <= k <= n");
    if (c == 0) return 0.0;
    double prod = 1.0;
    for (std::uint64_t i = n - c + 1; i <= n; ++i) {
        prod *= 1.0 - static_cast<double>(k) / static_cast<double>(i);
    }
    return 1.0 - prod;
}

double mean_pass_at_k(const std::vector<PassOutcome>& outcomes, std::uint64_t k) {
    if (outcomes.empty()) throw std::domain_error("mean_pass_at_k: no outcomes");
    double sum = 0.0;
    for (const PassOutcome& o : outcomes) sum += pass_at_k(o.n, o.c, k);
    return sum / static_cast<double>(outcomes.size());
}

namespace {

std::string trim_trailing_ws(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    std::size_t i = 0;
    while (i <= text.size()) {
        std::size_t j = text.find('\n', i);
        bool last = j == std::string_view::npos;
        if (last) j = text.size();
        std::string_view line = text.substr(i, j - i);
        std::size_t end = line.find_last_not_of(" \t\r");
        out.append(line.substr(0, end == std::string_view::npos ? 0 : end + 1));
        if (!last) out.push_back('\n');
        i = j + 1;
        if (last) break;
    }
    return out;
}

}  // namespace

bool exact_match(std::string_view pred, std::string_view ref, EmNormalization norm) {
    if (norm == EmNormalization::Raw) return pred == ref;
    return trim_trailing_ws(pred) == trim_trailing_ws(ref);
}

double edit_similarity(std::string_view pred, std::string_view ref) {
    std::size_t la = count_codepoints(pred);
    std::size_t lb = count_codepoints(ref);
    std::size_t longest = std::max(la, lb);
    if (longest == 0) return 1.0;
    return 1.0 - static_cast<double>(levenshtein(pred, ref)) / static_cast<double>(longest);
}

// ---------------------------------------------------------------------- BLEU

namespace {

std::vector<std::string> bleu_tokens(std::string_view text) {
    std::vector<std::string> out;
    for (CodeToken& t : lex_code(text)) {
        if (t.kind != CodeToken::Kind::Comment) out.push_back(std::move(t.text));
    }
    return out;
}

using Gram = std::vector<std::string>;

std::map<Gram, std::size_t> gram_counts(const std::vector<std::string>& toks, std::size_t n) {
    std::map<Gram, std::size_t> counts;
    if (toks.size() < n) return counts;
    for (std::size_t i = 0; i + n <= toks.size(); ++i) {
        Gram g(toks.begin() + static_cast<long>(i), toks.begin() + static_cast<long>(i + n));
        ++counts[g];
    }
    return counts;
}

double brevity_penalty(std::size_t pred_len, std::size_t ref_len) {
    if (pred_len >= ref_len) return 1.0;
    if (pred_len == 0) return 0.0;
    return std::exp(1.0 - static_cast<double>(ref_len) / static_cast<double>(pred_len));
}

/// weight 1 per gram, or the supplied per-gram weight function.
template <typename WeightFn>
double weighted_bleu(const std::vector<std::string>& pred, const std::vector<std::string>& ref,
                     WeightFn weight) {
    if (pred.empty()) return ref.empty() ? 1.0 : 0.0;
    if (ref.empty()) return 0.0;
    double log_sum = 0.0;
    for (std::size_t n = 1; n <= 4; ++n) {
        std::map<Gram, std::size_t> pc = gram_counts(pred, n);
        std::map<Gram, std::size_t> rc = gram_counts(ref, n);
        double denom = 0.0;
        double numer = 0.0;
        for (const auto& [gram, count] : pc) {
            double w = weight(gram);
            denom += w * static_cast<double>(count);
            auto it = rc.find(gram);
            if (it != rc.end()) {
                numer += w * static_cast<double>(std::min(count, it->second));
            }
        }
        double p;
        if (denom == 0.0) {
            p = 1.0;  // pred shorter than n tokens: order vacuous
        } else if (numer == 0.0 && n > 1) {
            p = (numer + 1.0) / (denom + 1.0);  // add-one smoothing
        } else {
            p = numer / denom;
        }
        if (p == 0.0) return 0.0;  // unigram miss: no smoothing at order 1
        log_sum += 0.25 * std::log(p);
    }
    return brevity_penalty(pred.size(), ref.size()) * std::exp(log_sum);
}

}  // namespace

double bleu4(std::string_view pred, std::string_view ref) {
    return weighted_bleu(bleu_tokens(pred), bleu_tokens(ref), [](const Gram&) { return 1.0; });
}

// ------------------------------------------------------------------ CodeBLEU

namespace {

/// Preorder kind-sequence hash of the subtree truncated at `depth`.
std::uint64_t subtree_hash(const SyntaxNode& node, std::size_t depth) {
    std::uint64_t h = hash_bytes(node.kind);
    if (depth > 1) {
        for (const SyntaxNode& c : node.children) {
            h = hash_combine(h, subtree_hash(c, depth - 1));
        }
        h = hash_combine(h, node.children.size());
    }
    return h;
}

void collect_subtree_hashes(const SyntaxNode& node,
                            std::unordered_map<std::uint64_t, std::size_t>& out) {
    for (std::size_t d = 1; d <= 3; ++d) ++out[hash_combine(d, subtree_hash(node, d))];
    for (const SyntaxNode& c : node.children) collect_subtree_hashes(c, out);
}

std::optional<SyntaxNode> try_parse(std::string_view text, Language lang) {
    if (!parser_supported(lang)) return std::nullopt;
    ParseOutcome out = parse_text(text, lang);
    if (std::holds_alternative<ParseFailure>(out)) return std::nullopt;
    return std::move(std::get<SyntaxNode>(out));
}

}  // namespace

double code_bleu(std::string_view pred, std::string_view ref, Language language) {
    std::vector<std::string> pred_toks = bleu_tokens(pred);
    std::vector<std::string> ref_toks = bleu_tokens(ref);
    double plain = weighted_bleu(pred_toks, ref_toks, [](const Gram&) { return 1.0; });
    const std::set<std::string>& kws = language_keywords(language);
    double weighted = weighted_bleu(pred_toks, ref_toks, [&](const Gram& g) {
        for (const std::string& tok : g) {
            if (kws.count(tok) > 0) return 5.0;
        }
        return 1.0;
    });

    double syntax = 0.0;
    double dataflow = 0.0;
    std::optional<SyntaxNode> pred_tree = try_parse(pred, language);
    if (pred_tree) {
        std::optional<SyntaxNode> ref_tree = try_parse(ref, language);
        if (!ref_tree) {
            syntax = 1.0;  // vacuous: nothing required
        } else {
            std::unordered_map<std::uint64_t, std::size_t> ref_hashes;
            std::unordered_map<std::uint64_t, std::size_t> pred_hashes;
            collect_subtree_hashes(*ref_tree, ref_hashes);
            collect_subtree_hashes(*pred_tree, pred_hashes);
            std::size_t total = 0;
            std::size_t matched = 0;
            for (const auto& [h, count] : ref_hashes) {
                total += count;
                auto it = pred_hashes.find(h);
                if (it != pred_hashes.end()) matched += std::min(count, it->second);
            }
            syntax = total == 0 ? 1.0
                                : static_cast<double>(matched) / static_cast<double>(total);
        }
        std::vector<std::pair<std::string, std::string>> ref_edges = def_use_edges(ref, language);
        if (ref_edges.empty()) {
            dataflow = 1.0;
        } else {
            std::vector<std::pair<std::string, std::string>> pred_edges =
                def_use_edges(pred, language);
            std::size_t matched = 0;
            for (const auto& e : ref_edges) {
                if (std::binary_search(pred_edges.begin(), pred_edges.end(), e)) ++matched;
            }
            dataflow = static_cast<double>(matched) / static_cast<double>(ref_edges.size());
        }
    }
    return 0.25 * plain + 0.25 * weighted + 0.25 * syntax + 0.25 * dataflow;
}

// ---------------------------------------------------------------- aggregates

LengthRatio length_ratio(const std::vector<std::string>& preds,
                         const std::vector<std::string>& refs, const Tokenizer& tok) {
    if (preds.size() != refs.size() || refs.empty()) {
        throw std::domain_error("length_ratio: need equally many preds and refs, at least one");
    }
    LengthRatio r;
    for (const std::string& p : preds) r.pred_tokens += tok.count(p);
    for (const std::string& rf : refs) r.ref_tokens += tok.count(rf);
    if (r.ref_tokens == 0) throw std::domain_error("length_ratio: zero reference tokens");
    r.ratio = static_cast<double>(r.pred_tokens) / static_cast<double>(r.ref_tokens);
    return r;
}

std::string render_length_ratio(const LengthRatio& r) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f(%llu/%llu)", r.ratio,
                  static_cast<unsigned long long>(r.pred_tokens),
                  static_cast<unsigned long long>(r.ref_tokens));
    return buf;
}

std::string to_json(const Prediction& p) {
    return json{{"sample_id", p.sample_id}, {"completion", p.completion}}.dump();
}

Prediction parse_prediction(std::string_view line) {
    json j = json::parse(line);
    return {j.at("sample_id").get<std::string>(), j.at("completion").get<std::string>()};
}

std::string to_json(const PassOutcome& o) {
    return json{{"task_id", o.task_id}, {"n", o.n}, {"c", o.c}}.dump();
}

PassOutcome parse_pass_outcome(std::string_view line) {
    json j = json::parse(line);
    return {j.at("task_id").get<std::string>(), j.at("n").get<std::uint64_t>(),
            j.at("c").get<std::uint64_t>()};
}

EvalReport evaluate(const std::vector<EvalInput>& refs, const std::vector<Prediction>& preds,
                    const Tokenizer& tok, EmNormalization norm) {
    std::unordered_map<std::string, const std::string*> by_id;
    for (const Prediction& p : preds) by_id.emplace(p.sample_id, &p.completion);

    EvalReport report;
    std::vector<std::string> pred_texts;
    std::vector<std::string> ref_texts;
    static const std::string kEmpty;
    for (const EvalInput& ref : refs) {
        auto it = by_id.find(ref.sample_id);
        const std::string& completion = it == by_id.end() ? kEmpty : *it->second;
        if (it == by_id.end()) ++report.missing_predictions;

        SampleScore s;
        s.sample_id = ref.sample_id;
        s.em = exact_match(completion, ref.reference, norm);
        s.es = edit_similarity(completion, ref.reference);
        s.bleu4 = bleu4(completion, ref.reference);
        s.codebleu = code_bleu(completion, ref.reference, ref.language);
        s.pred_tokens = tok.count(completion);
        s.ref_tokens = tok.count(ref.reference);
        report.samples.push_back(std::move(s));

        pred_texts.push_back(completion);
        ref_texts.push_back(ref.reference);
    }
    double n = static_cast<double>(report.samples.size());
    if (n > 0) {
        for (const SampleScore& s : report.samples) {
            report.mean_em += s.em ? 1.0 : 0.0;
            report.mean_es += s.es;
            report.mean_bleu4 += s.bleu4;
            report.mean_codebleu += s.codebleu;
        }
        report.mean_em /= n;
        report.mean_es /= n;
        report.mean_bleu4 /= n;
        report.mean_codebleu /= n;
        report.length = length_ratio(pred_texts, ref_texts, tok);
    }
    return report;
}

std::string to_json(const EvalReport& r) {
    json samples = json::array();
    for (const SampleScore& s : r.samples) {
        samples.push_back({{"sample_id", s.sample_id},
                           {"em", s.em},
                           {"es", s.es},
                           {"bleu4", s.bleu4},
                           {"codebleu", s.codebleu},
                           {"pred_tokens", s.pred_tokens},
                           {"ref_tokens", s.ref_tokens}});
    }
    json j{{"samples", samples},
           {"mean_em", r.mean_em},
           {"mean_es", r.mean_es},
           {"mean_bleu4", r.mean_bleu4},
           {"mean_codebleu", r.mean_codebleu},
           {"length_ratio", render_length_ratio(r.length)},
           {"pred_tokens", r.length.pred_tokens},
           {"ref_tokens", r.length.ref_tokens},
           {"missing_predictions", r.missing_predictions}};
    if (r.pass_at_k_value) j["pass_at_k"] = *r.pass_at_k_value;
    return j.dump();
}

std::string eval_report_csv(const EvalReport& r) {
    std::string out = "sample_id,em,es,bleu4,codebleu,pred_tokens,ref_tokens\n";
    char buf[256];
    for (const SampleScore& s : r.samples) {
        std::snprintf(buf, sizeof buf, "%s,%d,%.6f,%.6f,%.6f,%llu,%llu\n", s.sample_id.c_str(),
                      s.em ? 1 : 0, s.es, s.bleu4, s.codebleu,
                      static_cast<unsigned long long>(s.pred_tokens),
                      static_cast<unsigned long long>(s.ref_tokens));
        out += buf;
    }
    return out;
}

}  // namespace cforge
