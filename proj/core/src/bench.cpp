#include "cforge/bench.hpp"

#include <algorithm>
#include <cstdio>
#include <stdexcept>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <variant>

#include <json.hpp>

#include "cforge/text.hpp"

namespace cforge {

namespace {

using nlohmann::json;

std::string language_name(Language lang) { return to_string(LanguageTag{lang, {}}); }

TypeQuotas spread_total(std::size_t total) {
    TypeQuotas q{};
    std::size_t base = total / q.size();
    std::size_t rem = total % q.size();
    for (std::size_t i = 0; i < q.size(); ++i) q[i] = base + (i < rem ? 1 : 0);
    return q;
}

struct Candidate {
    std::size_t repo = 0;
    std::size_t file = 0;
    CharRange node_range;
};

using TypePools = std::array<std::vector<Candidate>, kAllSpanTypes.size()>;

void mine_tree(const SyntaxNode& node, const SyntaxNode* parent, const SyntaxNode* prev,
               std::string_view text, Language lang, std::size_t repo_idx,
               std::size_t file_idx, TypePools& pools) {
    ClassifyContext ctx{parent, prev, text, lang};
    if (auto type = classify_node(node, ctx))
        pools[static_cast<std::size_t>(*type)].push_back({repo_idx, file_idx, node.char_range});
    const SyntaxNode* p = nullptr;
    for (const SyntaxNode& child : node.children) {
        mine_tree(child, &node, p, text, lang, repo_idx, file_idx, pools);
        p = &child;
    }
}

/// End drawn uniformly from the line ends inside the node, then a start
/// drawn uniformly from the codepoints before it; the newline stays out
/// of the span. A single-line node falls back to its full range.
CharRange line_bounded_subspan(std::string_view text, CharRange node, RandomStream& rng) {
    if (node.empty()) return node;
    std::vector<std::size_t> ends;
    for (std::size_t pos = node.begin + 1; pos <= node.end; ++pos)
        if (is_line_end(text, pos)) ends.push_back(pos);
    if (ends.empty()) return node;
    std::size_t end = ends[rng.index(ends.size())];
    std::vector<std::size_t> bounds =
        codepoint_index(text.substr(node.begin, end - node.begin));
    bounds.pop_back();  // drop the length sentinel; starts must precede end
    std::size_t start = node.begin + bounds[rng.index(bounds.size())];
    return {start, end};
}

/// Longest tail of `text` whose token count fits the budget, cut on a
/// codepoint boundary. Binary search assumes longer slices never count
/// fewer tokens; the trailing walk restores the contract if they do.
std::string_view tail_within(std::string_view text, std::size_t budget,
                             const Tokenizer& tokenizer) {
    if (tokenizer.count(text) <= budget) return text;
    std::vector<std::size_t> bounds = codepoint_index(text);
    std::size_t lo = 0, hi = bounds.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = lo + (hi - lo) / 2;
        if (tokenizer.count(text.substr(bounds[mid])) <= budget)
            hi = mid;
        else
            lo = mid;
    }
    std::size_t cut = hi;
    while (cut + 1 < bounds.size() && tokenizer.count(text.substr(bounds[cut])) > budget) ++cut;
    return text.substr(bounds[cut]);
}

/// Longest head of `text` whose token count fits the budget.
std::string_view head_within(std::string_view text, std::size_t budget,
                             const Tokenizer& tokenizer) {
    if (tokenizer.count(text) <= budget) return text;
    std::vector<std::size_t> bounds = codepoint_index(text);
    std::size_t lo = 0, hi = bounds.size() - 1;
    while (hi - lo > 1) {
        std::size_t mid = lo + (hi - lo) / 2;
        if (tokenizer.count(text.substr(0, bounds[mid])) <= budget)
            lo = mid;
        else
            hi = mid;
    }
    std::size_t cut = lo;
    while (cut > 0 && tokenizer.count(text.substr(0, bounds[cut])) > budget) --cut;
    return text.substr(0, bounds[cut]);
}

std::string sequence_id(std::size_t seq) {
    char buf[16];
    std::snprintf(buf, sizeof buf, "%05zu", seq);
    return buf;
}

MinHashSignature record_signature(const jsonl::SignatureRecord& rec,
                                  const NearDedupConfig& cfg) {
    if (rec.values.size() != kMinHashPermutations)
        throw std::invalid_argument("signature record for " + rec.file + " has " +
                                    std::to_string(rec.values.size()) + " values, need " +
                                    std::to_string(kMinHashPermutations));
    if (rec.shingle_width != cfg.shingle_width)
        throw std::invalid_argument("signature record for " + rec.file +
                                    " was built with shingle width " +
                                    std::to_string(rec.shingle_width) + ", config says " +
                                    std::to_string(cfg.shingle_width));
    MinHashSignature sig;
    std::copy(rec.values.begin(), rec.values.end(), sig.values.begin());
    sig.shingle_width = rec.shingle_width;
    sig.empty_input = rec.empty_input;
    return sig;
}

json parse_line(std::string_view line) {
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded())
        throw std::runtime_error("malformed JSON line: " + std::string(line.substr(0, 80)));
    return j;
}

}  // namespace

BenchmarkQuotas uniform_quotas(const std::vector<Language>& languages,
                               std::size_t per_type_quota) {
    BenchmarkQuotas quotas;
    for (Language lang : languages) {
        TypeQuotas q{};
        q.fill(per_type_quota);
        quotas[lang] = q;
    }
    return quotas;
}

BenchmarkQuotas preset_quotas() {
    BenchmarkQuotas quotas;
    quotas[Language::Cpp] = spread_total(4080);
    quotas[Language::Java] = spread_total(4080);
    quotas[Language::Python] = spread_total(3900);
    quotas[Language::JavaScript] = spread_total(4080);
    return quotas;
}

BenchmarkBuild build_benchmark(const std::vector<Repository>& repos,
                               const BenchmarkQuotas& quotas, const RandomStream& rng,
                               const std::set<std::string>& excluded_repo_ids,
                               const Tokenizer& tokenizer, std::size_t context_budget) {
    BenchmarkBuild out;
    std::map<Language, TypePools> pools;
    for (const auto& [lang, q] : quotas) {
        (void)q;
        pools[lang];
    }

    for (std::size_t ri = 0; ri < repos.size(); ++ri) {
        const Repository& repo = repos[ri];
        if (excluded_repo_ids.count(repo.repo_id) > 0) {
            ++out.skipped_excluded;
            continue;
        }
        for (std::size_t fi = 0; fi < repo.files.size(); ++fi) {
            const SourceFile& file = repo.files[fi];
            Language lang = file.language.lang;
            auto pit = pools.find(lang);
            if (pit == pools.end() || !parser_supported(lang)) continue;
            ParseOutcome outcome = parse_text(file.content, lang);
            if (std::holds_alternative<ParseFailure>(outcome)) {
                ++out.parse_failures;
                continue;
            }
            mine_tree(std::get<SyntaxNode>(outcome), nullptr, nullptr, file.content, lang,
                      ri, fi, pit->second);
        }
    }

    for (auto& [lang, type_pools] : pools) {
        const std::string lname = language_name(lang);
        const TypeQuotas& lang_quotas = quotas.at(lang);
        for (std::size_t ti = 0; ti < kAllSpanTypes.size(); ++ti) {
            std::size_t quota = lang_quotas[ti];
            if (quota == 0) continue;
            SpanType type = kAllSpanTypes[ti];
            const std::string pool_key = lname + "/" + to_string(type);
            std::vector<Candidate> pool = std::move(type_pools[ti]);
            if (pool.size() > quota) {
                RandomStream select = rng.derive("bench/select", pool_key);
                select.shuffle(pool);
                pool.resize(quota);
            } else if (pool.size() < quota) {
                out.warnings.push_back(pool_key + ": quota " + std::to_string(quota) +
                                       ", mined " + std::to_string(pool.size()));
            }

            bool body_type = type == SpanType::BodyTop || type == SpanType::BodyMid ||
                             type == SpanType::BodyBottom;
            struct Picked {
                Candidate cand;
                CharRange middle;
            };
            std::vector<Picked> picked;
            picked.reserve(pool.size());
            for (const Candidate& cand : pool) {
                const SourceFile& file = repos[cand.repo].files[cand.file];
                CharRange middle = cand.node_range;
                if (body_type) {
                    RandomStream span_rng = rng.derive(
                        "bench/span",
                        jsonl::file_id(file) + ":" + std::to_string(cand.node_range.begin));
                    middle = line_bounded_subspan(file.content, cand.node_range, span_rng);
                }
                picked.push_back({cand, middle});
            }
            std::sort(picked.begin(), picked.end(), [&](const Picked& a, const Picked& b) {
                const SourceFile& fa = repos[a.cand.repo].files[a.cand.file];
                const SourceFile& fb = repos[b.cand.repo].files[b.cand.file];
                return std::tie(fa.repo_id, fa.rel_path, a.middle.begin, a.middle.end,
                                a.cand.node_range.begin) <
                       std::tie(fb.repo_id, fb.rel_path, b.middle.begin, b.middle.end,
                                b.cand.node_range.begin);
            });

            std::size_t seq = 0;
            for (const Picked& p : picked) {
                const SourceFile& file = repos[p.cand.repo].files[p.cand.file];
                BenchmarkSample s;
                s.id = pool_key + "/" + sequence_id(seq++);
                s.language = lang;
                s.span_type = type;
                s.reference_middle = file.content.substr(p.middle.begin, p.middle.size());
                std::string_view prefix(file.content.data(), p.middle.begin);
                std::string_view suffix(file.content.data() + p.middle.end,
                                        file.content.size() - p.middle.end);
                if (context_budget > 0) {
                    prefix = tail_within(prefix, context_budget / 2, tokenizer);
                    suffix = head_within(suffix, context_budget / 2, tokenizer);
                }
                s.prefix_context = std::string(prefix);
                s.suffix_context = std::string(suffix);
                s.origin = {file.repo_id, file.rel_path, p.middle};
                out.samples.push_back(std::move(s));
            }
            out.type_counts[pool_key] = picked.size();
        }
    }
    return out;
}

BenchmarkBuild build_benchmark(const std::vector<Repository>& repos,
                               std::size_t per_type_quota,
                               const std::vector<Language>& languages,
                               const RandomStream& rng,
                               const std::set<std::string>& excluded_repo_ids,
                               const Tokenizer& tokenizer, std::size_t context_budget) {
    return build_benchmark(repos, uniform_quotas(languages, per_type_quota), rng,
                           excluded_repo_ids, tokenizer, context_budget);
}

LeakageReport leakage_check(const std::vector<BenchmarkSample>& samples,
                            const std::vector<Repository>& repos,
                            const std::vector<jsonl::SignatureRecord>& training,
                            const NearDedupConfig& cfg) {
    LeakageReport report;

    std::unordered_map<std::string, const SourceFile*> files_by_key;
    for (const Repository& repo : repos)
        for (const SourceFile& file : repo.files) files_by_key[jsonl::file_id(file)] = &file;

    std::map<std::string, std::vector<const BenchmarkSample*>> origins;
    for (const BenchmarkSample& s : samples)
        origins[jsonl::file_id(s.origin.repo_id, s.origin.rel_path)].push_back(&s);

    std::vector<MinHashSignature> training_sigs;
    training_sigs.reserve(training.size());
    for (const jsonl::SignatureRecord& rec : training)
        training_sigs.push_back(record_signature(rec, cfg));

    for (const auto& [key, group] : origins) {
        auto it = files_by_key.find(key);
        if (it == files_by_key.end()) {
            report.unresolved_origins.push_back(key);
            continue;
        }
        ++report.origin_files_checked;
        const std::string& content = it->second->content;
        MinHashSignature sig = minhash_signature(content, cfg.shingle_width, cfg.seed);
        std::vector<std::uint64_t> shingles;
        bool shingles_ready = false;

        double worst = 0.0;
        const std::string* worst_file = nullptr;
        for (std::size_t i = 0; i < training.size(); ++i) {
            double estimate = estimate_jaccard(sig, training_sigs[i]);
            if (estimate < kLeakageEstimateFloor) continue;
            double verdict = estimate;
            if (training[i].has_shingles) {
                if (!shingles_ready) {
                    shingles = shingle_hash_set(content, cfg.shingle_width);
                    shingles_ready = true;
                }
                verdict = exact_jaccard(shingles, training[i].shingles);
                ++report.pairs_verified;
            }
            if (verdict > cfg.threshold && verdict > worst) {
                worst = verdict;
                worst_file = &training[i].file;
            }
        }
        if (worst_file != nullptr)
            for (const BenchmarkSample* s : group)
                report.flags.push_back({s->id, key, *worst_file, worst});
    }

    std::sort(report.flags.begin(), report.flags.end(),
              [](const LeakageFlag& a, const LeakageFlag& b) {
                  return a.sample_id < b.sample_id;
              });
    return report;
}

std::vector<BenchmarkSample> apply_leakage_filter(std::vector<BenchmarkSample> samples,
                                                  const LeakageReport& report) {
    std::set<std::string> flagged;
    for (const LeakageFlag& flag : report.flags) flagged.insert(flag.sample_id);
    std::erase_if(samples,
                  [&](const BenchmarkSample& s) { return flagged.count(s.id) > 0; });
    return samples;
}

std::string to_json(const BenchmarkSample& s) {
    return json{{"id", s.id},
                {"language", language_name(s.language)},
                {"span_type", to_string(s.span_type)},
                {"prefix_context", s.prefix_context},
                {"suffix_context", s.suffix_context},
                {"reference_middle", s.reference_middle},
                {"origin",
                 json{{"repo_id", s.origin.repo_id},
                      {"rel_path", s.origin.rel_path},
                      {"char_range", json{{"begin", s.origin.char_range.begin},
                                          {"end", s.origin.char_range.end}}}}}}
        .dump();
}

BenchmarkSample parse_benchmark_sample(std::string_view line) {
    json j = parse_line(line);
    BenchmarkSample s;
    s.id = j.at("id").get<std::string>();
    s.language = language_tag_from_string(j.at("language").get<std::string>()).lang;
    s.span_type = span_type_from_string(j.at("span_type").get<std::string>());
    s.prefix_context = j.at("prefix_context").get<std::string>();
    s.suffix_context = j.at("suffix_context").get<std::string>();
    s.reference_middle = j.at("reference_middle").get<std::string>();
    const json& origin = j.at("origin");
    s.origin.repo_id = origin.at("repo_id").get<std::string>();
    s.origin.rel_path = origin.at("rel_path").get<std::string>();
    s.origin.char_range.begin = origin.at("char_range").at("begin").get<std::size_t>();
    s.origin.char_range.end = origin.at("char_range").at("end").get<std::size_t>();
    return s;
}

}  // namespace cforge
