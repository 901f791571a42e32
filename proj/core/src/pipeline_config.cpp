#include <algorithm>
#include <cctype>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cforge/pipeline.hpp"

namespace cforge {

namespace {

using nlohmann::json;

std::string trim(std::string_view s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return std::string(s.substr(b, e - b));
}

std::string lower(std::string s) {
    for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return s;
}

[[noreturn]] void bad_value(std::string_view key, std::string_view value,
                            const char* expected) {
    throw PipelineError(kExitConfig, "config: key '" + std::string(key) + "' expects " +
                                         expected + ", got '" + std::string(value) + "'");
}

std::uint64_t parse_u64(std::string_view key, std::string_view value) {
    std::string v = trim(value);
    try {
        std::size_t used = 0;
        unsigned long long n = std::stoull(v, &used);
        if (used != v.size()) bad_value(key, value, "an unsigned integer");
        return n;
    } catch (const PipelineError&) {
        throw;
    } catch (...) {
        bad_value(key, value, "an unsigned integer");
    }
}

double parse_double(std::string_view key, std::string_view value) {
    std::string v = trim(value);
    try {
        std::size_t used = 0;
        double d = std::stod(v, &used);
        if (used != v.size()) bad_value(key, value, "a number");
        return d;
    } catch (const PipelineError&) {
        throw;
    } catch (...) {
        bad_value(key, value, "a number");
    }
}

bool parse_bool(std::string_view key, std::string_view value) {
    std::string v = lower(trim(value));
    if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
    if (v == "false" || v == "0" || v == "no" || v == "off") return false;
    bad_value(key, value, "a boolean");
}

std::vector<Language> parse_languages(std::string_view key, std::string_view value) {
    constexpr Language kKnown[] = {Language::Java,       Language::Python,
                                   Language::Cpp,        Language::JavaScript,
                                   Language::TypeScript, Language::CSharp};
    std::vector<Language> out;
    std::string item;
    std::stringstream ss{std::string(value)};
    while (std::getline(ss, item, ',')) {
        std::string name = lower(trim(item));
        if (name.empty()) continue;
        bool found = false;
        for (Language lang : kKnown) {
            if (lower(to_string(LanguageTag{lang, {}})) == name) {
                out.push_back(lang);
                found = true;
                break;
            }
        }
        if (!found) bad_value(key, value, "known language names");
    }
    if (out.empty()) bad_value(key, value, "a comma-separated language list");
    return out;
}

std::string languages_to_string(const std::vector<Language>& langs) {
    std::string out;
    for (Language l : langs) {
        if (!out.empty()) out += ",";
        out += to_string(LanguageTag{l, {}});
    }
    return out;
}

// Key order here is the order config_to_json emits and the order env
// overrides are applied in.
const std::vector<std::string>& config_keys() {
    static const std::vector<std::string> keys = {
        "seed", "jobs", "max_context", "input_root", "output_root", "strict_leakage",
        "permissive_list_file", "sensitive_wordlist_file", "prune_fraction",
        "score_weight_stars", "score_weight_commits", "score_weight_tests",
        "sensitive_freq_threshold", "mask_names", "max_line_chars", "max_lines",
        "max_bytes", "max_control_fraction", "parse_timeout_ms",
        "parse_max_error_fraction", "dedup_threshold", "shingle_width", "lsh_bands",
        "lsh_rows", "code_sfim", "code_fim", "code_ntp", "nl_fim", "nl_ntp", "fim_psm",
        "sfim_psm", "sentinel_pre", "sentinel_suf", "sentinel_mid", "sentinel_eos",
        "bench_input_root", "bench_languages", "bench_quota", "context_budget",
        "excluded_repos_file", "benchmark_file", "predictions_file", "outcomes_file",
        "eval_k",
    };
    return keys;
}

}  // namespace

void apply_config_entry(PipelineConfig& cfg, std::string_view key, std::string_view value) {
    std::string k = trim(key);
    std::string v = trim(value);
    auto as_size = [&] { return static_cast<std::size_t>(parse_u64(k, v)); };

    if (k == "seed") cfg.seed = parse_u64(k, v);
    else if (k == "jobs") cfg.jobs = as_size();
    else if (k == "max_context") cfg.max_context = as_size();
    else if (k == "input_root") cfg.input_root = v;
    else if (k == "output_root") cfg.output_root = v;
    else if (k == "strict_leakage") cfg.strict_leakage = parse_bool(k, v);
    else if (k == "permissive_list_file") cfg.permissive_list_file = v;
    else if (k == "sensitive_wordlist_file") cfg.sensitive_wordlist_file = v;
    else if (k == "prune_fraction") cfg.prune_fraction = parse_double(k, v);
    else if (k == "score_weight_stars") cfg.score_weights.stars = parse_double(k, v);
    else if (k == "score_weight_commits") cfg.score_weights.commits = parse_double(k, v);
    else if (k == "score_weight_tests") cfg.score_weights.test_files = parse_double(k, v);
    else if (k == "sensitive_freq_threshold") cfg.sensitive_freq_threshold = parse_double(k, v);
    else if (k == "mask_names") cfg.mask_names = parse_bool(k, v);
    else if (k == "max_line_chars") cfg.file_filters.max_line_chars = as_size();
    else if (k == "max_lines") cfg.file_filters.max_lines = as_size();
    else if (k == "max_bytes") cfg.file_filters.max_bytes = as_size();
    else if (k == "max_control_fraction") cfg.file_filters.max_control_fraction = parse_double(k, v);
    else if (k == "parse_timeout_ms") cfg.parse_timeout_ms = parse_u64(k, v);
    else if (k == "parse_max_error_fraction") cfg.parse_max_error_fraction = parse_double(k, v);
    else if (k == "dedup_threshold") cfg.dedup.threshold = parse_double(k, v);
    else if (k == "shingle_width") cfg.dedup.shingle_width = as_size();
    else if (k == "lsh_bands") cfg.dedup.bands = as_size();
    else if (k == "lsh_rows") cfg.dedup.rows = as_size();
    else if (k == "code_sfim") cfg.mix.code_sfim = parse_double(k, v);
    else if (k == "code_fim") cfg.mix.code_fim = parse_double(k, v);
    else if (k == "code_ntp") cfg.mix.code_ntp = parse_double(k, v);
    else if (k == "nl_fim") cfg.mix.nl_fim = parse_double(k, v);
    else if (k == "nl_ntp") cfg.mix.nl_ntp = parse_double(k, v);
    else if (k == "fim_psm") cfg.mix.fim_psm = parse_double(k, v);
    else if (k == "sfim_psm") cfg.mix.sfim_psm = parse_double(k, v);
    else if (k == "sentinel_pre") cfg.sentinels.pre = v;
    else if (k == "sentinel_suf") cfg.sentinels.suf = v;
    else if (k == "sentinel_mid") cfg.sentinels.mid = v;
    else if (k == "sentinel_eos") cfg.sentinels.eos = v;
    else if (k == "bench_input_root") cfg.bench_input_root = v;
    else if (k == "bench_languages") cfg.bench_languages = parse_languages(k, v);
    else if (k == "bench_quota") cfg.bench_quota = as_size();
    else if (k == "context_budget") cfg.context_budget = as_size();
    else if (k == "excluded_repos_file") cfg.excluded_repos_file = v;
    else if (k == "benchmark_file") cfg.benchmark_file = v;
    else if (k == "predictions_file") cfg.predictions_file = v;
    else if (k == "outcomes_file") cfg.outcomes_file = v;
    else if (k == "eval_k") cfg.eval_k = as_size();
    else throw PipelineError(kExitConfig, "config: unknown key '" + k + "'");
}

PipelineConfig parse_config_text(std::string_view text) {
    PipelineConfig cfg;
    std::size_t line_no = 0;
    std::string line;
    std::stringstream ss{std::string(text)};
    while (std::getline(ss, line)) {
        ++line_no;
        std::string t = trim(line);
        if (t.empty() || t[0] == '#') continue;
        std::size_t eq = t.find('=');
        if (eq == std::string::npos) {
            throw PipelineError(kExitConfig, "config line " + std::to_string(line_no) +
                                                 ": expected 'key = value', got '" + t + "'");
        }
        apply_config_entry(cfg, t.substr(0, eq), t.substr(eq + 1));
    }
    return cfg;
}

std::string config_to_json(const PipelineConfig& cfg) {
    json j;
    j["seed"] = cfg.seed;
    j["jobs"] = cfg.jobs;
    j["max_context"] = cfg.max_context;
    j["input_root"] = cfg.input_root;
    j["output_root"] = cfg.output_root;
    j["strict_leakage"] = cfg.strict_leakage;
    j["permissive_list_file"] = cfg.permissive_list_file;
    j["sensitive_wordlist_file"] = cfg.sensitive_wordlist_file;
    j["prune_fraction"] = cfg.prune_fraction;
    j["score_weight_stars"] = cfg.score_weights.stars;
    j["score_weight_commits"] = cfg.score_weights.commits;
    j["score_weight_tests"] = cfg.score_weights.test_files;
    j["sensitive_freq_threshold"] = cfg.sensitive_freq_threshold;
    j["mask_names"] = cfg.mask_names;
    j["max_line_chars"] = cfg.file_filters.max_line_chars;
    j["max_lines"] = cfg.file_filters.max_lines;
    j["max_bytes"] = cfg.file_filters.max_bytes;
    j["max_control_fraction"] = cfg.file_filters.max_control_fraction;
    j["parse_timeout_ms"] = cfg.parse_timeout_ms;
    j["parse_max_error_fraction"] = cfg.parse_max_error_fraction;
    j["dedup_threshold"] = cfg.dedup.threshold;
    j["shingle_width"] = cfg.dedup.shingle_width;
    j["lsh_bands"] = cfg.dedup.bands;
    j["lsh_rows"] = cfg.dedup.rows;
    j["code_sfim"] = cfg.mix.code_sfim;
    j["code_fim"] = cfg.mix.code_fim;
    j["code_ntp"] = cfg.mix.code_ntp;
    j["nl_fim"] = cfg.mix.nl_fim;
    j["nl_ntp"] = cfg.mix.nl_ntp;
    j["fim_psm"] = cfg.mix.fim_psm;
    j["sfim_psm"] = cfg.mix.sfim_psm;
    j["sentinel_pre"] = cfg.sentinels.pre;
    j["sentinel_suf"] = cfg.sentinels.suf;
    j["sentinel_mid"] = cfg.sentinels.mid;
    j["sentinel_eos"] = cfg.sentinels.eos;
    j["bench_input_root"] = cfg.bench_input_root;
    j["bench_languages"] = languages_to_string(cfg.bench_languages);
    j["bench_quota"] = cfg.bench_quota;
    j["context_budget"] = cfg.context_budget;
    j["excluded_repos_file"] = cfg.excluded_repos_file;
    j["benchmark_file"] = cfg.benchmark_file;
    j["predictions_file"] = cfg.predictions_file;
    j["outcomes_file"] = cfg.outcomes_file;
    j["eval_k"] = cfg.eval_k;
    return j.dump();
}

PipelineConfig config_from_json(std::string_view json_text) {
    json j = json::parse(json_text, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
        throw PipelineError(kExitConfig, "config: malformed JSON config");
    }
    PipelineConfig cfg;
    for (const auto& [key, value] : j.items()) {
        std::string text;
        if (value.is_string()) text = value.get<std::string>();
        else if (value.is_boolean()) text = value.get<bool>() ? "true" : "false";
        else text = value.dump();
        apply_config_entry(cfg, key, text);
    }
    return cfg;
}

PipelineConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PipelineError(kExitMissingInput, "config file not found: " + path);
    std::stringstream buf;
    buf << in.rdbuf();
    std::string text = buf.str();

    std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        json j = json::parse(text, nullptr, false);
        if (j.is_discarded()) {
            throw PipelineError(kExitConfig, "config: malformed JSON in " + path);
        }
        // A run manifest embeds its config; a bare object is the config.
        if (j.contains("config") && j["config"].is_object()) {
            return config_from_json(j["config"].dump());
        }
        return config_from_json(text);
    }
    return parse_config_text(text);
}

void apply_env_overrides(PipelineConfig& cfg) {
    for (const std::string& key : config_keys()) {
        std::string env_name = "CFORGE_";
        for (char c : key) {
            env_name += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
        }
        const char* value = std::getenv(env_name.c_str());
        if (value != nullptr) apply_config_entry(cfg, key, value);
    }
}

std::vector<std::string> validate_config(const PipelineConfig& cfg) {
    std::vector<std::string> errors;
    auto check = [&](bool ok, const std::string& msg) {
        if (!ok) errors.push_back(msg);
    };

    check(cfg.jobs >= 1, "jobs must be at least 1");
    check(cfg.prune_fraction >= 0.0 && cfg.prune_fraction < 1.0,
          "prune_fraction must lie in [0, 1)");
    check(cfg.sensitive_freq_threshold > 0.0, "sensitive_freq_threshold must be positive");
    check(cfg.parse_max_error_fraction >= 0.0 && cfg.parse_max_error_fraction <= 1.0,
          "parse_max_error_fraction must lie in [0, 1]");
    check(cfg.dedup.threshold > 0.0 && cfg.dedup.threshold <= 1.0,
          "dedup_threshold must lie in (0, 1]");
    check(cfg.dedup.shingle_width >= 1, "shingle_width must be at least 1");
    check(cfg.dedup.bands * cfg.dedup.rows == kMinHashPermutations,
          "lsh_bands * lsh_rows must equal " + std::to_string(kMinHashPermutations));
    check(cfg.eval_k >= 1, "eval_k must be at least 1");

    try {
        cfg.mix.validate();
    } catch (const std::exception& e) {
        errors.push_back(e.what());
    }
    std::size_t overhead = 0;
    try {
        cfg.sentinels.validate();
        // Worst-case sentinel cost under the shipped byte tokenizer.
        overhead = cfg.sentinels.pre.size() + cfg.sentinels.suf.size() +
                   cfg.sentinels.mid.size() + cfg.sentinels.eos.size();
    } catch (const std::exception& e) {
        errors.push_back(e.what());
    }
    check(cfg.max_context >= 16 + overhead,
          "max_context must be at least " + std::to_string(16 + overhead) +
              " (16 plus sentinel overhead)");

    check(!cfg.bench_languages.empty(), "bench_languages must not be empty");
    for (Language lang : cfg.bench_languages) {
        check(parser_supported(lang), "bench language " + to_string(LanguageTag{lang, {}}) +
                                          " has no parser");
    }
    return errors;
}

}  // namespace cforge
