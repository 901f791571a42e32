#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>
#include <variant>

#include <json.hpp>

#include "cforge/bench.hpp"
#include "cforge/chunk.hpp"
#include "cforge/dedup.hpp"
#include "cforge/filters.hpp"
#include "cforge/hash.hpp"
#include "cforge/jsonl.hpp"
#include "cforge/license.hpp"
#include "cforge/metrics.hpp"
#include "cforge/pii.hpp"
#include "cforge/pipeline.hpp"
#include "cforge/sampler.hpp"
#include "cforge/sequence.hpp"

namespace cforge {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// ---------------------------------------------------------------- plumbing

std::string read_file_or_die(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw PipelineError(kExitMissingInput, "cannot read " + path.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void ensure_dir(const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec && !fs::is_directory(dir)) {
        throw PipelineError(kExitUnwritableOutput,
                            "cannot create directory " + dir.string() + ": " + ec.message());
    }
}

void write_file_or_die(const fs::path& path, std::string_view content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw PipelineError(kExitUnwritableOutput, "cannot write " + path.string());
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    out.flush();
    if (!out) throw PipelineError(kExitUnwritableOutput, "write failed: " + path.string());
}

void write_lines_or_die(const fs::path& path, const std::vector<std::string>& lines) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw PipelineError(kExitUnwritableOutput, "cannot write " + path.string());
    for (const std::string& line : lines) out << line << '\n';
    out.flush();
    if (!out) throw PipelineError(kExitUnwritableOutput, "write failed: " + path.string());
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

std::string file_digest(const fs::path& path) {
    return hex64(hash_bytes(read_file_or_die(path)));
}

fs::path require_input(const fs::path& path, const char* produced_by) {
    if (!fs::exists(path)) {
        throw PipelineError(kExitMissingInput,
                            "missing " + path.string() + " (run '" + produced_by + "' first)");
    }
    return path;
}

void write_manifest(const fs::path& dir, json j) {
    write_file_or_die(dir / "manifest.json", j.dump(2) + "\n");
}

// output_root is self-referential (the manifest lives inside it), so
// embedding it would make otherwise identical runs into different roots
// produce different trees.
json manifest_config(const PipelineConfig& cfg) {
    json j = json::parse(config_to_json(cfg));
    j.erase("output_root");
    return j;
}

// First worker exception wins; remaining items are abandoned.
template <typename Fn>
void parallel_for(std::size_t n, std::size_t jobs, Fn&& fn) {
    if (n == 0) return;
    std::size_t workers = std::min(std::max<std::size_t>(jobs, 1), n);
    if (workers == 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::atomic<std::size_t> next{0};
    std::atomic<bool> bail{false};
    std::mutex mu;
    std::exception_ptr error;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            while (!bail.load(std::memory_order_relaxed)) {
                std::size_t i = next.fetch_add(1);
                if (i >= n) break;
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard<std::mutex> lock(mu);
                    if (!error) error = std::current_exception();
                    bail.store(true);
                }
            }
        });
    }
    for (std::thread& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

std::uint64_t corpus_digest(const IngestResult& in) {
    std::uint64_t h = 0x9e3779b97f4a7c15ull;
    for (std::size_t i = 0; i < in.repos.size(); ++i) {
        const Repository& r = in.repos[i];
        h = hash_combine(h, hash_bytes(r.repo_id));
        h = hash_combine(h, hash_bytes(r.owner));
        h = hash_combine(h, splitmix64(r.stars));
        h = hash_combine(h, splitmix64(r.commit_count));
        const RepoRawLicense& lic = in.licenses[i];
        h = hash_combine(h, hash_bytes(lic.declared.value_or("")));
        h = hash_combine(h, hash_bytes(lic.file_text.value_or("")));
        for (const SourceFile& f : r.files) {
            h = hash_combine(h, hash_bytes(f.rel_path));
            h = hash_combine(h, hash_bytes(f.content));
        }
    }
    for (const NaturalDoc& d : in.docs) {
        h = hash_combine(h, hash_bytes(d.doc_id));
        h = hash_combine(h, hash_bytes(d.content));
    }
    return h;
}

// ---------------------------------------------------------------- ingest

bool has_hidden_component(const fs::path& rel) {
    for (const fs::path& part : rel) {
        std::string s = part.string();
        if (!s.empty() && s[0] == '.') return true;
    }
    return false;
}

bool is_doc_extension(const fs::path& p) {
    std::string ext = p.extension().string();
    for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return ext == ".md" || ext == ".txt" || ext == ".rst";
}

bool is_license_filename(const std::string& name) {
    std::string upper = name;
    for (char& c : upper) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return upper.rfind("LICENSE", 0) == 0 || upper.rfind("COPYING", 0) == 0;
}

bool path_marks_test_file(const std::string& rel_path) {
    std::string low = rel_path;
    for (char& c : low) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    std::size_t start = 0;
    while (start <= low.size()) {
        std::size_t slash = low.find('/', start);
        std::string_view seg(low.data() + start,
                             (slash == std::string::npos ? low.size() : slash) - start);
        if (seg.find("test") != std::string_view::npos) return true;
        if (slash == std::string::npos) break;
        start = slash + 1;
    }
    return false;
}

struct RepoIngest {
    Repository repo;
    RepoRawLicense license;
    std::vector<NaturalDoc> docs;
};

RepoIngest ingest_repo_dir(const fs::path& dir, const std::string& repo_id,
                           std::vector<std::string>& warnings) {
    RepoIngest out;
    out.repo.repo_id = repo_id;

    std::vector<fs::path> rels;
    for (auto it = fs::recursive_directory_iterator(dir); it != fs::recursive_directory_iterator();
         ++it) {
        if (!it->is_regular_file()) continue;
        fs::path rel = fs::relative(it->path(), dir);
        if (has_hidden_component(rel)) continue;
        rels.push_back(rel);
    }
    std::sort(rels.begin(), rels.end(),
              [](const fs::path& a, const fs::path& b) { return a.generic_string() < b.generic_string(); });

    for (const fs::path& rel : rels) {
        std::string rel_str = rel.generic_string();
        bool root_level = rel.parent_path().empty();

        if (root_level && rel_str == "repo.json") {
            json meta = json::parse(read_file_or_die(dir / rel), nullptr, false);
            if (meta.is_discarded() || !meta.is_object()) {
                warnings.push_back(repo_id + ": malformed repo.json ignored");
                continue;
            }
            if (meta.contains("owner") && meta["owner"].is_string())
                out.repo.owner = meta["owner"].get<std::string>();
            if (meta.contains("stars") && meta["stars"].is_number_unsigned())
                out.repo.stars = meta["stars"].get<std::uint64_t>();
            if (meta.contains("commit_count") && meta["commit_count"].is_number_unsigned())
                out.repo.commit_count = meta["commit_count"].get<std::uint64_t>();
            if (meta.contains("license") && meta["license"].is_string())
                out.license.declared = meta["license"].get<std::string>();
            continue;
        }
        if (root_level && is_license_filename(rel_str)) {
            if (!out.license.file_text) out.license.file_text = read_file_or_die(dir / rel);
            continue;
        }

        std::optional<std::string> norm = normalize_rel_path(rel_str);
        if (!norm) {
            warnings.push_back(repo_id + ": skipped unusable path " + rel_str);
            continue;
        }
        std::string content = read_file_or_die(dir / rel);

        if (is_doc_extension(rel)) {
            NaturalDoc doc;
            doc.doc_id = repo_id + ":" + *norm;
            doc.language = detect_natural_language(content);
            doc.content = std::move(content);
            out.docs.push_back(std::move(doc));
            continue;
        }

        // Built by hand rather than make_source_file: invalid UTF-8 must
        // reach the content filters as a file, not die here.
        SourceFile f;
        f.repo_id = repo_id;
        f.rel_path = *norm;
        f.language = language_from_path(*norm);
        f.byte_len = content.size();
        f.content = std::move(content);
        if (path_marks_test_file(f.rel_path)) ++out.repo.test_file_count;
        out.repo.files.push_back(std::move(f));
    }
    return out;
}

}  // namespace

IngestResult ingest_corpus(const std::string& input_root) {
    IngestResult out;
    fs::path root(input_root);
    if (input_root.empty() || !fs::exists(root)) {
        throw PipelineError(kExitMissingInput, "input not found: " + input_root);
    }

    if (fs::is_regular_file(root)) {
        for (const std::string& line : jsonl::read_lines(root.string())) {
            Repository repo = jsonl::parse_repository(line);
            RepoRawLicense lic;
            if (repo.license.spdx_id != "Unknown") lic.declared = repo.license.spdx_id;
            out.repos.push_back(std::move(repo));
            out.licenses.push_back(std::move(lic));
        }
        std::vector<std::size_t> idx(out.repos.size());
        for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return out.repos[a].repo_id < out.repos[b].repo_id;
        });
        IngestResult sorted;
        for (std::size_t i : idx) {
            if (!sorted.repos.empty() && sorted.repos.back().repo_id == out.repos[i].repo_id) {
                sorted.warnings.push_back("duplicate repo_id dropped: " + out.repos[i].repo_id);
                continue;
            }
            sorted.repos.push_back(std::move(out.repos[i]));
            sorted.licenses.push_back(std::move(out.licenses[i]));
        }
        return sorted;
    }

    std::vector<fs::path> entries;
    for (const auto& entry : fs::directory_iterator(root)) entries.push_back(entry.path());
    std::sort(entries.begin(), entries.end(), [](const fs::path& a, const fs::path& b) {
        return a.filename().string() < b.filename().string();
    });

    std::vector<NaturalDoc> loose;
    for (const fs::path& entry : entries) {
        std::string name = entry.filename().string();
        if (name.empty() || name[0] == '.') continue;
        if (fs::is_directory(entry)) {
            RepoIngest ri = ingest_repo_dir(entry, name, out.warnings);
            out.repos.push_back(std::move(ri.repo));
            out.licenses.push_back(std::move(ri.license));
            for (NaturalDoc& d : ri.docs) out.docs.push_back(std::move(d));
        } else if (fs::is_regular_file(entry)) {
            fs::path p(name);
            std::string ext = p.extension().string();
            for (char& c : ext) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
            if (ext == ".md" || ext == ".txt") {
                NaturalDoc doc;
                doc.doc_id = name;
                doc.content = read_file_or_die(entry);
                doc.language = detect_natural_language(doc.content);
                loose.push_back(std::move(doc));
            }
        }
    }
    for (NaturalDoc& d : loose) out.docs.push_back(std::move(d));
    return out;
}

// ---------------------------------------------------------------- clean

void run_clean(const PipelineConfig& cfg, std::ostream& log) {
    IngestResult in = ingest_corpus(cfg.input_root);
    for (const std::string& w : in.warnings) log << "[clean] note: " << w << "\n";

    std::set<std::string> permissive;
    if (cfg.permissive_list_file.empty()) {
        permissive = default_permissive_licenses();
    } else {
        try {
            permissive = load_spdx_list(cfg.permissive_list_file);
        } catch (const std::exception& e) {
            throw PipelineError(kExitMissingInput, e.what());
        }
    }

    const std::size_t repos_in = in.repos.size();
    const std::size_t docs_in = in.docs.size();
    std::size_t files_in = 0;
    for (const Repository& r : in.repos) files_in += r.files.size();
    const std::string input_hash = hex64(corpus_digest(in));

    std::map<std::string, std::size_t> drop_buckets;
    std::size_t repos_dropped_license = 0;

    std::vector<Repository> repos;
    for (std::size_t i = 0; i < in.repos.size(); ++i) {
        Repository& repo = in.repos[i];
        repo.license =
            classify_license(in.licenses[i].declared, in.licenses[i].file_text, permissive);
        if (!repo.license.permissive) {
            ++repos_dropped_license;
            drop_buckets["repo_license"] += repo.files.size();
            continue;
        }
        repos.push_back(std::move(repo));
    }

    std::size_t files_before_score = 0;
    for (const Repository& r : repos) files_before_score += r.files.size();
    const std::size_t repos_before_score = repos.size();
    repos = score_and_prune_repos(std::move(repos), cfg.score_weights, cfg.prune_fraction);
    std::size_t files_after_score = 0;
    for (const Repository& r : repos) files_after_score += r.files.size();
    const std::size_t repos_dropped_score = repos_before_score - repos.size();
    drop_buckets["repo_score"] += files_before_score - files_after_score;

    // Content filters.
    struct FileRef {
        std::size_t repo;
        std::size_t file;
    };
    std::vector<FileRef> flat;
    for (std::size_t r = 0; r < repos.size(); ++r) {
        for (std::size_t f = 0; f < repos[r].files.size(); ++f) flat.push_back({r, f});
    }
    std::vector<FileVerdict> verdicts(flat.size());
    parallel_for(flat.size(), cfg.jobs, [&](std::size_t i) {
        verdicts[i] = filter_file(repos[flat[i].repo].files[flat[i].file], cfg.file_filters);
    });

    // Parse gate on filter survivors with a supported grammar.
    enum class Gate { NotGated, Ok, SyntaxError, Timeout };
    std::vector<Gate> gates(flat.size(), Gate::NotGated);
    std::vector<double> gate_ms(flat.size(), 0.0);
    ParseOptions popts;
    popts.timeout_ms = cfg.parse_timeout_ms;
    popts.max_error_fraction = cfg.parse_max_error_fraction;
    parallel_for(flat.size(), cfg.jobs, [&](std::size_t i) {
        if (!verdicts[i].keep) return;
        const SourceFile& file = repos[flat[i].repo].files[flat[i].file];
        if (!parser_supported(file.language.lang)) return;
        auto t0 = std::chrono::steady_clock::now();
        ParseOutcome outcome = parse_source(file, popts);
        auto t1 = std::chrono::steady_clock::now();
        gate_ms[i] = std::chrono::duration<double, std::milli>(t1 - t0).count();
        if (std::holds_alternative<SyntaxNode>(outcome)) {
            gates[i] = Gate::Ok;
        } else {
            gates[i] = std::get<ParseFailure>(outcome).kind == ParseFailure::Kind::Timeout
                           ? Gate::Timeout
                           : Gate::SyntaxError;
        }
    });

    // Gate records carry wall time, so they go to the run log, never the
    // output tree.
    std::vector<std::string> verdict_lines;
    std::size_t gate_checked = 0, gate_ok = 0, gate_syntax = 0, gate_timeout = 0;
    std::vector<std::vector<std::size_t>> keep_idx(repos.size());
    for (std::size_t i = 0; i < flat.size(); ++i) {
        const SourceFile& file = repos[flat[i].repo].files[flat[i].file];
        const std::string id = jsonl::file_id(file);
        if (!verdicts[i].keep) {
            jsonl::VerdictRecord rec;
            rec.file = id;
            rec.keep = false;
            for (FileReason r : verdicts[i].reasons) rec.reasons.push_back(to_string(r));
            verdict_lines.push_back(jsonl::to_json(rec));
            drop_buckets[to_string(*verdicts[i].reasons.begin())] += 1;
            continue;
        }
        if (gates[i] != Gate::NotGated) {
            ++gate_checked;
            jsonl::GateRecord g;
            g.file = id;
            g.parse_ms = gate_ms[i];
            g.verdict = gates[i] == Gate::Ok ? "ok"
                        : gates[i] == Gate::Timeout ? "timeout"
                                                    : "syntax_error";
            jsonl::append_line(log, jsonl::to_json(g));
            if (gates[i] != Gate::Ok) {
                (gates[i] == Gate::Timeout ? gate_timeout : gate_syntax) += 1;
                drop_buckets[g.verdict] += 1;
                jsonl::VerdictRecord rec;
                rec.file = id;
                rec.keep = false;
                rec.reasons.push_back(g.verdict);
                verdict_lines.push_back(jsonl::to_json(rec));
                continue;
            }
            ++gate_ok;
        }
        keep_idx[flat[i].repo].push_back(flat[i].file);
    }
    for (std::size_t r = 0; r < repos.size(); ++r) {
        std::vector<SourceFile> kept;
        kept.reserve(keep_idx[r].size());
        for (std::size_t f : keep_idx[r]) kept.push_back(std::move(repos[r].files[f]));
        repos[r].files = std::move(kept);
    }

    // PII masking, files then docs.
    std::vector<SourceFile*> masked_files;
    for (Repository& r : repos)
        for (SourceFile& f : r.files) masked_files.push_back(&f);
    PiiConfig pii_cfg;
    pii_cfg.detect_names = cfg.mask_names;
    std::vector<PiiReport> file_reports(masked_files.size());
    parallel_for(masked_files.size(), cfg.jobs, [&](std::size_t i) {
        MaskResult m = mask_pii(masked_files[i]->content, pii_cfg);
        file_reports[i] = std::move(m.report);
        masked_files[i]->content = std::move(m.text);
        masked_files[i]->byte_len = masked_files[i]->content.size();
    });
    std::vector<PiiReport> doc_reports(in.docs.size());
    parallel_for(in.docs.size(), cfg.jobs, [&](std::size_t i) {
        MaskResult m = mask_pii(in.docs[i].content, pii_cfg);
        doc_reports[i] = std::move(m.report);
        in.docs[i].content = std::move(m.text);
    });
    std::map<std::string, std::size_t> pii_counts;
    for (const PiiReport& rep : file_reports)
        for (const PiiReplacement& r : rep.replacements)
            pii_counts[std::string(pii_token(r.category))] += 1;
    for (const PiiReport& rep : doc_reports)
        for (const PiiReplacement& r : rep.replacements)
            pii_counts[std::string(pii_token(r.category))] += 1;

    // Docs keep only basic hygiene: drop empty or non-text content.
    std::vector<NaturalDoc> docs;
    std::size_t docs_dropped = 0;
    for (NaturalDoc& d : in.docs) {
        SourceFile probe;
        probe.rel_path = d.doc_id;
        probe.content = d.content;
        probe.byte_len = d.content.size();
        FileVerdict v = filter_file(probe, cfg.file_filters);
        bool bad = false;
        for (FileReason r : v.reasons) {
            if (r == FileReason::Empty || r == FileReason::Corrupted || r == FileReason::NonText)
                bad = true;
        }
        if (bad) {
            ++docs_dropped;
            continue;
        }
        docs.push_back(std::move(d));
    }

    // Sensitive-word prune runs last, over masked text.
    std::vector<std::string> sensitive_removed;
    std::set<std::string> sensitive_owners;
    if (!cfg.sensitive_wordlist_file.empty()) {
        std::vector<std::string> words;
        try {
            words = load_wordlist(cfg.sensitive_wordlist_file);
        } catch (const std::exception& e) {
            throw PipelineError(kExitMissingInput, e.what());
        }
        SensitivePruneResult res =
            sensitive_word_prune(repos, words, cfg.sensitive_freq_threshold);
        sensitive_removed = res.removed_repo_ids;
        sensitive_owners = res.offending_owners;
        std::set<std::string> removed(sensitive_removed.begin(), sensitive_removed.end());
        std::vector<Repository> left;
        for (Repository& r : repos) {
            if (removed.count(r.repo_id)) {
                drop_buckets["repo_sensitive"] += r.files.size();
                continue;
            }
            left.push_back(std::move(r));
        }
        repos = std::move(left);
    }

    std::size_t files_kept = 0;
    for (const Repository& r : repos) files_kept += r.files.size();

    fs::path dir = fs::path(cfg.output_root) / "clean";
    ensure_dir(dir);
    std::vector<std::string> repo_lines, doc_lines;
    for (const Repository& r : repos) repo_lines.push_back(jsonl::to_json(r));
    for (const NaturalDoc& d : docs) doc_lines.push_back(jsonl::to_json(d));
    write_lines_or_die(dir / "repos.jsonl", repo_lines);
    write_lines_or_die(dir / "docs.jsonl", doc_lines);
    write_lines_or_die(dir / "verdicts.jsonl", verdict_lines);

    json m;
    m["stage"] = "clean";
    m["config"] = manifest_config(cfg);
    m["input"] = {{"hash", input_hash}, {"repos", repos_in}, {"files", files_in}, {"docs", docs_in}};
    m["repos"] = {{"input", repos_in},
                  {"kept", repos.size()},
                  {"dropped_license", repos_dropped_license},
                  {"dropped_score", repos_dropped_score},
                  {"dropped_sensitive", sensitive_removed.size()}};
    json dropped = json::object();
    for (const auto& [k, v] : drop_buckets) dropped[k] = v;
    m["files"] = {{"input", files_in}, {"kept", files_kept}, {"dropped", dropped}};
    m["docs"] = {{"input", docs_in}, {"kept", docs.size()}, {"dropped", docs_dropped}};
    json pii = json::object();
    for (const auto& [k, v] : pii_counts) pii[k] = v;
    m["pii"] = pii;
    m["gate"] = {{"checked", gate_checked},
                 {"ok", gate_ok},
                 {"syntax_error", gate_syntax},
                 {"timeout", gate_timeout}};
    if (!cfg.sensitive_wordlist_file.empty()) {
        m["sensitive"] = {{"removed_repos", sensitive_removed},
                          {"offending_owners",
                           std::vector<std::string>(sensitive_owners.begin(),
                                                    sensitive_owners.end())}};
    }
    write_manifest(dir, std::move(m));

    log << "[clean] repos " << repos_in << " -> " << repos.size() << ", files " << files_in
        << " -> " << files_kept << ", docs " << docs_in << " -> " << docs.size() << "\n";
}

// ---------------------------------------------------------------- dedup

void run_dedup(const PipelineConfig& cfg, std::ostream& log) {
    fs::path out_root(cfg.output_root);
    fs::path repos_path = require_input(out_root / "clean" / "repos.jsonl", "clean");
    std::vector<Repository> repos =
        jsonl::read_records<Repository>(repos_path.string(), jsonl::parse_repository);
    const std::string input_hash = file_digest(repos_path);

    struct FileRef {
        std::size_t repo;
        std::size_t file;
    };
    std::vector<FileRef> flat;
    std::vector<SourceFile> files;
    for (std::size_t r = 0; r < repos.size(); ++r) {
        for (std::size_t f = 0; f < repos[r].files.size(); ++f) {
            flat.push_back({r, f});
            files.push_back(repos[r].files[f]);
        }
    }

    DedupResult exact = exact_dedup(files);
    std::vector<SourceFile> stage2;
    stage2.reserve(exact.survivor_indices.size());
    for (std::size_t i : exact.survivor_indices) stage2.push_back(files[i]);

    NearDedupConfig ncfg = cfg.dedup;
    ncfg.seed = cfg.seed;
    DedupResult near = near_dedup(stage2, ncfg);

    std::vector<std::size_t> final_flat;
    final_flat.reserve(near.survivor_indices.size());
    for (std::size_t i : near.survivor_indices) final_flat.push_back(exact.survivor_indices[i]);

    std::vector<std::string> cluster_lines;
    auto emit_clusters = [&](const std::vector<DuplicateCluster>& clusters) {
        for (const DuplicateCluster& c : clusters) {
            jsonl::ClusterRecord rec;
            rec.survivor = c.survivor;
            rec.members = c.members;
            rec.verified_jaccard = c.verified_jaccard;
            cluster_lines.push_back(jsonl::to_json(rec));
        }
    };
    emit_clusters(exact.clusters);
    emit_clusters(near.clusters);

    // One signature per survivor; shingles ride along so later leakage
    // checks can verify exactly without the training text.
    std::vector<std::string> signature_lines(final_flat.size());
    parallel_for(final_flat.size(), cfg.jobs, [&](std::size_t i) {
        const SourceFile& f = files[final_flat[i]];
        MinHashSignature sig = minhash_signature(f.content, ncfg.shingle_width, ncfg.seed);
        std::vector<std::uint64_t> shingles = shingle_hash_set(f.content, ncfg.shingle_width);
        std::sort(shingles.begin(), shingles.end());
        shingles.erase(std::unique(shingles.begin(), shingles.end()), shingles.end());
        jsonl::SignatureRecord rec;
        rec.file = jsonl::file_id(f);
        rec.values.assign(sig.values.begin(), sig.values.end());
        rec.shingle_width = sig.shingle_width;
        rec.empty_input = sig.empty_input;
        rec.has_shingles = true;
        rec.shingles = std::move(shingles);
        signature_lines[i] = jsonl::to_json(rec);
    });

    std::vector<std::set<std::size_t>> kept_per_repo(repos.size());
    for (std::size_t i : final_flat) kept_per_repo[flat[i].repo].insert(flat[i].file);
    for (std::size_t r = 0; r < repos.size(); ++r) {
        std::vector<SourceFile> kept;
        for (std::size_t f = 0; f < repos[r].files.size(); ++f) {
            if (kept_per_repo[r].count(f)) kept.push_back(std::move(repos[r].files[f]));
        }
        repos[r].files = std::move(kept);
    }

    fs::path dir = out_root / "dedup";
    ensure_dir(dir);
    std::vector<std::string> repo_lines;
    for (const Repository& r : repos) repo_lines.push_back(jsonl::to_json(r));
    write_lines_or_die(dir / "repos.jsonl", repo_lines);
    write_lines_or_die(dir / "clusters.jsonl", cluster_lines);
    write_lines_or_die(dir / "signatures.jsonl", signature_lines);

    json m;
    m["stage"] = "dedup";
    m["config"] = manifest_config(cfg);
    m["input"] = {{"hash", input_hash}, {"files", files.size()}};
    m["files"] = {{"input", files.size()},
                  {"exact_removed", files.size() - stage2.size()},
                  {"near_removed", stage2.size() - final_flat.size()},
                  {"kept", final_flat.size()}};
    m["clusters"] = {{"exact", exact.clusters.size()}, {"near", near.clusters.size()}};
    write_manifest(dir, std::move(m));

    log << "[dedup] files " << files.size() << " -> " << final_flat.size() << " ("
        << exact.clusters.size() << " exact clusters, " << near.clusters.size()
        << " near clusters)\n";
}

// ---------------------------------------------------------------- sample

void run_sample(const PipelineConfig& cfg, std::ostream& log) {
    fs::path out_root(cfg.output_root);
    fs::path repos_path = require_input(out_root / "dedup" / "repos.jsonl", "dedup");
    std::vector<Repository> repos =
        jsonl::read_records<Repository>(repos_path.string(), jsonl::parse_repository);
    const std::string input_hash = file_digest(repos_path);

    RandomStream base(cfg.seed);
    std::vector<OrderedRepo> ordered(repos.size());
    parallel_for(repos.size(), cfg.jobs, [&](std::size_t i) {
        RandomStream sub = base.derive("sample", repos[i].repo_id);
        ordered[i] = order_files(repos[i], sub);
    });

    std::map<std::string, std::size_t> strategy_counts;
    std::vector<std::string> lines;
    for (std::size_t i = 0; i < repos.size(); ++i) {
        jsonl::OrderingRecord rec;
        rec.repo_id = repos[i].repo_id;
        rec.strategy = to_string(ordered[i].strategy.strategy);
        for (std::size_t f : ordered[i].order) rec.files.push_back(repos[i].files[f].rel_path);
        strategy_counts[rec.strategy] += 1;
        lines.push_back(jsonl::to_json(rec));
    }

    fs::path dir = out_root / "sample";
    ensure_dir(dir);
    write_lines_or_die(dir / "ordering.jsonl", lines);

    json m;
    m["stage"] = "sample";
    m["config"] = manifest_config(cfg);
    m["input"] = {{"hash", input_hash}, {"repos", repos.size()}};
    json strategies = json::object();
    for (const auto& [k, v] : strategy_counts) strategies[k] = v;
    m["strategies"] = strategies;
    write_manifest(dir, std::move(m));

    log << "[sample] ordered " << repos.size() << " repos\n";
}

// ---------------------------------------------------------------- forge

namespace {

struct ForgeTally {
    std::map<std::string, std::size_t> objectives;
    // mode tallies only cover FIM and SFIM; NTP has no mode draw
    std::map<std::string, std::size_t> modes;
    std::size_t sfim_fallbacks = 0;
    std::size_t fim_degraded_to_ntp = 0;
    std::size_t sentinel_collisions = 0;
    std::size_t resplits = 0;
    std::size_t oversize_emitted = 0;
    std::size_t chunks = 0;

    void merge(const ForgeTally& o) {
        for (const auto& [k, v] : o.objectives) objectives[k] += v;
        for (const auto& [k, v] : o.modes) modes[k] += v;
        sfim_fallbacks += o.sfim_fallbacks;
        fim_degraded_to_ntp += o.fim_degraded_to_ntp;
        sentinel_collisions += o.sentinel_collisions;
        resplits += o.resplits;
        oversize_emitted += o.oversize_emitted;
        chunks += o.chunks;
    }
};

struct ForgeUnitOut {
    std::vector<TrainingSequence> seqs;
    ForgeTally tally;
};

struct FileAtOffset {
    std::size_t offset = 0;
    const std::vector<FunctionSpan>* functions = nullptr;
};

// Emits sequences for one window of `doc`, re-splitting on token
// overflow. `files` is null for natural-language docs.
void forge_window(std::string_view doc, CharRange window, const std::string& id,
                  std::size_t budget, DocKind kind, const std::vector<FileAtOffset>* files,
                  const PipelineConfig& cfg, const RandomStream& base, const Tokenizer& tok,
                  ForgeUnitOut& out) {
    std::string_view slice = doc.substr(window.begin, window.end - window.begin);
    RandomStream rng = base.derive("forge", id);
    out.tally.chunks += 1;

    Objective obj = choose_objective(kind, cfg.mix, rng);
    SpanSelection span;
    bool have = false;
    if (obj == Objective::SFIM) {
        std::vector<OffsetFunctionTree> candidates;
        if (files != nullptr) {
            for (const FileAtOffset& fa : *files) {
                for (const FunctionSpan& fn : *fa.functions) {
                    std::size_t b = fa.offset + fn.char_range.begin;
                    std::size_t e = fa.offset + fn.char_range.end;
                    if (b >= window.begin && e <= window.end) {
                        candidates.push_back(
                            {fn.tree, static_cast<std::ptrdiff_t>(fa.offset) -
                                          static_cast<std::ptrdiff_t>(window.begin)});
                    }
                }
            }
        }
        std::optional<SfimPick> pick = select_sfim_span(slice, id, candidates, rng);
        if (pick) {
            span = std::move(pick->span);
            have = true;
        } else {
            out.tally.sfim_fallbacks += 1;
            obj = Objective::FIM;
        }
    }
    if (!have && obj == Objective::FIM) {
        std::optional<SpanSelection> fim = select_fim_span(slice, id, rng);
        if (fim) {
            span = std::move(*fim);
            have = true;
        } else {
            out.tally.fim_degraded_to_ntp += 1;
        }
    }
    if (!have) span = ntp_span(slice, id);
    span.mode = choose_mode(span.objective, cfg.mix, rng);

    std::size_t collisions = 0;
    TrainingSequence seq = serialize_sequence(slice, span, cfg.sentinels, tok, &collisions);
    out.tally.sentinel_collisions += collisions;

    if (seq.tokens.size() > cfg.max_context) {
        std::size_t over = seq.tokens.size() - cfg.max_context;
        std::size_t sub_budget = budget > over + 16 ? budget - over : 16;
        ChunkResult sub = chunk_document(slice, tok, sub_budget);
        if (sub.chunks.size() > 1) {
            out.tally.resplits += 1;
            out.tally.chunks -= 1;  // the window re-splits instead of emitting
            for (std::size_t j = 0; j < sub.chunks.size(); ++j) {
                CharRange w{window.begin + sub.chunks[j].begin,
                            window.begin + sub.chunks[j].end};
                forge_window(doc, w, id + "/" + std::to_string(j), sub_budget, kind, files, cfg,
                             base, tok, out);
            }
            return;
        }
        out.tally.oversize_emitted += 1;
    }

    out.tally.objectives[to_string(span.objective)] += 1;
    if (span.objective != Objective::NTP) {
        out.tally.modes[to_string(span.objective) + "_" + to_string(span.mode)] += 1;
    }
    out.seqs.push_back(std::move(seq));
}

ForgeUnitOut forge_repo_unit(const Repository& repo, const jsonl::OrderingRecord& ordering,
                             const PipelineConfig& cfg, const RandomStream& base,
                             const Tokenizer& tok, std::size_t budget) {
    ForgeUnitOut out;
    if (repo.files.empty()) return out;

    std::map<std::string_view, std::size_t> by_path;
    for (std::size_t i = 0; i < repo.files.size(); ++i) by_path[repo.files[i].rel_path] = i;
    if (ordering.files.size() != repo.files.size()) {
        throw PipelineError(kExitMissingInput, "ordering for " + repo.repo_id +
                                                   " does not cover the repo (rerun sample)");
    }

    std::string conc;
    std::size_t total = 0;
    for (const SourceFile& f : repo.files) total += f.content.size();
    conc.reserve(total);

    std::vector<std::unique_ptr<SyntaxNode>> trees;
    // Boxed so the pointers the layout takes survive vector growth.
    std::vector<std::unique_ptr<std::vector<FunctionSpan>>> functions;
    std::vector<FileAtOffset> layout;
    ParseOptions popts;
    popts.timeout_ms = cfg.parse_timeout_ms;
    popts.max_error_fraction = cfg.parse_max_error_fraction;

    for (const std::string& name : ordering.files) {
        auto it = by_path.find(name);
        if (it == by_path.end()) {
            throw PipelineError(kExitMissingInput, "ordering for " + repo.repo_id +
                                                       " references unknown file " + name);
        }
        const SourceFile& f = repo.files[it->second];
        std::size_t offset = conc.size();
        conc += f.content;
        if (parser_supported(f.language.lang)) {
            ParseOutcome parsed = parse_text(f.content, f.language.lang, popts);
            if (std::holds_alternative<SyntaxNode>(parsed)) {
                trees.push_back(
                    std::make_unique<SyntaxNode>(std::move(std::get<SyntaxNode>(parsed))));
                functions.push_back(std::make_unique<std::vector<FunctionSpan>>(
                    list_functions(*trees.back(), f.content, f.language.lang)));
                layout.push_back({offset, functions.back().get()});
            }
        }
    }

    ChunkResult chunks = chunk_document(conc, tok, budget);
    for (std::size_t i = 0; i < chunks.chunks.size(); ++i) {
        forge_window(conc, chunks.chunks[i], repo.repo_id + "#" + std::to_string(i), budget,
                     DocKind::Code, &layout, cfg, base, tok, out);
    }
    return out;
}

ForgeUnitOut forge_doc_unit(const NaturalDoc& doc, const PipelineConfig& cfg,
                            const RandomStream& base, const Tokenizer& tok,
                            std::size_t budget) {
    ForgeUnitOut out;
    if (doc.content.empty()) return out;
    ChunkResult chunks = chunk_document(doc.content, tok, budget);
    for (std::size_t i = 0; i < chunks.chunks.size(); ++i) {
        forge_window(doc.content, chunks.chunks[i], doc.doc_id + "#" + std::to_string(i), budget,
                     DocKind::NL, nullptr, cfg, base, tok, out);
    }
    return out;
}

}  // namespace

void run_forge(const PipelineConfig& cfg, std::ostream& log) {
    fs::path out_root(cfg.output_root);
    fs::path repos_path = require_input(out_root / "dedup" / "repos.jsonl", "dedup");
    fs::path order_path = require_input(out_root / "sample" / "ordering.jsonl", "sample");
    std::vector<Repository> repos =
        jsonl::read_records<Repository>(repos_path.string(), jsonl::parse_repository);
    std::vector<jsonl::OrderingRecord> orderings =
        jsonl::read_records<jsonl::OrderingRecord>(order_path.string(), jsonl::parse_ordering);

    std::vector<NaturalDoc> docs;
    fs::path docs_path = out_root / "clean" / "docs.jsonl";
    bool have_docs = fs::exists(docs_path);
    if (have_docs) {
        docs = jsonl::read_records<NaturalDoc>(docs_path.string(), jsonl::parse_natural_doc);
    } else {
        log << "[forge] note: no docs.jsonl, code only\n";
    }

    std::map<std::string, const jsonl::OrderingRecord*> order_by_repo;
    for (const jsonl::OrderingRecord& o : orderings) order_by_repo[o.repo_id] = &o;

    auto tok = default_tokenizer();
    std::size_t overhead =
        std::max(sentinel_overhead(cfg.sentinels, *tok, Objective::NTP),
                 sentinel_overhead(cfg.sentinels, *tok, Objective::FIM));
    if (cfg.max_context <= overhead + 1) {
        throw PipelineError(kExitConfig, "max_context too small for the sentinel set");
    }
    std::size_t budget = cfg.max_context - overhead;

    // Docs interleave after their own repo; loose docs close the stream.
    std::vector<std::vector<std::size_t>> repo_docs(repos.size());
    std::vector<std::size_t> loose_docs;
    {
        std::map<std::string_view, std::size_t> repo_index;
        for (std::size_t i = 0; i < repos.size(); ++i) repo_index[repos[i].repo_id] = i;
        for (std::size_t d = 0; d < docs.size(); ++d) {
            std::size_t colon = docs[d].doc_id.find(':');
            bool attached = false;
            if (colon != std::string::npos) {
                auto it = repo_index.find(std::string_view(docs[d].doc_id).substr(0, colon));
                if (it != repo_index.end()) {
                    repo_docs[it->second].push_back(d);
                    attached = true;
                }
            }
            if (!attached) loose_docs.push_back(d);
        }
    }
    struct Unit {
        bool is_repo;
        std::size_t index;
    };
    std::vector<Unit> units;
    for (std::size_t i = 0; i < repos.size(); ++i) {
        units.push_back({true, i});
        for (std::size_t d : repo_docs[i]) units.push_back({false, d});
    }
    for (std::size_t d : loose_docs) units.push_back({false, d});

    RandomStream base(cfg.seed);
    std::vector<ForgeUnitOut> outs(units.size());
    parallel_for(units.size(), cfg.jobs, [&](std::size_t u) {
        if (units[u].is_repo) {
            const Repository& repo = repos[units[u].index];
            auto it = order_by_repo.find(repo.repo_id);
            if (it == order_by_repo.end()) {
                throw PipelineError(kExitMissingInput,
                                    "no ordering for " + repo.repo_id + " (rerun sample)");
            }
            outs[u] = forge_repo_unit(repo, *it->second, cfg, base, *tok, budget);
        } else {
            outs[u] = forge_doc_unit(docs[units[u].index], cfg, base, *tok, budget);
        }
    });

    fs::path dir = out_root / "forge";
    ensure_dir(dir);
    std::ofstream seq_out(dir / "sequences.jsonl", std::ios::binary | std::ios::trunc);
    std::ofstream bin_out(dir / "tokens.bin", std::ios::binary | std::ios::trunc);
    if (!seq_out || !bin_out) {
        throw PipelineError(kExitUnwritableOutput, "cannot write under " + dir.string());
    }
    ForgeTally tally;
    std::size_t sequences = 0;
    std::uint64_t total_tokens = 0;
    for (const ForgeUnitOut& out : outs) {
        tally.merge(out.tally);
        for (const TrainingSequence& s : out.seqs) {
            jsonl::append_line(seq_out, jsonl::to_json(s));
            append_token_record(bin_out, s.tokens);
            ++sequences;
            total_tokens += s.tokens.size();
        }
    }
    seq_out.flush();
    bin_out.flush();
    if (!seq_out || !bin_out) {
        throw PipelineError(kExitUnwritableOutput, "write failed under " + dir.string());
    }

    json m;
    m["stage"] = "forge";
    m["config"] = manifest_config(cfg);
    json inputs = json::object();
    inputs["repos_hash"] = file_digest(repos_path);
    inputs["ordering_hash"] = file_digest(order_path);
    if (have_docs) inputs["docs_hash"] = file_digest(docs_path);
    m["input"] = inputs;
    m["sequences"] = sequences;
    m["total_tokens"] = total_tokens;
    m["chunks"] = tally.chunks;
    json objectives = json::object();
    for (const auto& [k, v] : tally.objectives) objectives[k] = v;
    m["objectives"] = objectives;
    json modes = json::object();
    for (const auto& [k, v] : tally.modes) modes[k] = v;
    m["modes"] = modes;
    m["sfim_fallbacks"] = tally.sfim_fallbacks;
    m["fim_degraded_to_ntp"] = tally.fim_degraded_to_ntp;
    m["sentinel_collisions"] = tally.sentinel_collisions;
    m["resplits"] = tally.resplits;
    m["oversize_emitted"] = tally.oversize_emitted;
    write_manifest(dir, std::move(m));

    log << "[forge] " << sequences << " sequences, " << total_tokens << " tokens, "
        << tally.chunks << " chunks\n";
}

// ---------------------------------------------------------------- bench

void run_bench(const PipelineConfig& cfg, std::ostream& log) {
    if (cfg.bench_input_root.empty()) {
        throw PipelineError(kExitMissingInput, "bench_input_root not set");
    }
    IngestResult in = ingest_corpus(cfg.bench_input_root);
    for (const std::string& w : in.warnings) log << "[bench] note: " << w << "\n";

    std::set<std::string> excluded;
    std::string exclusion_hash;
    if (!cfg.excluded_repos_file.empty()) {
        std::string text = read_file_or_die(cfg.excluded_repos_file);
        exclusion_hash = hex64(hash_bytes(text));
        std::stringstream ss(text);
        std::string line;
        while (std::getline(ss, line)) {
            while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.pop_back();
            std::size_t first = line.find_first_not_of(" \t");
            if (first == std::string::npos) continue;
            line = line.substr(first);
            if (line[0] == '#') continue;
            excluded.insert(line);
        }
    }

    fs::path sig_path = fs::path(cfg.output_root) / "dedup" / "signatures.jsonl";
    std::vector<jsonl::SignatureRecord> training;
    bool have_signatures = fs::exists(sig_path);
    if (have_signatures) {
        training = jsonl::read_records<jsonl::SignatureRecord>(sig_path.string(),
                                                               jsonl::parse_signature);
    } else if (cfg.strict_leakage) {
        throw PipelineError(kExitMissingInput,
                            "strict_leakage needs " + sig_path.string() + " (run dedup first)");
    }

    BenchmarkQuotas quotas;
    if (cfg.bench_quota > 0) {
        quotas = uniform_quotas(cfg.bench_languages, cfg.bench_quota);
    } else {
        BenchmarkQuotas preset = preset_quotas();
        for (Language lang : cfg.bench_languages) {
            auto it = preset.find(lang);
            if (it != preset.end()) {
                quotas[lang] = it->second;
            } else {
                // Not part of the published shape: give it the common
                // 4080 total, spread like the preset spreads.
                TypeQuotas q{};
                std::size_t base = 4080 / q.size(), rem = 4080 % q.size();
                for (std::size_t i = 0; i < q.size(); ++i) q[i] = base + (i < rem ? 1 : 0);
                quotas[lang] = q;
            }
        }
    }

    auto tok = default_tokenizer();
    RandomStream rng(cfg.seed);
    BenchmarkBuild build =
        build_benchmark(in.repos, quotas, rng, excluded, *tok, cfg.context_budget);
    for (const std::string& w : build.warnings) log << "[bench] " << w << "\n";

    LeakageReport leakage;
    bool leakage_checked = false;
    if (have_signatures) {
        NearDedupConfig lcfg = cfg.dedup;
        lcfg.seed = cfg.seed;
        leakage = leakage_check(build.samples, in.repos, training, lcfg);
        leakage_checked = true;
    }
    std::size_t flagged = leakage.flags.size();
    std::size_t removed = 0;
    std::vector<BenchmarkSample> samples = std::move(build.samples);
    if (cfg.strict_leakage && flagged > 0) {
        std::size_t before = samples.size();
        samples = apply_leakage_filter(std::move(samples), leakage);
        removed = before - samples.size();
    }

    fs::path dir = fs::path(cfg.output_root) / "bench";
    ensure_dir(dir);
    std::vector<std::string> lines;
    lines.reserve(samples.size());
    for (const BenchmarkSample& s : samples) lines.push_back(to_json(s));
    write_lines_or_die(dir / "benchmark.jsonl", lines);

    json lk;
    lk["checked"] = leakage_checked;
    lk["strict"] = cfg.strict_leakage;
    lk["origin_files_checked"] = leakage.origin_files_checked;
    lk["pairs_verified"] = leakage.pairs_verified;
    lk["unresolved_origins"] = leakage.unresolved_origins;
    lk["flagged"] = flagged;
    lk["removed"] = removed;
    json flags = json::array();
    for (const LeakageFlag& f : leakage.flags) {
        flags.push_back({{"sample_id", f.sample_id},
                         {"origin_file", f.origin_file},
                         {"training_file", f.training_file},
                         {"jaccard", f.jaccard}});
    }
    lk["flags"] = flags;
    write_file_or_die(dir / "leakage.json", lk.dump(2) + "\n");

    json m;
    m["stage"] = "bench";
    m["config"] = manifest_config(cfg);
    m["input"] = {{"hash", hex64(corpus_digest(in))}, {"repos", in.repos.size()}};
    json jq = json::object();
    for (const auto& [lang, tq] : quotas) {
        json per = json::object();
        for (std::size_t i = 0; i < kAllSpanTypes.size(); ++i) {
            per[to_string(kAllSpanTypes[i])] = tq[i];
        }
        jq[to_string(LanguageTag{lang, {}})] = per;
    }
    m["quotas"] = jq;
    if (!exclusion_hash.empty()) {
        m["exclusions"] = {{"hash", exclusion_hash}, {"repos", excluded.size()}};
    }
    if (have_signatures) m["signatures_hash"] = file_digest(sig_path);
    json counts = json::object();
    for (const auto& [k, v] : build.type_counts) counts[k] = v;
    m["type_counts"] = counts;
    m["samples"] = samples.size();
    m["warnings"] = build.warnings;
    m["skipped_excluded"] = build.skipped_excluded;
    m["parse_failures"] = build.parse_failures;
    m["leakage"] = {{"checked", leakage_checked},
                    {"flagged", flagged},
                    {"removed", removed},
                    {"strict", cfg.strict_leakage}};
    json mapping = json::array();
    for (const SpanTypeMappingRow& row : span_type_mapping()) {
        mapping.push_back({{"language", row.language},
                           {"node_kind", row.node_kind},
                           {"condition", row.condition},
                           {"span_type", row.span_type}});
    }
    m["span_type_mapping"] = mapping;
    write_manifest(dir, std::move(m));

    log << "[bench] " << samples.size() << " samples";
    if (leakage_checked) log << ", " << flagged << " leakage flags, " << removed << " removed";
    log << "\n";
}

// ---------------------------------------------------------------- eval

void run_eval(const PipelineConfig& cfg, std::ostream& log) {
    fs::path bench_path = cfg.benchmark_file.empty()
                              ? fs::path(cfg.output_root) / "bench" / "benchmark.jsonl"
                              : fs::path(cfg.benchmark_file);
    require_input(bench_path, "bench");
    if (cfg.predictions_file.empty()) {
        throw PipelineError(kExitMissingInput, "predictions_file not set");
    }
    if (!fs::exists(cfg.predictions_file)) {
        throw PipelineError(kExitMissingInput, "predictions not found: " + cfg.predictions_file);
    }

    std::vector<BenchmarkSample> samples = jsonl::read_records<BenchmarkSample>(
        bench_path.string(), [](std::string_view line) { return parse_benchmark_sample(line); });
    std::vector<Prediction> preds = jsonl::read_records<Prediction>(
        cfg.predictions_file, [](std::string_view line) { return parse_prediction(line); });

    std::vector<EvalInput> refs;
    refs.reserve(samples.size());
    for (const BenchmarkSample& s : samples) {
        refs.push_back({s.id, s.reference_middle, s.language});
    }

    auto tok = default_tokenizer();
    EvalReport report = evaluate(refs, preds, *tok, EmNormalization::TrimTrailingWs);

    std::string outcomes_hash;
    if (!cfg.outcomes_file.empty()) {
        if (!fs::exists(cfg.outcomes_file)) {
            throw PipelineError(kExitMissingInput, "outcomes not found: " + cfg.outcomes_file);
        }
        std::vector<PassOutcome> outcomes = jsonl::read_records<PassOutcome>(
            cfg.outcomes_file, [](std::string_view line) { return parse_pass_outcome(line); });
        report.pass_at_k_value = mean_pass_at_k(outcomes, cfg.eval_k);
        outcomes_hash = file_digest(cfg.outcomes_file);
    }

    fs::path dir = fs::path(cfg.output_root) / "eval";
    ensure_dir(dir);
    write_file_or_die(dir / "report.json", to_json(report) + "\n");
    write_file_or_die(dir / "report.csv", eval_report_csv(report));

    json m;
    m["stage"] = "eval";
    m["config"] = manifest_config(cfg);
    json inputs = json::object();
    inputs["benchmark_hash"] = file_digest(bench_path);
    inputs["predictions_hash"] = file_digest(cfg.predictions_file);
    if (!outcomes_hash.empty()) inputs["outcomes_hash"] = outcomes_hash;
    m["input"] = inputs;
    m["samples"] = report.samples.size();
    m["missing_predictions"] = report.missing_predictions;
    m["k"] = cfg.eval_k;
    write_manifest(dir, std::move(m));

    char line[256];
    std::snprintf(line, sizeof(line),
                  "[eval] %zu samples: em %.4f, es %.4f, bleu4 %.4f, codebleu %.4f",
                  report.samples.size(), report.mean_em, report.mean_es, report.mean_bleu4,
                  report.mean_codebleu);
    log << line;
    if (report.pass_at_k_value) {
        std::snprintf(line, sizeof(line), ", pass@%zu %.4f",
                      static_cast<std::size_t>(cfg.eval_k), *report.pass_at_k_value);
        log << line;
    }
    log << "\n";
}

// ---------------------------------------------------------------- driver

int run_pipeline(const std::string& command, const PipelineConfig& cfg, std::ostream& log) {
    try {
        std::vector<std::string> errors = validate_config(cfg);
        if (!errors.empty()) {
            for (const std::string& e : errors) log << "config error: " << e << "\n";
            return kExitConfig;
        }
        if (command == "clean") {
            run_clean(cfg, log);
        } else if (command == "dedup") {
            run_dedup(cfg, log);
        } else if (command == "sample") {
            run_sample(cfg, log);
        } else if (command == "forge") {
            run_forge(cfg, log);
        } else if (command == "bench") {
            run_bench(cfg, log);
        } else if (command == "eval") {
            run_eval(cfg, log);
        } else if (command == "all") {
            std::vector<std::string> stages = {"clean", "dedup", "sample", "forge"};
            run_clean(cfg, log);
            run_dedup(cfg, log);
            run_sample(cfg, log);
            run_forge(cfg, log);
            if (!cfg.bench_input_root.empty()) {
                run_bench(cfg, log);
                stages.push_back("bench");
            }
            if (!cfg.predictions_file.empty()) {
                run_eval(cfg, log);
                stages.push_back("eval");
            }
            json m;
            m["command"] = "all";
            m["stages"] = stages;
            m["config"] = manifest_config(cfg);
            ensure_dir(cfg.output_root);
            write_manifest(cfg.output_root, std::move(m));
        } else {
            log << "unknown command: " << command << "\n";
            return kExitConfig;
        }
        return kExitOk;
    } catch (const PipelineError& e) {
        log << "error: " << e.what() << "\n";
        return e.exit_code;
    } catch (const std::exception& e) {
        log << "error: " << e.what() << "\n";
        return kExitFailure;
    }
}

}  // namespace cforge
