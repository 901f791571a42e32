#include "cforge/jsonl.hpp"

#include <fstream>
#include <ostream>
#include <stdexcept>

#include <json.hpp>

namespace cforge::jsonl {

using nlohmann::json;

namespace {

json license_to_json(const LicenseVerdict& v) {
    return json{{"spdx_id", v.spdx_id},
                {"permissive", v.permissive},
                {"source", to_string(v.source)}};
}

LicenseVerdict license_from_json(const json& j) {
    LicenseVerdict v;
    v.spdx_id = j.at("spdx_id").get<std::string>();
    v.permissive = j.at("permissive").get<bool>();
    v.source = license_source_from_string(j.at("source").get<std::string>());
    return v;
}

json source_file_to_json(const SourceFile& f) {
    return json{{"repo_id", f.repo_id},
                {"rel_path", f.rel_path},
                {"content", f.content},
                {"language", to_string(f.language)},
                {"byte_len", f.byte_len}};
}

SourceFile source_file_from_json(const json& j) {
    SourceFile f;
    f.repo_id = j.at("repo_id").get<std::string>();
    f.rel_path = j.at("rel_path").get<std::string>();
    f.content = j.at("content").get<std::string>();
    f.language = language_tag_from_string(j.at("language").get<std::string>());
    f.byte_len = j.at("byte_len").get<std::size_t>();
    return f;
}

json parse_line(std::string_view line) {
    json j = json::parse(line, nullptr, false);
    // every record here is an object; anything else reads as corruption
    if (j.is_discarded() || !j.is_object())
        throw std::runtime_error("malformed JSON line: " + std::string(line.substr(0, 80)));
    return j;
}

}  // namespace

std::string file_id(std::string_view repo_id, std::string_view rel_path) {
    std::string id(repo_id);
    id += ":";
    id += rel_path;
    return id;
}

std::string file_id(const SourceFile& f) { return file_id(f.repo_id, f.rel_path); }

std::string to_json(const SourceFile& f) { return source_file_to_json(f).dump(); }

std::string to_json(const Repository& r) {
    json files = json::array();
    for (const SourceFile& f : r.files) files.push_back(source_file_to_json(f));
    return json{{"repo_id", r.repo_id},
                {"owner", r.owner},
                {"license", license_to_json(r.license)},
                {"stars", r.stars},
                {"commit_count", r.commit_count},
                {"test_file_count", r.test_file_count},
                {"files", std::move(files)}}
        .dump();
}

std::string to_json(const NaturalDoc& d) {
    return json{{"doc_id", d.doc_id}, {"content", d.content}, {"language", to_string(d.language)}}
        .dump();
}

std::string to_json(const TrainingSequence& s) {
    return json{{"token_count", s.tokens.size()},
                {"text_form", s.text_form},
                {"objective", to_string(s.objective)},
                {"mode", to_string(s.mode)},
                {"source_doc", s.source_doc}}
        .dump();
}

SourceFile parse_source_file(std::string_view line) {
    return source_file_from_json(parse_line(line));
}

Repository parse_repository(std::string_view line) {
    json j = parse_line(line);
    Repository r;
    r.repo_id = j.at("repo_id").get<std::string>();
    r.owner = j.at("owner").get<std::string>();
    r.license = license_from_json(j.at("license"));
    r.stars = j.at("stars").get<std::uint64_t>();
    r.commit_count = j.at("commit_count").get<std::uint64_t>();
    r.test_file_count = j.at("test_file_count").get<std::uint64_t>();
    for (const json& f : j.at("files")) r.files.push_back(source_file_from_json(f));
    return r;
}

NaturalDoc parse_natural_doc(std::string_view line) {
    json j = parse_line(line);
    NaturalDoc d;
    d.doc_id = j.at("doc_id").get<std::string>();
    d.content = j.at("content").get<std::string>();
    d.language = natural_language_from_string(j.at("language").get<std::string>());
    return d;
}

TrainingSequence parse_training_sequence(std::string_view line) {
    json j = parse_line(line);
    TrainingSequence s;
    s.text_form = j.at("text_form").get<std::string>();
    s.objective = objective_from_string(j.at("objective").get<std::string>());
    s.mode = mode_from_string(j.at("mode").get<std::string>());
    s.source_doc = j.at("source_doc").get<std::string>();
    // Token ids travel in the binary sidecar; only the count is in JSON.
    return s;
}

std::string to_json(const VerdictRecord& r) {
    return json{{"file", r.file}, {"keep", r.keep}, {"reasons", r.reasons}}.dump();
}

std::string to_json(const GateRecord& r) {
    return json{{"file", r.file}, {"verdict", r.verdict}, {"parse_ms", r.parse_ms}}.dump();
}

std::string to_json(const ClusterRecord& r) {
    return json{{"survivor", r.survivor},
                {"members", r.members},
                {"verified_jaccard", r.verified_jaccard}}
        .dump();
}

std::string to_json(const OrderingRecord& r) {
    return json{{"repo_id", r.repo_id}, {"strategy", r.strategy}, {"files", r.files}}.dump();
}

std::string to_json(const SignatureRecord& r) {
    json j{{"file", r.file},
           {"values", r.values},
           {"shingle_width", r.shingle_width},
           {"empty_input", r.empty_input}};
    if (r.has_shingles) j["shingles"] = r.shingles;
    return j.dump();
}

VerdictRecord parse_verdict(std::string_view line) {
    json j = parse_line(line);
    VerdictRecord r;
    r.file = j.at("file").get<std::string>();
    r.keep = j.at("keep").get<bool>();
    r.reasons = j.at("reasons").get<std::vector<std::string>>();
    return r;
}

GateRecord parse_gate(std::string_view line) {
    json j = parse_line(line);
    GateRecord r;
    r.file = j.at("file").get<std::string>();
    r.verdict = j.at("verdict").get<std::string>();
    r.parse_ms = j.at("parse_ms").get<double>();
    return r;
}

ClusterRecord parse_cluster(std::string_view line) {
    json j = parse_line(line);
    ClusterRecord r;
    r.survivor = j.at("survivor").get<std::string>();
    r.members = j.at("members").get<std::vector<std::string>>();
    r.verified_jaccard = j.at("verified_jaccard").get<std::vector<double>>();
    return r;
}

OrderingRecord parse_ordering(std::string_view line) {
    json j = parse_line(line);
    OrderingRecord r;
    r.repo_id = j.at("repo_id").get<std::string>();
    r.strategy = j.at("strategy").get<std::string>();
    r.files = j.at("files").get<std::vector<std::string>>();
    return r;
}

SignatureRecord parse_signature(std::string_view line) {
    json j = parse_line(line);
    SignatureRecord r;
    r.file = j.at("file").get<std::string>();
    r.values = j.at("values").get<std::vector<std::uint64_t>>();
    r.shingle_width = j.at("shingle_width").get<std::size_t>();
    r.empty_input = j.at("empty_input").get<bool>();
    if (j.contains("shingles")) {
        r.has_shingles = true;
        r.shingles = j.at("shingles").get<std::vector<std::uint64_t>>();
    }
    return r;
}

std::vector<std::string> read_lines(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open: " + path);
    std::vector<std::string> lines;
    std::string line;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!line.empty()) lines.push_back(line);
    }
    return lines;
}

void write_lines(const std::string& path, const std::vector<std::string>& lines) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write: " + path);
    for (const std::string& line : lines) {
        out << line << '\n';
    }
    if (!out) throw std::runtime_error("write failed: " + path);
}

void append_line(std::ostream& out, std::string_view line) {
    out << line << '\n';
}

}  // namespace cforge::jsonl
