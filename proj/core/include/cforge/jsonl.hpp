#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "cforge/types.hpp"

namespace cforge::jsonl {

/// Canonical id used to reference a file across stage records.
std::string file_id(const SourceFile& f);
std::string file_id(std::string_view repo_id, std::string_view rel_path);

// Core interchange records. One JSON object per call, no trailing newline;
// field names match the type field names exactly.
std::string to_json(const SourceFile& f);
std::string to_json(const Repository& r);
std::string to_json(const NaturalDoc& d);
std::string to_json(const TrainingSequence& s);

SourceFile parse_source_file(std::string_view line);
Repository parse_repository(std::string_view line);
NaturalDoc parse_natural_doc(std::string_view line);
// Sequences round-trip text_form/objective/mode/source_doc; token ids
// live in the binary sidecar stream, JSON carries token_count only.
TrainingSequence parse_training_sequence(std::string_view line);

// Stage-output records.
struct VerdictRecord {
    std::string file;
    bool keep = true;
    std::vector<std::string> reasons;
};

struct GateRecord {
    std::string file;
    std::string verdict;  // "ok" | "syntax_error" | "timeout"
    double parse_ms = 0.0;
};

struct ClusterRecord {
    std::string survivor;
    std::vector<std::string> members;          // includes the survivor
    std::vector<double> verified_jaccard;      // parallel to members
};

struct OrderingRecord {
    std::string repo_id;
    std::string strategy;
    std::vector<std::string> files;  // rel_paths in emission order
};

struct SignatureRecord {
    std::string file;
    std::vector<std::uint64_t> values;
    std::size_t shingle_width = 0;
    bool empty_input = false;
    bool has_shingles = false;
    std::vector<std::uint64_t> shingles;  // sorted hash set, optional
};

std::string to_json(const VerdictRecord& r);
std::string to_json(const GateRecord& r);
std::string to_json(const ClusterRecord& r);
std::string to_json(const OrderingRecord& r);
std::string to_json(const SignatureRecord& r);

VerdictRecord parse_verdict(std::string_view line);
GateRecord parse_gate(std::string_view line);
ClusterRecord parse_cluster(std::string_view line);
OrderingRecord parse_ordering(std::string_view line);
SignatureRecord parse_signature(std::string_view line);

// Line-oriented IO. Readers skip blank lines; writers terminate every
// record with '\n'.
std::vector<std::string> read_lines(const std::string& path);
void write_lines(const std::string& path, const std::vector<std::string>& lines);
void append_line(std::ostream& out, std::string_view line);

template <typename T, typename Parser>
std::vector<T> read_records(const std::string& path, Parser parse) {
    std::vector<T> out;
    for (const std::string& line : read_lines(path)) out.push_back(parse(line));
    return out;
}

}  // namespace cforge::jsonl
