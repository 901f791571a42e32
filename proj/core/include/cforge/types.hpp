#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cforge/text.hpp"

namespace cforge {

enum class Language {
    Java,
    Python,
    Cpp,
    JavaScript,
    TypeScript,
    CSharp,
    Other,
};

/// Language tag; `other_tag` carries the extension when language == Other.
struct LanguageTag {
    Language lang = Language::Other;
    std::string other_tag;

    friend bool operator==(const LanguageTag&, const LanguageTag&) = default;
};

std::string to_string(const LanguageTag& tag);
LanguageTag language_tag_from_string(std::string_view s);
LanguageTag language_from_path(std::string_view rel_path);

enum class LicenseSource { DeclaredMetadata, DetectedFromText, Unknown };

std::string to_string(LicenseSource s);
LicenseSource license_source_from_string(std::string_view s);

struct LicenseVerdict {
    std::string spdx_id = "Unknown";
    bool permissive = false;
    LicenseSource source = LicenseSource::Unknown;

    friend bool operator==(const LicenseVerdict&, const LicenseVerdict&) = default;
};

struct SourceFile {
    std::string repo_id;
    std::string rel_path;
    std::string content;
    LanguageTag language;
    std::size_t byte_len = 0;
};

/// Builds a SourceFile with byte_len and language derived, rel_path
/// normalized. Throws std::invalid_argument on a path escaping the repo
/// root or invalid UTF-8 content.
SourceFile make_source_file(std::string repo_id, std::string rel_path, std::string content);

/// Normalizes separators, strips leading "./" and rejects "..".
/// Returns std::nullopt when the path cannot be made repo-relative.
std::optional<std::string> normalize_rel_path(std::string_view path);

struct Repository {
    std::string repo_id;
    std::string owner;
    LicenseVerdict license;
    std::uint64_t stars = 0;
    std::uint64_t commit_count = 0;
    std::uint64_t test_file_count = 0;
    std::vector<SourceFile> files;
};

enum class NaturalLanguage { English, Chinese, Other };

struct NaturalDoc {
    std::string doc_id;
    std::string content;
    NaturalLanguage language = NaturalLanguage::Other;
};

NaturalLanguage detect_natural_language(std::string_view content);
std::string to_string(NaturalLanguage l);
NaturalLanguage natural_language_from_string(std::string_view s);

enum class Objective { NTP, FIM, SFIM };
enum class SerializationMode { PSM, SPM };

std::string to_string(Objective o);
std::string to_string(SerializationMode m);
Objective objective_from_string(std::string_view s);
SerializationMode mode_from_string(std::string_view s);

/// A prefix/middle/suffix split of one document. The three ranges
/// partition [0, len) exactly in order; for NTP the middle is the whole
/// document and prefix/suffix are empty.
struct SpanSelection {
    std::string doc_ref;
    CharRange prefix_range;
    CharRange middle_range;
    CharRange suffix_range;
    Objective objective = Objective::NTP;
    SerializationMode mode = SerializationMode::PSM;
    std::string span_meta;  // syntax node kind, SFIM only
};

/// Checks the partition invariant against a document of `len` bytes.
bool spans_partition_document(const SpanSelection& s, std::size_t len);

struct TrainingSequence {
    std::vector<std::uint32_t> tokens;
    std::string text_form;
    Objective objective = Objective::NTP;
    SerializationMode mode = SerializationMode::PSM;
    std::string source_doc;
};

constexpr std::size_t kDefaultMaxContext = 32768;

}  // namespace cforge
