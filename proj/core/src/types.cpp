#include "cforge/types.hpp"

#include <algorithm>
#include <stdexcept>

namespace cforge {

namespace {

std::string ext_of(std::string_view path) {
    auto slash = path.find_last_of('/');
    std::string_view base = slash == std::string_view::npos ? path : path.substr(slash + 1);
    auto dot = base.find_last_of('.');
    if (dot == std::string_view::npos || dot == 0) return {};
    std::string ext(base.substr(dot + 1));
    std::transform(ext.begin(), ext.end(), ext.begin(),
                   [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return ext;
}

}  // namespace

std::string to_string(const LanguageTag& tag) {
    switch (tag.lang) {
        case Language::Java: return "Java";
        case Language::Python: return "Python";
        case Language::Cpp: return "Cpp";
        case Language::JavaScript: return "JavaScript";
        case Language::TypeScript: return "TypeScript";
        case Language::CSharp: return "CSharp";
        case Language::Other: return tag.other_tag.empty() ? "Other" : "Other(" + tag.other_tag + ")";
    }
    return "Other";
}

LanguageTag language_tag_from_string(std::string_view s) {
    if (s == "Java") return {Language::Java, {}};
    if (s == "Python") return {Language::Python, {}};
    if (s == "Cpp") return {Language::Cpp, {}};
    if (s == "JavaScript") return {Language::JavaScript, {}};
    if (s == "TypeScript") return {Language::TypeScript, {}};
    if (s == "CSharp") return {Language::CSharp, {}};
    if (s.rfind("Other(", 0) == 0 && s.back() == ')')
        return {Language::Other, std::string(s.substr(6, s.size() - 7))};
    return {Language::Other, {}};
}

LanguageTag language_from_path(std::string_view rel_path) {
    std::string ext = ext_of(rel_path);
    if (ext == "java") return {Language::Java, {}};
    if (ext == "py" || ext == "pyi") return {Language::Python, {}};
    if (ext == "cc" || ext == "cpp" || ext == "cxx" || ext == "c" || ext == "h" ||
        ext == "hh" || ext == "hpp" || ext == "hxx")
        return {Language::Cpp, {}};
    if (ext == "js" || ext == "mjs" || ext == "cjs") return {Language::JavaScript, {}};
    if (ext == "ts" || ext == "tsx") return {Language::TypeScript, {}};
    if (ext == "cs") return {Language::CSharp, {}};
    return {Language::Other, ext};
}

std::optional<std::string> normalize_rel_path(std::string_view path) {
    std::string p(path);
    std::replace(p.begin(), p.end(), '\\', '/');
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (start <= p.size()) {
        auto slash = p.find('/', start);
        std::string seg = slash == std::string::npos ? p.substr(start)
                                                     : p.substr(start, slash - start);
        if (seg == "..") return std::nullopt;
        if (!seg.empty() && seg != ".") parts.push_back(seg);
        if (slash == std::string::npos) break;
        start = slash + 1;
    }
    if (parts.empty()) return std::nullopt;
    std::string out = parts[0];
    for (std::size_t i = 1; i < parts.size(); ++i) out += "/" + parts[i];
    return out;
}

SourceFile make_source_file(std::string repo_id, std::string rel_path, std::string content) {
    auto norm = normalize_rel_path(rel_path);
    if (!norm) throw std::invalid_argument("bad rel_path: " + rel_path);
    if (!is_valid_utf8(content)) throw std::invalid_argument("not UTF-8: " + rel_path);
    SourceFile f;
    f.repo_id = std::move(repo_id);
    f.rel_path = std::move(*norm);
    f.language = language_from_path(f.rel_path);
    f.byte_len = content.size();
    f.content = std::move(content);
    return f;
}

NaturalLanguage detect_natural_language(std::string_view content) {
    std::size_t cjk = 0, ascii_alpha = 0, total = 0;
    std::size_t i = 0;
    while (i < content.size()) {
        unsigned char c = static_cast<unsigned char>(content[i]);
        if (c < 0x80) {
            if (std::isalpha(c)) ++ascii_alpha;
            ++total;
            ++i;
            continue;
        }
        // Decode just enough to spot CJK blocks (U+4E00..U+9FFF, U+3000..U+303F).
        std::uint32_t cp = 0;
        std::size_t len = 1;
        if ((c & 0xE0) == 0xC0 && i + 1 < content.size()) {
            cp = ((c & 0x1F) << 6) | (content[i + 1] & 0x3F);
            len = 2;
        } else if ((c & 0xF0) == 0xE0 && i + 2 < content.size()) {
            cp = ((c & 0x0F) << 12) | ((content[i + 1] & 0x3F) << 6) | (content[i + 2] & 0x3F);
            len = 3;
        } else if ((c & 0xF8) == 0xF0 && i + 3 < content.size()) {
            len = 4;
        }
        if ((cp >= 0x4E00 && cp <= 0x9FFF) || (cp >= 0x3000 && cp <= 0x303F)) ++cjk;
        ++total;
        i += len;
    }
    if (total == 0) return NaturalLanguage::Other;
    if (cjk * 10 >= total) return NaturalLanguage::Chinese;  // >=10% CJK
    if (ascii_alpha * 2 >= total) return NaturalLanguage::English;
    return NaturalLanguage::Other;
}

std::string to_string(Objective o) {
    switch (o) {
        case Objective::NTP: return "NTP";
        case Objective::FIM: return "FIM";
        case Objective::SFIM: return "SFIM";
    }
    return "NTP";
}

std::string to_string(SerializationMode m) {
    return m == SerializationMode::PSM ? "PSM" : "SPM";
}

Objective objective_from_string(std::string_view s) {
    if (s == "NTP") return Objective::NTP;
    if (s == "FIM") return Objective::FIM;
    if (s == "SFIM") return Objective::SFIM;
    throw std::invalid_argument("unknown objective: " + std::string(s));
}

SerializationMode mode_from_string(std::string_view s) {
    if (s == "PSM") return SerializationMode::PSM;
    if (s == "SPM") return SerializationMode::SPM;
    throw std::invalid_argument("unknown serialization mode: " + std::string(s));
}

std::string to_string(LicenseSource s) {
    switch (s) {
        case LicenseSource::DeclaredMetadata: return "DeclaredMetadata";
        case LicenseSource::DetectedFromText: return "DetectedFromText";
        case LicenseSource::Unknown: return "Unknown";
    }
    return "Unknown";
}

LicenseSource license_source_from_string(std::string_view s) {
    if (s == "DeclaredMetadata") return LicenseSource::DeclaredMetadata;
    if (s == "DetectedFromText") return LicenseSource::DetectedFromText;
    if (s == "Unknown") return LicenseSource::Unknown;
    throw std::invalid_argument("unknown license source: " + std::string(s));
}

std::string to_string(NaturalLanguage l) {
    switch (l) {
        case NaturalLanguage::English: return "English";
        case NaturalLanguage::Chinese: return "Chinese";
        case NaturalLanguage::Other: return "Other";
    }
    return "Other";
}

NaturalLanguage natural_language_from_string(std::string_view s) {
    if (s == "English") return NaturalLanguage::English;
    if (s == "Chinese") return NaturalLanguage::Chinese;
    if (s == "Other") return NaturalLanguage::Other;
    throw std::invalid_argument("unknown natural language: " + std::string(s));
}

bool spans_partition_document(const SpanSelection& s, std::size_t len) {
    if (s.prefix_range.begin != 0) return false;
    if (s.prefix_range.end != s.middle_range.begin) return false;
    if (s.middle_range.end != s.suffix_range.begin) return false;
    if (s.suffix_range.end != len) return false;
    if (s.prefix_range.begin > s.prefix_range.end) return false;
    if (s.middle_range.begin > s.middle_range.end) return false;
    if (s.suffix_range.begin > s.suffix_range.end) return false;
    if (s.objective != Objective::NTP && s.middle_range.empty() && len > 0) return false;
    return true;
}

}  // namespace cforge
