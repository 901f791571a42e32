#include "cforge/filters.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <stdexcept>

#include "cforge/text.hpp"

namespace cforge {

namespace {

const char* kGeneratedMarkers[] = {
    "generated by",
    "do not edit",
    "autogenerated",
    "auto-generated",
    "automatically generated",
    "@generated",
    "code generated",
    "this file is generated",
};

bool looks_auto_generated(std::string_view content) {
    // Only the first 10 lines are considered.
    std::size_t end = 0;
    std::size_t lines = 0;
    while (end < content.size() && lines < 10) {
        if (content[end] == '\n') ++lines;
        ++end;
    }
    std::string head;
    head.reserve(end);
    for (std::size_t i = 0; i < end; ++i)
        head.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(content[i]))));
    for (const char* marker : kGeneratedMarkers)
        if (head.find(marker) != std::string::npos) return true;
    return false;
}

bool is_control_byte(unsigned char c) {
    return (c < 0x20 && c != '\n' && c != '\r' && c != '\t' && c != '\f' && c != '\v') || c == 0x7F;
}

}  // namespace

std::string to_string(FileReason r) {
    switch (r) {
        case FileReason::Empty: return "Empty";
        case FileReason::Corrupted: return "Corrupted";
        case FileReason::NonText: return "NonText";
        case FileReason::AutoGenerated: return "AutoGenerated";
        case FileReason::LongLine: return "LongLine";
        case FileReason::TooManyLines: return "TooManyLines";
        case FileReason::TooLarge: return "TooLarge";
    }
    return "?";
}

FileVerdict filter_file(const SourceFile& file, const FileFilterConfig& cfg) {
    FileVerdict v;
    const std::string& content = file.content;

    bool only_ws = true;
    for (char c : content) {
        if (!std::isspace(static_cast<unsigned char>(c))) {
            only_ws = false;
            break;
        }
    }
    if (only_ws) v.reasons.insert(FileReason::Empty);

    std::size_t control = 0;
    bool has_nul = false;
    for (char ch : content) {
        unsigned char c = static_cast<unsigned char>(ch);
        if (c == 0) has_nul = true;
        if (is_control_byte(c)) ++control;
    }
    bool utf8_ok = is_valid_utf8(content);
    if (!utf8_ok ||
        (!content.empty() &&
         static_cast<double>(control) / static_cast<double>(content.size()) >
             cfg.max_control_fraction))
        v.reasons.insert(FileReason::NonText);
    // U+FFFD in the stream means an earlier decode already lost bytes.
    if (has_nul || content.find("\xEF\xBF\xBD") != std::string::npos)
        v.reasons.insert(FileReason::Corrupted);

    if (looks_auto_generated(content)) v.reasons.insert(FileReason::AutoGenerated);

    // Line metrics over codepoints, thresholds strict (">" = "exceeds").
    std::size_t line_chars = 0;
    std::size_t line_count = 0;
    bool long_line = false;
    std::size_t i = 0;
    while (i < content.size()) {
        unsigned char c = static_cast<unsigned char>(content[i]);
        if (c == '\n') {
            ++line_count;
            if (line_chars > cfg.max_line_chars) long_line = true;
            line_chars = 0;
            ++i;
            continue;
        }
        std::size_t adv = 1;
        if (utf8_ok) {
            if ((c & 0xE0) == 0xC0) adv = 2;
            else if ((c & 0xF0) == 0xE0) adv = 3;
            else if ((c & 0xF8) == 0xF0) adv = 4;
        }
        ++line_chars;
        i += adv;
    }
    if (line_chars > 0) {
        ++line_count;
        if (line_chars > cfg.max_line_chars) long_line = true;
    }
    if (long_line) v.reasons.insert(FileReason::LongLine);
    if (line_count > cfg.max_lines) v.reasons.insert(FileReason::TooManyLines);
    if (content.size() > cfg.max_bytes) v.reasons.insert(FileReason::TooLarge);

    v.keep = v.reasons.empty();
    return v;
}

double repo_score(const Repository& repo, const RepoScoreWeights& w) {
    return w.stars * std::log1p(static_cast<double>(repo.stars)) +
           w.commits * std::log1p(static_cast<double>(repo.commit_count)) +
           w.test_files * std::log1p(static_cast<double>(repo.test_file_count));
}

std::vector<Repository> score_and_prune_repos(std::vector<Repository> repos,
                                              const RepoScoreWeights& weights,
                                              double prune_fraction) {
    if (prune_fraction < 0.0 || prune_fraction >= 1.0)
        throw std::invalid_argument("prune_fraction must be in [0, 1)");
    if (repos.empty()) return repos;

    std::stable_sort(repos.begin(), repos.end(), [&](const Repository& a, const Repository& b) {
        double sa = repo_score(a, weights);
        double sb = repo_score(b, weights);
        if (sa != sb) return sa > sb;
        return a.repo_id < b.repo_id;
    });
    std::size_t remove = static_cast<std::size_t>(
        std::floor(prune_fraction * static_cast<double>(repos.size())));
    repos.resize(repos.size() - remove);
    return repos;
}

}  // namespace cforge
