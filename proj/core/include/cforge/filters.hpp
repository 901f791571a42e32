#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "cforge/types.hpp"

namespace cforge {

enum class FileReason {
    Empty,
    Corrupted,
    NonText,
    AutoGenerated,
    LongLine,
    TooManyLines,
    TooLarge,
};

std::string to_string(FileReason r);

struct FileVerdict {
    bool keep = true;
    std::set<FileReason> reasons;
};

struct FileFilterConfig {
    std::size_t max_line_chars = 1000;       // drop when a line exceeds this
    std::size_t max_lines = 10000;           // drop when line count exceeds this
    std::size_t max_bytes = 1048576;         // drop when byte size exceeds this
    double max_control_fraction = 0.05;      // NonText above this
};

/// File-level quality gate. All thresholds are strict: a file is dropped
/// only when it exceeds the limit, and keep == reasons.empty().
FileVerdict filter_file(const SourceFile& file, const FileFilterConfig& cfg = {});

struct RepoScoreWeights {
    double stars = 1.0;
    double commits = 1.0;
    double test_files = 1.0;
};

double repo_score(const Repository& repo, const RepoScoreWeights& w = {});

/// Sorts descending by score (ties by repo_id ascending) and removes the
/// floor(prune_fraction * N) lowest-scoring repositories.
std::vector<Repository> score_and_prune_repos(std::vector<Repository> repos,
                                              const RepoScoreWeights& weights = {},
                                              double prune_fraction = 0.10);

}  // namespace cforge
