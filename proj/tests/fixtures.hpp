#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "cforge/types.hpp"

namespace fixtures {

// Generated source with `count` top-level functions in the requested
// language. `salt` varies identifiers so files stay dissimilar.
std::string function_file(cforge::Language lang, std::size_t count, std::size_t salt);

// One file per supported language, 60 functions each (240 total).
std::vector<cforge::SourceFile> sfim_function_files();

struct DedupCorpus {
    std::vector<cforge::SourceFile> files;  // 200 files
    // Indices into `files` of the 20 planted near-duplicate pairs.
    std::vector<std::pair<std::size_t, std::size_t>> planted;
};

// 200-file corpus: 20 near-duplicate pairs (shingle Jaccard >= 0.90 by
// construction) plus 160 mutually dissimilar files.
DedupCorpus dedup_corpus();

// Writes the 10-repo, 4-language fixture corpus used by the end-to-end
// checks. Contents are fully deterministic. Repo 9 carries a
// non-permissive license; repo 8 contains an exact duplicate pair.
void write_fixture_corpus(const std::filesystem::path& root);

// Small held-out corpus (2 repos) for benchmark mining.
void write_holdout_corpus(const std::filesystem::path& root);

}  // namespace fixtures
