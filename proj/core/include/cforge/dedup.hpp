#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "cforge/types.hpp"

namespace cforge {

inline constexpr std::size_t kMinHashPermutations = 256;

/// Tokens for shingling: maximal runs of non-whitespace, non-punctuation
/// bytes (bytes >= 0x80 count as token bytes).
std::vector<std::string> dedup_tokens(std::string_view text);

/// Sorted, deduplicated hashes of k-token shingles. Fewer than k tokens
/// shingle as a single window; no tokens -> empty set.
std::vector<std::uint64_t> shingle_hash_set(std::string_view text, std::size_t k);

struct MinHashSignature {
    std::array<std::uint64_t, kMinHashPermutations> values;
    std::size_t shingle_width = 0;
    bool empty_input = false;  // sentinel-maxima signature

    friend bool operator==(const MinHashSignature&, const MinHashSignature&) = default;
};

MinHashSignature minhash_signature(std::string_view text, std::size_t k, std::uint64_t seed);

/// Matching-coordinate fraction; the standard MinHash Jaccard estimator.
double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b);

/// Exact Jaccard over sorted unique hash sets. Two empty sets -> 1.0.
double exact_jaccard(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b);

struct DuplicateCluster {
    std::string survivor;
    std::vector<std::string> members;      // includes survivor, ascending ids
    std::vector<double> verified_jaccard;  // parallel to members; survivor -> 1.0
};

struct DedupResult {
    std::vector<std::size_t> survivor_indices;  // into the input, input order
    std::vector<DuplicateCluster> clusters;     // |members| >= 2 only
};

/// Byte-exact deduplication. Survivor of each identical group is the
/// lexicographically smallest (repo_id, rel_path).
DedupResult exact_dedup(const std::vector<SourceFile>& files);

struct NearDedupConfig {
    double threshold = 0.85;  // on exact Jaccard, strict >
    std::size_t shingle_width = 5;
    std::size_t bands = 32;
    std::size_t rows = 8;  // bands * rows must equal kMinHashPermutations
    std::uint64_t seed = 0;
};

/// MinHash/LSH candidate generation, exact-Jaccard verification, then
/// greedy reduction: every removed file has verified J > threshold with at
/// least one survivor, and no two survivors exceed the threshold.
DedupResult near_dedup(const std::vector<SourceFile>& files, const NearDedupConfig& cfg = {});

}  // namespace cforge
