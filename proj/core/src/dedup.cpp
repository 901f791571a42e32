#include "cforge/dedup.hpp"

#include <algorithm>
#include <cctype>
#include <limits>
#include <map>
#include <numeric>
#include <stdexcept>
#include <unordered_map>

#include "cforge/hash.hpp"
#include "cforge/jsonl.hpp"

namespace cforge {

namespace {

bool is_token_byte(unsigned char c) {
    if (c >= 0x80) return true;
    return std::isalnum(c) != 0 || c == '_';
}

struct UnionFind {
    std::vector<std::size_t> parent;

    explicit UnionFind(std::size_t n) : parent(n) {
        std::iota(parent.begin(), parent.end(), std::size_t{0});
    }
    std::size_t find(std::size_t x) {
        while (parent[x] != x) {
            parent[x] = parent[parent[x]];
            x = parent[x];
        }
        return x;
    }
    void unite(std::size_t a, std::size_t b) {
        a = find(a);
        b = find(b);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
    }
};

std::array<std::uint64_t, kMinHashPermutations> permutation_seeds(std::uint64_t seed) {
    std::array<std::uint64_t, kMinHashPermutations> seeds;
    for (std::size_t i = 0; i < kMinHashPermutations; ++i)
        seeds[i] = splitmix64(seed + i);
    return seeds;
}

}  // namespace

std::vector<std::string> dedup_tokens(std::string_view text) {
    std::vector<std::string> tokens;
    std::size_t i = 0;
    while (i < text.size()) {
        if (!is_token_byte(static_cast<unsigned char>(text[i]))) {
            ++i;
            continue;
        }
        std::size_t begin = i;
        while (i < text.size() && is_token_byte(static_cast<unsigned char>(text[i]))) ++i;
        tokens.emplace_back(text.substr(begin, i - begin));
    }
    return tokens;
}

std::vector<std::uint64_t> shingle_hash_set(std::string_view text, std::size_t k) {
    if (k == 0) throw std::invalid_argument("shingle width must be positive");
    std::vector<std::string> tokens = dedup_tokens(text);
    if (tokens.empty()) return {};

    std::vector<std::uint64_t> token_hashes;
    token_hashes.reserve(tokens.size());
    for (const std::string& t : tokens) token_hashes.push_back(hash_bytes(t));

    std::vector<std::uint64_t> shingles;
    if (tokens.size() < k) {
        std::uint64_t h = 0x5368696e676c65ULL;
        for (std::uint64_t th : token_hashes) h = hash_combine(h, th);
        shingles.push_back(h);
    } else {
        shingles.reserve(tokens.size() - k + 1);
        for (std::size_t i = 0; i + k <= tokens.size(); ++i) {
            std::uint64_t h = 0x5368696e676c65ULL;
            for (std::size_t j = 0; j < k; ++j) h = hash_combine(h, token_hashes[i + j]);
            shingles.push_back(h);
        }
    }
    std::sort(shingles.begin(), shingles.end());
    shingles.erase(std::unique(shingles.begin(), shingles.end()), shingles.end());
    return shingles;
}

MinHashSignature minhash_signature(std::string_view text, std::size_t k, std::uint64_t seed) {
    MinHashSignature sig;
    sig.shingle_width = k;
    sig.values.fill(std::numeric_limits<std::uint64_t>::max());

    std::vector<std::uint64_t> shingles = shingle_hash_set(text, k);
    if (shingles.empty()) {
        sig.empty_input = true;
        return sig;
    }
    const auto seeds = permutation_seeds(seed);
    for (std::uint64_t s : shingles) {
        for (std::size_t i = 0; i < kMinHashPermutations; ++i) {
            std::uint64_t h = splitmix64(s ^ seeds[i]);
            if (h < sig.values[i]) sig.values[i] = h;
        }
    }
    return sig;
}

double estimate_jaccard(const MinHashSignature& a, const MinHashSignature& b) {
    std::size_t matches = 0;
    for (std::size_t i = 0; i < kMinHashPermutations; ++i) {
        if (a.values[i] == b.values[i]) ++matches;
    }
    return static_cast<double>(matches) / static_cast<double>(kMinHashPermutations);
}

double exact_jaccard(const std::vector<std::uint64_t>& a, const std::vector<std::uint64_t>& b) {
    if (a.empty() && b.empty()) return 1.0;
    std::size_t inter = 0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i] == b[j]) {
            ++inter;
            ++i;
            ++j;
        } else if (a[i] < b[j]) {
            ++i;
        } else {
            ++j;
        }
    }
    std::size_t uni = a.size() + b.size() - inter;
    return static_cast<double>(inter) / static_cast<double>(uni);
}

DedupResult exact_dedup(const std::vector<SourceFile>& files) {
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> by_hash;
    for (std::size_t i = 0; i < files.size(); ++i)
        by_hash[hash_bytes(files[i].content)].push_back(i);

    auto key_of = [&](std::size_t i) {
        return std::pair<const std::string&, const std::string&>(files[i].repo_id,
                                                                 files[i].rel_path);
    };

    std::vector<bool> removed(files.size(), false);
    std::map<std::string, DuplicateCluster> clusters;  // keyed by survivor id
    for (auto& [h, group] : by_hash) {
        if (group.size() < 2) continue;
        // Hash equality is not byte equality; split the group.
        std::vector<std::vector<std::size_t>> exact_groups;
        for (std::size_t idx : group) {
            bool placed = false;
            for (auto& eg : exact_groups) {
                if (files[eg.front()].content == files[idx].content) {
                    eg.push_back(idx);
                    placed = true;
                    break;
                }
            }
            if (!placed) exact_groups.push_back({idx});
        }
        for (auto& eg : exact_groups) {
            if (eg.size() < 2) continue;
            std::sort(eg.begin(), eg.end(),
                      [&](std::size_t a, std::size_t b) { return key_of(a) < key_of(b); });
            std::size_t survivor = eg.front();
            DuplicateCluster c;
            c.survivor = jsonl::file_id(files[survivor]);
            for (std::size_t idx : eg) {
                c.members.push_back(jsonl::file_id(files[idx]));
                c.verified_jaccard.push_back(1.0);
                if (idx != survivor) removed[idx] = true;
            }
            clusters.emplace(c.survivor, std::move(c));
        }
    }

    DedupResult result;
    for (std::size_t i = 0; i < files.size(); ++i) {
        if (!removed[i]) result.survivor_indices.push_back(i);
    }
    for (auto& [id, c] : clusters) result.clusters.push_back(std::move(c));
    return result;
}

DedupResult near_dedup(const std::vector<SourceFile>& files, const NearDedupConfig& cfg) {
    if (cfg.bands * cfg.rows != kMinHashPermutations)
        throw std::invalid_argument("bands*rows must equal 256");
    if (cfg.threshold <= 0.0 || cfg.threshold >= 1.0)
        throw std::invalid_argument("dedup threshold must lie in (0,1)");

    const std::size_t n = files.size();
    std::vector<MinHashSignature> sigs(n);
    std::vector<std::vector<std::uint64_t>> shingles(n);
    for (std::size_t i = 0; i < n; ++i) {
        shingles[i] = shingle_hash_set(files[i].content, cfg.shingle_width);
        sigs[i] = minhash_signature(files[i].content, cfg.shingle_width, cfg.seed);
    }

    // LSH: same band content -> candidate pair. Empty files never link.
    UnionFind uf(n);
    std::vector<std::vector<std::size_t>> adjacency(n);
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
    std::vector<std::pair<std::size_t, std::size_t>> candidates;
    for (std::size_t band = 0; band < cfg.bands; ++band) {
        buckets.clear();
        for (std::size_t i = 0; i < n; ++i) {
            if (sigs[i].empty_input) continue;
            std::uint64_t key = hash_bytes("band") + band;
            for (std::size_t r = 0; r < cfg.rows; ++r)
                key = hash_combine(key, sigs[i].values[band * cfg.rows + r]);
            buckets[key].push_back(i);
        }
        for (auto& [key, bucket] : buckets) {
            for (std::size_t a = 0; a + 1 < bucket.size(); ++a) {
                for (std::size_t b = a + 1; b < bucket.size(); ++b)
                    candidates.emplace_back(bucket[a], bucket[b]);
            }
        }
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());

    for (auto [a, b] : candidates) {
        if (exact_jaccard(shingles[a], shingles[b]) > cfg.threshold) {
            uf.unite(a, b);
            adjacency[a].push_back(b);
            adjacency[b].push_back(a);
        }
    }

    std::map<std::size_t, std::vector<std::size_t>> components;
    for (std::size_t i = 0; i < n; ++i) {
        if (!adjacency[i].empty()) components[uf.find(i)].push_back(i);
    }

    std::vector<bool> removed(n, false);
    std::map<std::string, DuplicateCluster> clusters;
    for (auto& [root, comp] : components) {
        std::vector<std::size_t> order = comp;
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
            return jsonl::file_id(files[a]) < jsonl::file_id(files[b]);
        });
        std::vector<std::size_t> survivors;
        // cover[s] = removed members charged to survivor s, with their J
        std::map<std::size_t, std::vector<std::pair<std::size_t, double>>> cover;
        for (std::size_t idx : order) {
            std::size_t best_survivor = n;
            double best_j = -1.0;
            for (std::size_t s : survivors) {
                double j = exact_jaccard(shingles[idx], shingles[s]);
                if (j > cfg.threshold && j > best_j) {
                    best_j = j;
                    best_survivor = s;
                }
            }
            if (best_survivor == n) {
                survivors.push_back(idx);
            } else {
                removed[idx] = true;
                cover[best_survivor].emplace_back(idx, best_j);
            }
        }
        for (auto& [s, members] : cover) {
            DuplicateCluster c;
            c.survivor = jsonl::file_id(files[s]);
            c.members.push_back(c.survivor);
            c.verified_jaccard.push_back(1.0);
            std::sort(members.begin(), members.end(),
                      [&](const auto& a, const auto& b) {
                          return jsonl::file_id(files[a.first]) < jsonl::file_id(files[b.first]);
                      });
            for (auto& [idx, j] : members) {
                c.members.push_back(jsonl::file_id(files[idx]));
                c.verified_jaccard.push_back(j);
            }
            clusters.emplace(c.survivor, std::move(c));
        }
    }

    DedupResult result;
    for (std::size_t i = 0; i < n; ++i) {
        if (!removed[i]) result.survivor_indices.push_back(i);
    }
    for (auto& [id, c] : clusters) result.clusters.push_back(std::move(c));
    return result;
}

}  // namespace cforge
