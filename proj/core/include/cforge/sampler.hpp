#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cforge/rng.hpp"
#include "cforge/types.hpp"

namespace cforge {

enum class OrderStrategy { ContentSim, PathSim, DepGraph, Random };

std::string to_string(OrderStrategy s);
OrderStrategy order_strategy_from_string(std::string_view s);

struct StrategyDraw {
    OrderStrategy strategy = OrderStrategy::Random;
    double draw = 0.0;  // in [0, 1)
};

/// draw < 0.3 -> ContentSim; < 0.6 -> PathSim; < 0.9 -> DepGraph; else Random.
StrategyDraw choose_strategy(RandomStream& rng);

/// File-level import graph. Edges run dependent -> dependency; successors
/// of a node are the files it depends on. No self-edges.
struct DependencyGraph {
    std::vector<std::vector<std::size_t>> successors;
    std::vector<std::vector<std::size_t>> predecessors;
};

DependencyGraph build_dependency_graph(const std::vector<SourceFile>& files);

/// TF-IDF over code-token unigrams: tf = raw count,
/// idf = log((1+N)/(1+df)) + 1, vectors L2-normalized.
struct SparseVector {
    std::vector<std::pair<std::uint32_t, double>> entries;  // term id asc
};

std::vector<SparseVector> tfidf_vectors(const std::vector<std::string_view>& docs);

/// Seeded k-means++-style init, squared-Euclidean, at most 50 iterations.
/// Returns one cluster id in [0, k) per point. Requires 1 <= k <= |points|.
std::vector<std::size_t> kmeans_assign(const std::vector<SparseVector>& points, std::size_t k,
                                       RandomStream& rng);

/// The orderings return a permutation of [0, |files|) as indices.
/// forced_k pins the cluster count (tests); the production path draws
/// clusterNum = min(uniform_int(1,20), |files|).
std::vector<std::size_t> order_by_content(const std::vector<SourceFile>& files, RandomStream& rng,
                                          std::optional<std::size_t> forced_k = std::nullopt);
std::vector<std::size_t> order_by_path(const std::vector<SourceFile>& files, RandomStream& rng);
std::vector<std::size_t> order_by_deps(const std::vector<SourceFile>& files, RandomStream& rng);
std::vector<std::size_t> random_order(std::size_t count, RandomStream& rng);

struct OrderedRepo {
    StrategyDraw strategy;
    std::vector<std::size_t> order;  // indices into repo.files
};

OrderedRepo order_files(const Repository& repo, RandomStream& rng);

}  // namespace cforge
