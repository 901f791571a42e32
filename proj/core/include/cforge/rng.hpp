#pragma once

#include <cassert>
#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

#include "cforge/hash.hpp"

namespace cforge {

/// Deterministic random stream. The engine (mt19937_64) is specified
/// bit-exactly by the standard; the distribution helpers below are our
/// own because the std distributions are implementation-defined and
/// would break cross-platform reproducibility.
///
/// Every pipeline stage derives a sub-stream keyed by (stage name,
/// item id), so worker scheduling can never change what an item draws.
class RandomStream {
public:
    explicit RandomStream(std::uint64_t seed) : engine_(splitmix64(seed)), seed_(seed) {}

    std::uint64_t seed() const { return seed_; }

    /// Sub-stream for one item of one stage.
    RandomStream derive(std::string_view stage, std::string_view item_id) const {
        std::uint64_t h = hash_combine(seed_, hash_bytes(stage));
        h = hash_combine(h, hash_bytes(item_id));
        return RandomStream(h);
    }

    RandomStream derive(std::string_view stage, std::uint64_t item) const {
        std::uint64_t h = hash_combine(seed_, hash_bytes(stage));
        h = hash_combine(h, splitmix64(item));
        return RandomStream(h);
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform double in [0, 1), 53 bits of entropy.
    double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    /// Uniform integer in [lo, hi], both ends inclusive.
    std::uint64_t uniform_int(std::uint64_t lo, std::uint64_t hi) {
        assert(lo <= hi);
        std::uint64_t span = hi - lo + 1;
        if (span == 0) return next_u64();  // full 64-bit range
        // Rejection sampling to kill modulo bias.
        std::uint64_t limit = UINT64_MAX - UINT64_MAX % span;
        std::uint64_t x = next_u64();
        while (x >= limit) x = next_u64();
        return lo + x % span;
    }

    /// Uniform index in [0, n); n must be > 0.
    std::size_t index(std::size_t n) {
        assert(n > 0);
        return static_cast<std::size_t>(uniform_int(0, n - 1));
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = index(i);
            using std::swap;
            swap(v[i - 1], v[j]);
        }
    }

private:
    std::mt19937_64 engine_;
    std::uint64_t seed_;
};

inline RandomStream seeded_rng(std::uint64_t seed) { return RandomStream(seed); }

}  // namespace cforge
