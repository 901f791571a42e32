#pragma once

#include <cstdint>
#include <string_view>

namespace cforge {

// Platform-stable 64-bit hashing. std::hash gives no cross-platform
// guarantee, so every hash that reaches disk or seeds an RNG goes
// through these.

constexpr std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) {
    return splitmix64(a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2)));
}

// FNV-1a with a splitmix finalizer.
constexpr std::uint64_t hash_bytes(std::string_view data, std::uint64_t seed = 0) {
    std::uint64_t h = 0xcbf29ce484222325ULL ^ seed;
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return splitmix64(h);
}

}  // namespace cforge
