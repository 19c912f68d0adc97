#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace refine_search {

/// Seeded generator with platform-independent derived draws. The standard
/// distributions are implementation-defined, so traces would differ across
/// standard libraries if we used them.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    /// Uniform in [0, 1) with 53 bits of precision.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform in [0, n). Rejection sampling keeps it unbiased.
    std::uint64_t index(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % n);
        std::uint64_t x = engine_();
        while (x >= limit) x = engine_();
        return x % n;
    }

    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::mt19937_64 engine_;
};

/// FNV-1a; used to derive per-task seeds that do not depend on run order.
constexpr std::uint64_t stable_hash(std::string_view text, std::uint64_t h = 0xcbf29ce484222325ULL) {
    for (const char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

constexpr std::uint64_t derive_seed(std::uint64_t base, std::string_view salt) {
    std::uint64_t z = stable_hash(salt) ^ (base + 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace refine_search
