#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>
#include <vector>

namespace ges {

/// splitmix64 finalizer.
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

/// Deterministic 64-bit generator (splitmix64). The project's only source of
/// randomness; results never depend on standard-library distribution
/// internals, so seeded runs reproduce across compilers.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        return mix64(z);
    }

    /// Uniform in [0, n), unbiased via rejection. n must be > 0.
    std::uint64_t next_below(std::uint64_t n) {
        const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        std::uint64_t x = next_u64();
        while (x >= limit) x = next_u64();
        return x % n;
    }

    /// Uniform double in (0, 1].
    double next_unit() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

    /// Standard normal via Box-Muller.
    double next_gaussian() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = next_unit();
        const double u2 = next_unit();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// Named seed derivation: every random stream in the project is keyed by
/// (root seed, component label, index) so any sub-result can be reproduced in
/// isolation.
inline std::uint64_t derive_seed(std::uint64_t root, std::string_view label, std::uint64_t index = 0) {
    std::uint64_t h = 0xCBF29CE484222325ULL; // FNV-1a over the label
    for (char c : label) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001B3ULL;
    }
    return mix64(mix64(root ^ h) ^ (index + 0x9E3779B97F4A7C15ULL));
}

/// Fisher-Yates shuffle of the identity permutation over [0, n).
inline std::vector<std::uint32_t> shuffled_indices(std::size_t n, std::uint64_t seed) {
    std::vector<std::uint32_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) idx[i] = static_cast<std::uint32_t>(i);
    Rng rng(seed);
    for (std::size_t i = n; i > 1; --i) {
        const std::size_t j = static_cast<std::size_t>(rng.next_below(i));
        std::swap(idx[i - 1], idx[j]);
    }
    return idx;
}

} // namespace ges
