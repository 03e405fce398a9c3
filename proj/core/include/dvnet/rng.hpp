#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace dvnet {

/// SplitMix64 generator. Chosen over the platform default engines so that
/// seeded outputs are identical on every platform and toolchain; the
/// constants below are the reference ones (Steele, Lea, Flood 2014).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next_u64() {
        std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1), 53-bit resolution.
    double next_double() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi).
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * next_double();
    }

    /// Uniform integer in [0, n). n must be > 0.
    std::uint64_t below(std::uint64_t n) {
        // multiply-shift; bias is < 2^-64 * n, irrelevant at our scales
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    /// Rayleigh(sigma) variate via inverse CDF.
    double rayleigh(double sigma) {
        double u = next_double();            // [0,1)
        return sigma * std::sqrt(-2.0 * std::log1p(-u));
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    std::uint64_t state_;
};

/// Derived stream seed: master ^ index, the convention used everywhere a
/// batch of independent seeded jobs (samples, trees, repeats) is spawned.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
    return master ^ index;
}

}  // namespace dvnet
