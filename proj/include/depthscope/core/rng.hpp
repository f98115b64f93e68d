#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace depthscope {

/// Deterministic random stream. All randomness in the toolkit flows from one
/// u64 seed split into named streams (init, shuffle, augment, rrelu, ...), so
/// adding a consumer does not perturb the draws seen by the others.
///
/// Distributions are hand-rolled on top of mt19937_64 because the standard
/// library's distribution objects are implementation-defined; this keeps runs
/// byte-reproducible across toolchains.
class RngStream {
public:
    explicit RngStream(uint64_t seed) : engine_(seed) {}

    static uint64_t splitmix64(uint64_t x) {
        x += 0x9e3779b97f4a7c15ULL;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
        return x ^ (x >> 31);
    }

    static uint64_t hash_name(std::string_view name) {
        uint64_t h = 0xcbf29ce484222325ULL;  // FNV-1a
        for (char ch : name) {
            h ^= static_cast<unsigned char>(ch);
            h *= 0x100000001b3ULL;
        }
        return h;
    }

    /// Stream for a named consumer under a root seed.
    static RngStream named(uint64_t root_seed, std::string_view name) {
        return RngStream(splitmix64(root_seed ^ hash_name(name)));
    }

    uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 bits of mantissa.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer in [0, n).
    uint64_t uniform_index(uint64_t n) {
        // Rejection sampling keeps the draw unbiased.
        uint64_t limit = UINT64_MAX - UINT64_MAX % n;
        uint64_t x;
        do {
            x = engine_();
        } while (x >= limit);
        return x % n;
    }

    /// Standard normal via Box-Muller (one value per call, no caching so the
    /// stream position is a pure function of the call count).
    double normal() {
        double u1 = uniform();
        double u2 = uniform();
        while (u1 <= 0.0) u1 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.14159265358979323846 * u2);
    }

    template <typename It>
    void shuffle(It first, It last) {
        auto n = static_cast<uint64_t>(last - first);
        for (uint64_t i = n; i > 1; --i) {
            uint64_t j = uniform_index(i);
            std::swap(first[i - 1], first[j]);
        }
    }

private:
    std::mt19937_64 engine_;
};

}  // namespace depthscope
