#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace pima {

// Deterministic, platform-independent random stream. mt19937_64 output is
// standardized; all distribution transforms are implemented here so the same
// (seed, stream_id) yields bit-identical draws everywhere.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id)
        : gen_(mix(mix(seed ^ 0x9e3779b97f4a7c15ull) ^ stream_id)) {}

    std::uint64_t next_u64() { return gen_(); }

    // Uniform in [0, 1), 53-bit resolution.
    double next_unit() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    // Exponential with the given rate (events per slot).
    double next_exponential(double rate) { return -std::log1p(-next_unit()) / rate; }

    bool next_bernoulli(double p) { return next_unit() < p; }

    // Inversion sampling; recursion keeps per-step pmf products away from underflow.
    int next_poisson(double mean) {
        if (mean <= 0) return 0;
        if (mean > 30) return next_poisson(mean / 2) + next_poisson(mean / 2);
        double u = next_unit();
        double p = std::exp(-mean);
        double cdf = p;
        int k = 0;
        while (u >= cdf && k < 4096) {
            ++k;
            p *= mean / k;
            cdf += p;
        }
        return k;
    }

private:
    static std::uint64_t mix(std::uint64_t z) {  // splitmix64 finalizer
        z += 0x9e3779b97f4a7c15ull;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        return z ^ (z >> 31);
    }

    std::mt19937_64 gen_;
};

inline RngStream rng_fork(std::uint64_t seed, std::uint64_t stream_id) {
    return RngStream(seed, stream_id);
}

}  // namespace pima
