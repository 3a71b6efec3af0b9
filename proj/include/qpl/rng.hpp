#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace qpl {

// splitmix64; used both as a seed mixer and to derive independent substreams.
inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

// Deterministic substream seed for (master seed, stream id, salt).
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream, std::uint64_t salt = 0) {
    std::uint64_t s = master;
    std::uint64_t a = splitmix64(s);
    s ^= stream * 0x9e3779b97f4a7c15ull + 0x243f6a8885a308d3ull;
    std::uint64_t b = splitmix64(s);
    s ^= salt * 0xd1b54a32d192ed03ull + 0x452821e638d01377ull;
    std::uint64_t c = splitmix64(s);
    return a ^ (b << 1) ^ c;
}

// All sampling goes through explicit transforms of mt19937_64 output, never
// through std::*_distribution, so that a given seed reproduces the identical
// stream on any standard library.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); }

    // uniform on (0, 1]; never returns 0 so log() is always safe
    double uniform() {
        return (static_cast<double>(engine_() >> 11) + 1.0) * 0x1.0p-53;
    }

    // uniform on [0, 1)
    double uniform_co() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return uniform_co() < p; }

    double exponential(double rate) { return -std::log(uniform()) / rate; }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double theta = 6.283185307179586476925286766559 * uniform_co();
        spare_ = r * std::sin(theta);
        have_spare_ = true;
        return r * std::cos(theta);
    }

    double normal(double mean, double sigma) { return mean + sigma * normal(); }

    // photon-scale Poisson counts (mean up to a few tens): inversion by
    // sequential search, exact and deterministic
    std::uint64_t poisson(double mean) {
        if (mean <= 0.0) return 0;
        const double u = uniform_co();
        double p = std::exp(-mean);
        double cum = p;
        std::uint64_t k = 0;
        while (u >= cum && k < 2000) {
            ++k;
            p *= mean / static_cast<double>(k);
            cum += p;
        }
        return k;
    }

    std::uint64_t binomial(std::uint64_t n, double p) {
        std::uint64_t k = 0;
        for (std::uint64_t i = 0; i < n; ++i)
            if (bernoulli(p)) ++k;
        return k;
    }

    // index of the next success in a Bernoulli(p) sequence starting at the
    // current position (geometric skip; lets window loops jump over empties)
    std::uint64_t geometric_skip(double p) {
        if (p >= 1.0) return 0;
        return static_cast<std::uint64_t>(std::log(uniform()) / std::log1p(-p));
    }

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

} // namespace qpl
