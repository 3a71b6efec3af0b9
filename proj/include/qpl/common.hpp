#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

namespace qpl {

// Fundamental resolution of the modeled time-tagging device.
inline constexpr double kTickSeconds = 81e-12;
inline constexpr std::uint32_t kTickFemtoseconds = 81000;
inline constexpr double kSpeedOfLight = 299792458.0; // m/s

inline double ticks_to_seconds(std::int64_t ticks) { return static_cast<double>(ticks) * kTickSeconds; }

// FNV-1a, used for config hashes and manifest file digests.
inline std::uint64_t fnv1a(std::string_view data, std::uint64_t h = 0xcbf29ce484222325ull) {
    for (unsigned char c : data) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    return h;
}

struct Bracket {
    double lo = 0.0;
    double hi = 0.0;
    double f_lo = 0.0;
    double f_hi = 0.0;
    int iterations = 0;
    bool converged = false;
};

// Bisection on a sign change of f over [lo, hi]. The returned bracket is the
// certificate: f_lo and f_hi straddle zero and hi - lo <= tol on convergence.
inline Bracket bisect(const std::function<double(double)>& f, double lo, double hi,
                      double tol = 1e-6, int max_iter = 200) {
    Bracket b;
    b.lo = lo;
    b.hi = hi;
    b.f_lo = f(lo);
    b.f_hi = f(hi);
    if (b.f_lo == 0.0) { b.hi = lo; b.f_hi = b.f_lo; b.converged = true; return b; }
    if (b.f_hi == 0.0) { b.lo = hi; b.f_lo = b.f_hi; b.converged = true; return b; }
    if ((b.f_lo > 0.0) == (b.f_hi > 0.0))
        throw std::invalid_argument("bisect: no sign change over bracket");
    for (int i = 0; i < max_iter && (b.hi - b.lo) > tol; ++i) {
        const double mid = 0.5 * (b.lo + b.hi);
        const double fm = f(mid);
        ++b.iterations;
        if (fm == 0.0) { b.lo = b.hi = mid; b.f_lo = b.f_hi = fm; break; }
        if ((fm > 0.0) == (b.f_lo > 0.0)) {
            b.lo = mid;
            b.f_lo = fm;
        } else {
            b.hi = mid;
            b.f_hi = fm;
        }
    }
    b.converged = (b.hi - b.lo) <= tol;
    return b;
}

inline double bisect_root(const std::function<double(double)>& f, double lo, double hi,
                          double tol = 1e-6, int max_iter = 200) {
    const Bracket b = bisect(f, lo, hi, tol, max_iter);
    return 0.5 * (b.lo + b.hi);
}

// Composite Simpson rule on [a, b]; n is rounded up to an even panel count.
inline double simpson(const std::function<double(double)>& f, double a, double b, int n = 200) {
    if (n < 2) n = 2;
    if (n % 2) ++n;
    const double h = (b - a) / n;
    double s = f(a) + f(b);
    for (int i = 1; i < n; ++i) s += f(a + i * h) * (i % 2 ? 4.0 : 2.0);
    return s * h / 3.0;
}

// Golden-section minimizer for unimodal objectives.
inline double golden_minimize(const std::function<double(double)>& f, double lo, double hi,
                              double tol = 1e-9, int max_iter = 200) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double c = b - inv_phi * (b - a);
    double d = a + inv_phi * (b - a);
    double fc = f(c), fd = f(d);
    for (int i = 0; i < max_iter && (b - a) > tol * (1.0 + std::abs(a) + std::abs(b)); ++i) {
        if (fc < fd) {
            b = d; d = c; fd = fc;
            c = b - inv_phi * (b - a);
            fc = f(c);
        } else {
            a = c; c = d; fc = fd;
            d = a + inv_phi * (b - a);
            fd = f(d);
        }
    }
    return 0.5 * (a + b);
}

// Runs fn(shard_index) for shard_index in [0, n_shards) on up to `threads`
// workers and collects results in shard order, so the outcome is independent
// of the scheduling. threads <= 1 degrades to a plain loop.
template <typename T>
std::vector<T> run_sharded(std::size_t n_shards, unsigned threads, const std::function<T(std::size_t)>& fn) {
    std::vector<T> out(n_shards);
    if (threads <= 1 || n_shards <= 1) {
        for (std::size_t i = 0; i < n_shards; ++i) out[i] = fn(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= n_shards) return;
            out[i] = fn(i);
        }
    };
    std::vector<std::thread> pool;
    const unsigned n = std::min<std::size_t>(threads, n_shards);
    pool.reserve(n);
    for (unsigned t = 0; t < n; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
    return out;
}

inline double normal_cdf(double z) { return 0.5 * std::erfc(-z / std::sqrt(2.0)); }

} // namespace qpl
