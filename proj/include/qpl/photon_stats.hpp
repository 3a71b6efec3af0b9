#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

#include "qpl/rng.hpp"

namespace qpl {

/// Finite photon-number distribution P_0..P_nmax. Construction validates,
/// renormalizes and records the neglected tail mass of the generating
/// truncation so downstream consumers can see how exact the value is.
class PhotonNumberDistribution {
public:
    static constexpr double kDefaultTailTolerance = 1e-12;

    explicit PhotonNumberDistribution(std::vector<double> weights, double truncation_error = 0.0)
        : probs_(std::move(weights)), truncation_error_(truncation_error) {
        if (probs_.empty()) throw std::invalid_argument("distribution must have at least P0");
        double sum = 0.0;
        for (double w : probs_) {
            if (!(w >= 0.0) || !std::isfinite(w))
                throw std::invalid_argument("probabilities must be finite and non-negative");
            sum += w;
        }
        if (sum <= 0.0) throw std::invalid_argument("probabilities must not all vanish");
        for (double& w : probs_) w /= sum;
        while (probs_.size() > 1 && probs_.back() == 0.0) probs_.pop_back();
    }

    std::size_t n_max() const { return probs_.size() - 1; }
    double p(std::size_t n) const { return n < probs_.size() ? probs_[n] : 0.0; }
    std::span<const double> probs() const { return probs_; }
    double truncation_error() const { return truncation_error_; }

    double mean() const {
        double m = 0.0;
        for (std::size_t n = 1; n < probs_.size(); ++n) m += static_cast<double>(n) * probs_[n];
        return m;
    }

    // <n(n-1)>
    double second_factorial_moment() const {
        double m = 0.0;
        for (std::size_t n = 2; n < probs_.size(); ++n)
            m += static_cast<double>(n) * static_cast<double>(n - 1) * probs_[n];
        return m;
    }

    // E[base^n]; the workhorse behind click probabilities
    double pgf(double base) const {
        double acc = 0.0;
        double pw = 1.0;
        for (std::size_t n = 0; n < probs_.size(); ++n) {
            acc += probs_[n] * pw;
            pw *= base;
        }
        return acc;
    }

private:
    std::vector<double> probs_;
    double truncation_error_;
};

/// Eq.-style three-level summary of a near-single-photon state.
struct StateModel {
    double p0 = 0.0;
    double p1 = 0.0;
    double p2plus = 0.0;
    double sigma_p1 = 0.0;
    double sigma_p2plus = 0.0;
};

inline void validate_state(const StateModel& s, double tol = 1e-9) {
    const double sum = s.p0 + s.p1 + s.p2plus;
    if (std::abs(sum - 1.0) > tol) throw std::invalid_argument("state probabilities must sum to 1");
    for (double p : {s.p0, s.p1, s.p2plus})
        if (p < -tol || p > 1.0 + tol) throw std::invalid_argument("state probabilities must lie in [0,1]");
}

inline PhotonNumberDistribution make_fock(int n) {
    if (n < 0) throw std::invalid_argument("fock: photon number must be non-negative");
    std::vector<double> w(static_cast<std::size_t>(n) + 1, 0.0);
    w.back() = 1.0;
    return PhotonNumberDistribution(std::move(w));
}

inline PhotonNumberDistribution make_vacuum() { return make_fock(0); }

/// Bose-Einstein distribution P_n = mu^n / (1+mu)^(n+1), truncated so the
/// neglected tail is below tail_tol.
inline PhotonNumberDistribution make_thermal(double mean,
                                             double tail_tol = PhotonNumberDistribution::kDefaultTailTolerance) {
    if (mean < 0.0) throw std::invalid_argument("thermal: mean must be non-negative");
    if (mean == 0.0) return make_vacuum();
    const double q = mean / (1.0 + mean);
    // tail mass beyond N is q^(N+1)
    const std::size_t n_max = std::max<std::size_t>(
        4, static_cast<std::size_t>(std::ceil(std::log(tail_tol) / std::log(q))));
    std::vector<double> w;
    w.reserve(n_max + 1);
    double term = 1.0 / (1.0 + mean);
    for (std::size_t n = 0; n <= n_max; ++n) {
        w.push_back(term);
        term *= q;
    }
    return PhotonNumberDistribution(std::move(w), std::pow(q, static_cast<double>(n_max) + 1.0));
}

inline PhotonNumberDistribution make_poisson(double mean,
                                             double tail_tol = PhotonNumberDistribution::kDefaultTailTolerance) {
    if (mean < 0.0) throw std::invalid_argument("poisson: mean must be non-negative");
    if (mean == 0.0) return make_vacuum();
    std::vector<double> w;
    double term = std::exp(-mean);
    double cum = 0.0;
    std::size_t n = 0;
    while (cum < 1.0 - tail_tol || static_cast<double>(n) < mean + 2.0) {
        w.push_back(term);
        cum += term;
        ++n;
        term *= mean / static_cast<double>(n);
        if (n > 4000) break;
    }
    return PhotonNumberDistribution(std::move(w), std::max(0.0, 1.0 - cum));
}

/// Signal-mode distribution of a two-mode squeezed vacuum conditioned on a
/// click of a non-number-resolving herald detector with the given efficiency:
///   P(n | click) = (1-lambda) lambda^n (1 - (1-eta)^n) / P(click).
inline PhotonNumberDistribution make_heralded_tmsv(double pair_prob, double herald_efficiency,
                                                   double tail_tol = PhotonNumberDistribution::kDefaultTailTolerance) {
    if (pair_prob < 0.0 || pair_prob >= 1.0)
        throw std::invalid_argument("heralded_tmsv: pair probability must lie in [0,1)");
    if (herald_efficiency <= 0.0 || herald_efficiency > 1.0)
        throw std::invalid_argument("heralded_tmsv: herald efficiency must lie in (0,1]");
    if (pair_prob == 0.0) return make_fock(1); // limiting conditional state
    const std::size_t n_max = std::max<std::size_t>(
        4, static_cast<std::size_t>(std::ceil(std::log(tail_tol) / std::log(pair_prob))));
    std::vector<double> w(n_max + 1, 0.0);
    const double miss = 1.0 - herald_efficiency;
    double geo = 1.0 - pair_prob;
    double miss_pow = 1.0;
    for (std::size_t n = 0; n <= n_max; ++n) {
        w[n] = geo * (1.0 - miss_pow);
        geo *= pair_prob;
        miss_pow *= miss;
    }
    return PhotonNumberDistribution(std::move(w), std::pow(pair_prob, static_cast<double>(n_max) + 1.0));
}

/// Binomial loss channel: each photon independently survives with
/// probability eta.
inline PhotonNumberDistribution apply_loss(const PhotonNumberDistribution& dist, double eta) {
    if (eta < 0.0 || eta > 1.0) throw std::invalid_argument("apply_loss: transmission must lie in [0,1]");
    if (eta == 1.0) return dist;
    if (eta == 0.0) return make_vacuum();
    const auto src = dist.probs();
    std::vector<double> out(src.size(), 0.0);
    for (std::size_t n = 0; n < src.size(); ++n) {
        if (src[n] == 0.0) continue;
        // binomial pmf over k successes out of n, built iteratively
        double pk = std::pow(1.0 - eta, static_cast<double>(n)); // k = 0
        for (std::size_t k = 0; k <= n; ++k) {
            out[k] += src[n] * pk;
            pk *= (static_cast<double>(n - k) / static_cast<double>(k + 1)) * (eta / (1.0 - eta));
        }
    }
    return PhotonNumberDistribution(std::move(out), dist.truncation_error());
}

/// Convolution of two photon-number distributions (independent modes merged
/// onto one detector path).
inline PhotonNumberDistribution convolve(const PhotonNumberDistribution& a, const PhotonNumberDistribution& b) {
    const auto pa = a.probs();
    const auto pb = b.probs();
    std::vector<double> out(pa.size() + pb.size() - 1, 0.0);
    for (std::size_t i = 0; i < pa.size(); ++i) {
        if (pa[i] == 0.0) continue;
        for (std::size_t j = 0; j < pb.size(); ++j) out[i + j] += pa[i] * pb[j];
    }
    return PhotonNumberDistribution(std::move(out), a.truncation_error() + b.truncation_error());
}

/// Phase-insensitive beamsplitter: the signal is thinned to t, the noise to
/// 1-t, and the surviving photon numbers add. Valid for mutually incoherent
/// fields, which is the regime modeled throughout.
inline PhotonNumberDistribution mix_incoherent(const PhotonNumberDistribution& signal, double transmission,
                                               const PhotonNumberDistribution& noise) {
    if (transmission < 0.0 || transmission > 1.0)
        throw std::invalid_argument("mix_incoherent: transmission must lie in [0,1]");
    return convolve(apply_loss(signal, transmission), apply_loss(noise, 1.0 - transmission));
}

/// Normalized zero-delay intensity correlation <n(n-1)> / <n>^2.
inline double g2_zero(const PhotonNumberDistribution& dist) {
    const double m = dist.mean();
    if (m <= 0.0) throw std::domain_error("g2_zero: undefined for zero-mean distribution");
    return dist.second_factorial_moment() / (m * m);
}

inline StateModel to_state_model(const PhotonNumberDistribution& dist) {
    StateModel s;
    s.p0 = dist.p(0);
    s.p1 = dist.p(1);
    s.p2plus = 0.0;
    for (std::size_t n = 2; n <= dist.n_max(); ++n) s.p2plus += dist.p(n);
    return s;
}

/// Mixture (convex combination) of two distributions.
inline PhotonNumberDistribution mixture(const PhotonNumberDistribution& a, double weight_a,
                                        const PhotonNumberDistribution& b) {
    if (weight_a < 0.0 || weight_a > 1.0) throw std::invalid_argument("mixture: weight must lie in [0,1]");
    std::vector<double> out(std::max(a.probs().size(), b.probs().size()), 0.0);
    for (std::size_t n = 0; n < out.size(); ++n)
        out[n] = weight_a * a.p(n) + (1.0 - weight_a) * b.p(n);
    return PhotonNumberDistribution(std::move(out),
                                    weight_a * a.truncation_error() + (1.0 - weight_a) * b.truncation_error());
}

/// Draw a photon number from the distribution (inverse CDF).
inline std::size_t sample(const PhotonNumberDistribution& dist, Rng& rng) {
    const double u = rng.uniform_co();
    double cum = 0.0;
    const auto p = dist.probs();
    for (std::size_t n = 0; n < p.size(); ++n) {
        cum += p[n];
        if (u < cum) return n;
    }
    return dist.n_max();
}

} // namespace qpl
