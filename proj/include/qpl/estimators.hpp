#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "qpl/photon_stats.hpp"

namespace qpl {

/// Per-herald click ratios of a two-detector (HBT) measurement.
/// r1/r2: click probability on detector a/b, rc: both, r00: neither.
struct ClickProbabilities {
    double r1 = 0.0;
    double r2 = 0.0;
    double rc = 0.0;
    double r00 = 0.0;
    double sigma_r1 = 0.0;
    double sigma_r2 = 0.0;
    double sigma_rc = 0.0;
    std::uint64_t n_heralds = 0;
};

struct HbtTallies {
    std::uint64_t n_heralds = 0;
    std::uint64_t n_a = 0;
    std::uint64_t n_b = 0;
    std::uint64_t n_ab = 0;
};

inline double binomial_sigma(double r, std::uint64_t n) {
    return std::sqrt(std::max(0.0, r * (1.0 - r)) / static_cast<double>(n));
}

inline ClickProbabilities click_probs(const HbtTallies& t) {
    if (t.n_heralds == 0) throw std::invalid_argument("click_probs: zero heralds");
    if (t.n_ab > std::min(t.n_a, t.n_b) || std::max(t.n_a, t.n_b) > t.n_heralds)
        throw std::invalid_argument("click_probs: inconsistent tallies");
    const double n = static_cast<double>(t.n_heralds);
    ClickProbabilities cp;
    cp.n_heralds = t.n_heralds;
    cp.r1 = static_cast<double>(t.n_a) / n;
    cp.r2 = static_cast<double>(t.n_b) / n;
    cp.rc = static_cast<double>(t.n_ab) / n;
    cp.r00 = 1.0 - cp.r1 - cp.r2 + cp.rc;
    cp.sigma_r1 = binomial_sigma(cp.r1, t.n_heralds);
    cp.sigma_r2 = binomial_sigma(cp.r2, t.n_heralds);
    cp.sigma_rc = binomial_sigma(cp.rc, t.n_heralds);
    return cp;
}

/// Exact click probabilities for a photon-number distribution split onto two
/// click detectors. Per photon: reaches detector a with probability
/// split*eta_a, detector b with (1-split)*eta_b. Evaluated through the
/// probability generating function, so no sampling error (sigmas are zero).
inline ClickProbabilities exact_click_probs(const PhotonNumberDistribution& dist,
                                            double eta_a = 1.0, double eta_b = 1.0, double split = 0.5) {
    if (split < 0.0 || split > 1.0) throw std::invalid_argument("exact_click_probs: split must lie in [0,1]");
    if (eta_a < 0.0 || eta_a > 1.0 || eta_b < 0.0 || eta_b > 1.0)
        throw std::invalid_argument("exact_click_probs: efficiencies must lie in [0,1]");
    const double sa = split * eta_a;
    const double sb = (1.0 - split) * eta_b;
    const double p_no_a = dist.pgf(1.0 - sa);
    const double p_no_b = dist.pgf(1.0 - sb);
    const double p_no_ab = dist.pgf(1.0 - sa - sb);
    ClickProbabilities cp;
    cp.r1 = 1.0 - p_no_a;
    cp.r2 = 1.0 - p_no_b;
    cp.rc = 1.0 - p_no_a - p_no_b + p_no_ab;
    cp.r00 = p_no_ab;
    return cp;
}

struct StateEstimate {
    StateModel state;
    bool clipped = false; // estimator left [0,1] and was clamped; large-P2+ bias regime
};

/// Invert the 50:50 splitting statistics to first order in the multiphoton
/// probability: P2+ = 2 rc, P1 = r1 + r2 - 2 rc. Exact for states supported
/// on n <= 1; overestimates P1 when P2+ is large (the two-photon example in
/// the tests shows the size of that bias).
inline StateEstimate estimate_state(const ClickProbabilities& cp) {
    StateEstimate est;
    double p2 = 2.0 * cp.rc;
    double p1 = cp.r1 + cp.r2 - 2.0 * cp.rc;
    const bool clip = p2 < 0.0 || p2 > 1.0 || p1 < 0.0 || p1 > 1.0 || p1 + p2 > 1.0;
    p2 = std::clamp(p2, 0.0, 1.0);
    p1 = std::clamp(p1, 0.0, 1.0 - p2);
    est.state.p2plus = p2;
    est.state.p1 = p1;
    est.state.p0 = 1.0 - p1 - p2;
    est.state.sigma_p2plus = 2.0 * cp.sigma_rc;
    est.state.sigma_p1 =
        std::sqrt(cp.sigma_r1 * cp.sigma_r1 + cp.sigma_r2 * cp.sigma_r2 + 4.0 * cp.sigma_rc * cp.sigma_rc);
    est.clipped = clip;
    return est;
}

struct ValueWithSigma {
    double value = 0.0;
    double sigma = 0.0;
};

/// alpha = rc / (r1 r2): 1 for coherent light, 2 for thermal, 0 for a single
/// photon; insensitive to balanced loss.
inline ValueWithSigma alpha(const ClickProbabilities& cp) {
    if (cp.r1 <= 0.0 || cp.r2 <= 0.0) throw std::domain_error("alpha: undefined without singles");
    ValueWithSigma v;
    v.value = cp.rc / (cp.r1 * cp.r2);
    if (cp.rc > 0.0) {
        v.sigma = v.value * std::sqrt(std::pow(cp.sigma_rc / cp.rc, 2) + std::pow(cp.sigma_r1 / cp.r1, 2) +
                                      std::pow(cp.sigma_r2 / cp.r2, 2));
    } else {
        v.sigma = cp.sigma_rc / (cp.r1 * cp.r2);
    }
    return v;
}

/// Nonclassicality witness D = P0 - sqrt(P00), with P0 symmetrized as the
/// geometric mean of the two per-detector no-click probabilities. Zero for
/// any Poissonian field, positive for sub-Poissonian light.
inline ValueWithSigma witness_d(const ClickProbabilities& cp) {
    const double q1 = 1.0 - cp.r1;
    const double q2 = 1.0 - cp.r2;
    if (q1 < 0.0 || q2 < 0.0 || cp.r00 < 0.0) throw std::invalid_argument("witness_d: invalid probabilities");
    ValueWithSigma v;
    const double gm = std::sqrt(q1 * q2);
    v.value = gm - std::sqrt(cp.r00);
    // first-order propagation; r00 shares the same counts, treated independent
    double var = 0.0;
    if (gm > 0.0) {
        var += std::pow(0.5 * gm / q1 * cp.sigma_r1, 2);
        var += std::pow(0.5 * gm / q2 * cp.sigma_r2, 2);
    }
    if (cp.r00 > 0.0) {
        const double s00 = std::sqrt(cp.sigma_r1 * cp.sigma_r1 + cp.sigma_r2 * cp.sigma_r2 +
                                     cp.sigma_rc * cp.sigma_rc);
        var += std::pow(0.5 / std::sqrt(cp.r00) * s00, 2);
    }
    v.sigma = std::sqrt(var);
    return v;
}

/// Two-photon coupling efficiency: coincidence rate over herald rate.
inline double eta_2ph(double coincidence_rate, double herald_rate) {
    if (herald_rate <= 0.0) throw std::domain_error("eta_2ph: herald rate must be positive");
    return std::clamp(coincidence_rate / herald_rate, 0.0, 1.0);
}

/// Run a measurement procedure k times and report sample mean and single
/// standard deviation per quantity, the error-bar convention used for the
/// repeated-acquisition datasets.
inline std::pair<std::vector<double>, std::vector<double>>
repeat_std(const std::function<std::vector<double>(int)>& procedure, int k = 5) {
    if (k < 2) throw std::invalid_argument("repeat_std: needs at least two repetitions");
    std::vector<std::vector<double>> runs;
    runs.reserve(k);
    for (int i = 0; i < k; ++i) runs.push_back(procedure(i));
    const std::size_t m = runs.front().size();
    for (const auto& r : runs)
        if (r.size() != m) throw std::invalid_argument("repeat_std: inconsistent result sizes");
    std::vector<double> mean(m, 0.0), sd(m, 0.0);
    for (const auto& r : runs)
        for (std::size_t j = 0; j < m; ++j) mean[j] += r[j];
    for (auto& x : mean) x /= k;
    for (const auto& r : runs)
        for (std::size_t j = 0; j < m; ++j) sd[j] += (r[j] - mean[j]) * (r[j] - mean[j]);
    for (auto& x : sd) x = std::sqrt(x / (k - 1));
    return {mean, sd};
}

} // namespace qpl
