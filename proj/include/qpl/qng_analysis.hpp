#pragma once

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "qpl/common.hpp"
#include "qpl/photon_stats.hpp"

namespace qpl {

struct QngVerdict {
    bool is_qng = false;
    double margin = 0.0;       // (2/3) P1^3 - P2+
    double sigma_margin = 0.0; // first-order propagation of the state errors
};

/// Sufficient quantum non-Gaussianity condition P2+ < (2/3) P1^3, evaluated
/// strictly. Valid for P2+ << 1.
inline QngVerdict qng_criterion(const StateModel& s) {
    validate_state(s);
    QngVerdict v;
    v.margin = (2.0 / 3.0) * s.p1 * s.p1 * s.p1 - s.p2plus;
    const double dp1 = 2.0 * s.p1 * s.p1 * s.sigma_p1;
    v.sigma_margin = std::sqrt(dp1 * dp1 + s.sigma_p2plus * s.sigma_p2plus);
    v.is_qng = v.margin > 0.0;
    return v;
}

/// Three-point surrogate distribution for a state model, with all
/// multiphoton mass placed at the given photon number (2 by default; 3 is
/// the pessimistic variant used for sensitivity reporting).
inline PhotonNumberDistribution surrogate_distribution(const StateModel& s, int multiphoton_n = 2) {
    if (multiphoton_n < 2) throw std::invalid_argument("surrogate: multiphoton level must be >= 2");
    validate_state(s);
    std::vector<double> w(static_cast<std::size_t>(multiphoton_n) + 1, 0.0);
    w[0] = std::max(0.0, s.p0);
    w[1] = std::max(0.0, s.p1);
    w[static_cast<std::size_t>(multiphoton_n)] = std::max(0.0, s.p2plus);
    return PhotonNumberDistribution(std::move(w));
}

inline double margin_after_loss(const StateModel& s, double eta, int multiphoton_n = 2) {
    const auto transformed = apply_loss(surrogate_distribution(s, multiphoton_n), eta);
    return qng_criterion(to_state_model(transformed)).margin;
}

struct QngDepthResult {
    double depth = 0.0;               // maximal tolerable loss 1 - eta_min
    double eta_min = 1.0;             // bisection solution on the exact transform
    double eta_min_closed_form = 1.0; // 3 P2+ / (2 P1^3), first-order check
    double depth_n3 = 0.0;            // pessimistic surrogate with mass at n = 3
    Bracket bracket;
};

/// Maximal optical loss under which the criterion still holds. Solved by
/// bisection on the transmission with the exact binomial transform of the
/// surrogate state; the first-order closed form is reported alongside.
inline QngDepthResult qng_depth_loss(const StateModel& s) {
    QngDepthResult r;
    if (!qng_criterion(s).is_qng) return r; // non-QNG input: depth 0
    r.eta_min_closed_form = (s.p2plus <= 0.0)
                                ? 0.0
                                : std::min(1.0, 3.0 * s.p2plus / (2.0 * s.p1 * s.p1 * s.p1));
    auto solve = [&](int mp_n) {
        // margin(eta) > 0 at eta = 1; for P2+ > 0 it turns negative as eta -> 0
        if (s.p2plus <= 0.0) return 0.0; // survives all loss
        const double f_low = margin_after_loss(s, 1e-12, mp_n);
        if (f_low > 0.0) return 0.0;
        Bracket b = bisect([&](double eta) { return margin_after_loss(s, eta, mp_n); }, 1e-12, 1.0, 1e-6);
        if (mp_n == 2) r.bracket = b;
        return 0.5 * (b.lo + b.hi);
    };
    r.eta_min = solve(2);
    r.depth = 1.0 - r.eta_min;
    r.depth_n3 = 1.0 - solve(3);
    return r;
}

/// Where the thermal mean is accounted: "detected" references the thermal
/// photon flux after the unbalanced splitter (what the detectors see),
/// "source" references the flux entering its reflective port.
enum class NsrConvention { detected, source };

inline double nsr_value(double thermal_mean, double transmission, double p1_signal,
                        NsrConvention conv, double occupancy_windows = 1.0) {
    const double p_th = (conv == NsrConvention::detected ? (1.0 - transmission) * thermal_mean : thermal_mean) *
                        occupancy_windows;
    return p_th / p1_signal;
}

struct TrajectoryPoint {
    double control = 0.0; // thermal mean (or transmission for loss scans)
    double p1 = 0.0;
    double p2plus = 0.0;
    double margin = 0.0;
    double nsr = 0.0;
};

/// State model after mixing the state surrogate with thermal light of mean
/// mu on a beamsplitter of the given transmission, for each grid value.
inline std::vector<TrajectoryPoint> thermal_trajectory(const StateModel& s,
                                                       const std::vector<double>& thermal_means,
                                                       double transmission = 0.9,
                                                       NsrConvention conv = NsrConvention::detected,
                                                       double occupancy_windows = 1.0) {
    if (transmission <= 0.0 || transmission > 1.0)
        throw std::invalid_argument("thermal_trajectory: transmission must lie in (0,1]");
    const auto sur = surrogate_distribution(s);
    std::vector<TrajectoryPoint> out;
    out.reserve(thermal_means.size());
    for (double mu : thermal_means) {
        const auto mixed = to_state_model(mix_incoherent(sur, transmission, make_thermal(mu)));
        TrajectoryPoint p;
        p.control = mu;
        p.p1 = mixed.p1;
        p.p2plus = mixed.p2plus;
        p.margin = qng_criterion(mixed).margin;
        p.nsr = nsr_value(mu, transmission, s.p1, conv, occupancy_windows);
        out.push_back(p);
    }
    return out;
}

inline std::vector<TrajectoryPoint> loss_trajectory(const StateModel& s, const std::vector<double>& etas) {
    std::vector<TrajectoryPoint> out;
    out.reserve(etas.size());
    for (double eta : etas) {
        const auto attenuated = to_state_model(apply_loss(surrogate_distribution(s), eta));
        out.push_back({eta, attenuated.p1, attenuated.p2plus, qng_criterion(attenuated).margin, 0.0});
    }
    return out;
}

struct NsrThresholdResult {
    double nsr = std::numeric_limits<double>::infinity();
    double thermal_mean = std::numeric_limits<double>::infinity();
    bool unbounded = false;
    Bracket bracket;
};

/// Thermal mean at which the mixed state stops satisfying the criterion,
/// reported as noise-to-signal ratio in the chosen convention. Bisection on
/// mu with an expanding upper bracket; if no violation is found the result
/// is flagged unbounded.
inline NsrThresholdResult nsr_threshold(const StateModel& s, double transmission = 0.9,
                                        NsrConvention conv = NsrConvention::detected,
                                        double occupancy_windows = 1.0) {
    if (transmission <= 0.0 || transmission > 1.0)
        throw std::invalid_argument("nsr_threshold: transmission must lie in (0,1]");
    const auto sur = surrogate_distribution(s);
    auto margin_at = [&](double mu) {
        return qng_criterion(to_state_model(mix_incoherent(sur, transmission, make_thermal(mu)))).margin;
    };
    if (margin_at(0.0) <= 0.0)
        throw std::invalid_argument("nsr_threshold: state is not QNG after splitter loss");
    NsrThresholdResult r;
    double hi = 1e-6;
    int expansions = 0;
    while (margin_at(hi) > 0.0) {
        hi *= 2.0;
        if (++expansions > 60) { // thermal means beyond any physical regime
            r.unbounded = true;
            return r;
        }
    }
    const double tol = std::min(1e-6, hi * 1e-6 + 1e-12);
    r.bracket = bisect(margin_at, expansions == 0 ? 0.0 : hi / 2.0, hi, tol);
    r.thermal_mean = 0.5 * (r.bracket.lo + r.bracket.hi);
    r.nsr = nsr_value(r.thermal_mean, transmission, s.p1, conv, occupancy_windows);
    return r;
}

} // namespace qpl
