// Independent numerical oracles used by the unit and acceptance tests.
// Each one recomputes a quantity the library also produces, by a different
// route (matrix powers, fixed points, quadrature, bisection), so agreement
// is evidence rather than tautology.
#pragma once

#include <array>
#include <cmath>
#include <stdexcept>

namespace oracles {

/// Stationary active probability of the 2-state chain with activation
/// probability p01 and continuation probability p11, obtained by repeated
/// squaring of the transition matrix until the rows coincide.
inline double two_state_stationary_power(double p01, double p11) {
    // row-stochastic transitions: row 0 = inactive, row 1 = active
    std::array<double, 4> m = {1.0 - p01, p01, 1.0 - p11, p11};
    for (int iter = 0; iter < 200; ++iter) {
        std::array<double, 4> s;
        s[0] = m[0] * m[0] + m[1] * m[2];
        s[1] = m[0] * m[1] + m[1] * m[3];
        s[2] = m[2] * m[0] + m[3] * m[2];
        s[3] = m[2] * m[1] + m[3] * m[3];
        // renormalize each row against drift
        s[0] = s[0] / (s[0] + s[1]);
        s[1] = 1.0 - s[0];
        s[2] = s[2] / (s[2] + s[3]);
        s[3] = 1.0 - s[2];
        const double gap = std::abs(s[1] - s[3]);
        m = s;
        if (gap < 1e-16) break;
    }
    return 0.5 * (m[1] + m[3]);
}

/// Probability that a cascade from a single active source ever reaches one
/// inactive neighbor, with source continuation q and influence probability e
/// per step. Fixed-point iteration on the one-step recursion: the target
/// activates off the previous state, so a hit can land on the very step the
/// source dies.
inline double two_node_hit_fixed_point(double q, double e) {
    double h = 0.0;
    for (int iter = 0; iter < 100000; ++iter) {
        const double next = e + (1.0 - e) * q * h;
        if (std::abs(next - h) < 1e-17) return next;
        h = next;
    }
    return h;
}

/// Simpson's rule on a fixed grid.
template <typename F>
double simpson(F f, double lo, double hi, int intervals) {
    if (intervals % 2) ++intervals;
    const double h = (hi - lo) / intervals;
    double acc = f(lo) + f(hi);
    for (int i = 1; i < intervals; ++i) acc += f(lo + h * i) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

/// Upper tail of the chi-square distribution with k degrees of freedom via
/// quadrature of the density (lgamma from the C library, no shared code with
/// the incomplete-gamma implementation under test).
inline double chi2_sf_simpson(double x, int k) {
    if (x <= 0.0) return 1.0;
    const double half_k = 0.5 * k;
    const double log_norm = half_k * std::log(2.0) + std::lgamma(half_k);
    auto pdf = [&](double t) {
        if (t <= 0.0) return 0.0;
        return std::exp((half_k - 1.0) * std::log(t) - 0.5 * t - log_norm);
    };
    // integrate [x, far]; the density beyond x + 60 sqrt(2k) + 60 is negligible
    const double far = x + 60.0 * std::sqrt(2.0 * k) + 60.0;
    return simpson(pdf, x, far, 200000);
}

/// Root in [0, 1] of the homogeneous stationary condition
/// lam_s (1-s) - lam_r s + lam_E s (1-s) = 0 by bisection.
inline double homogeneous_root_bisect(double lam_s, double lam_r, double lam_E) {
    auto f = [&](double s) { return lam_s * (1.0 - s) - lam_r * s + lam_E * s * (1.0 - s); };
    double lo = 0.0, hi = 1.0;
    if (f(lo) < 0.0) return 0.0;
    if (f(hi) > 0.0) throw std::logic_error("no sign change in [0,1]");
    for (int iter = 0; iter < 200; ++iter) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) >= 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

/// |phat - p| measured in binomial standard errors (using the true p).
inline double binomial_z(double phat, double p, double n) {
    const double se = std::sqrt(p * (1.0 - p) / n);
    if (se == 0.0) return phat == p ? 0.0 : 1e300;
    return std::abs(phat - p) / se;
}

} // namespace oracles
