#pragma once

#include <cstddef>
#include <vector>

namespace riskdyn {

/// Regularized lower incomplete gamma P(a, x), a > 0, x >= 0.
double gamma_p(double a, double x);

/// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double gamma_q(double a, double x);

/// Chi-square upper-tail probability with k degrees of freedom,
/// Pr[X >= x] = Q(k/2, x/2). x < 0 returns 1.
double chi2_sf(double x, int k);

struct LinearFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r_squared = 0.0;
};

/// Ordinary least squares of y on x. Requires x.size() == y.size() >= 2
/// and non-constant x.
LinearFit ols(const std::vector<double>& x, const std::vector<double>& y);

} // namespace riskdyn
