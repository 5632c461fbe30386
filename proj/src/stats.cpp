#include "riskdyn/stats.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "riskdyn/errors.hpp"

namespace riskdyn {

namespace {

// Regularized lower incomplete gamma by its power series; converges fast for
// x < a + 1.
double gamma_p_series(double a, double x) {
    double term = 1.0 / a;
    double sum = term;
    for (int n = 1; n < 1000; ++n) {
        term *= x / (a + n);
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * 1e-16)
            return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw NumericalError("incomplete gamma series did not converge");
}

// Regularized upper incomplete gamma by the Lentz continued fraction;
// converges fast for x >= a + 1.
double gamma_q_cont_frac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int n = 1; n < 1000; ++n) {
        double an = -n * (n - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < 1e-16)
            return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
    }
    throw NumericalError("incomplete gamma continued fraction did not converge");
}

} // namespace

double gamma_p(double a, double x) {
    if (!(a > 0.0) || !std::isfinite(a)) throw NumericalError("gamma_p: a must be > 0");
    if (std::isnan(x) || x < 0.0) throw NumericalError("gamma_p: x must be >= 0");
    if (x == 0.0) return 0.0;
    if (std::isinf(x)) return 1.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_cont_frac(a, x);
}

double gamma_q(double a, double x) {
    if (!(a > 0.0) || !std::isfinite(a)) throw NumericalError("gamma_q: a must be > 0");
    if (std::isnan(x) || x < 0.0) throw NumericalError("gamma_q: x must be >= 0");
    if (x == 0.0) return 1.0;
    if (std::isinf(x)) return 0.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cont_frac(a, x);
}

double chi2_sf(double x, int k) {
    if (k < 1) throw NumericalError("chi2_sf: degrees of freedom must be >= 1");
    if (std::isnan(x)) throw NumericalError("chi2_sf: x is NaN");
    if (x <= 0.0) return 1.0;
    return gamma_q(0.5 * k, 0.5 * x);
}

LinearFit ols(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ValidationError("ols: x and y differ in length");
    const std::size_t n = x.size();
    if (n < 2) throw ValidationError("ols: need at least two points");
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx, dy = y[i] - my;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw ValidationError("ols: x values are all identical");
    LinearFit fit;
    fit.slope = sxy / sxx;
    fit.intercept = my - fit.slope * mx;
    fit.r_squared = syy == 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
    return fit;
}

} // namespace riskdyn
