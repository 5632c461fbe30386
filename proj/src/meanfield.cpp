#include "riskdyn/meanfield.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "riskdyn/errors.hpp"

namespace riskdyn {

namespace {

constexpr double kBoundEps = 1e-9;
constexpr int kMaxHalvings = 20;
constexpr double kDamping = 0.5;
constexpr int kMaxFixedPointIters = 10000;

void require_finite_rates(const DerivedRates& rates, const char* who) {
    for (int i = 0; i < rates.size(); ++i) {
        if (!std::isfinite(rates.lambda_int()[i]) || !std::isfinite(rates.lambda_rec()[i]))
            throw ValidationError(std::string(who) + ": intensities must be finite");
        for (int j : rates.neighbors(i))
            if (!std::isfinite(rates.lambda_ext()(j, i)))
                throw ValidationError(std::string(who) + ": intensities must be finite");
    }
}

// RHS of the activation ODE for one component.
double rhs(const DerivedRates& rates, const std::vector<double>& s, int i) {
    double in = 0.0;
    for (int j : rates.neighbors(i)) in += rates.lambda_ext()(j, i) * s[j];
    return rates.lambda_int()[i] * (1.0 - s[i]) - rates.lambda_rec()[i] * s[i] +
           (1.0 - s[i]) * in;
}

void rhs_all(const DerivedRates& rates, const std::vector<double>& s, std::vector<double>& out) {
    for (int i = 0; i < rates.size(); ++i) out[i] = rhs(rates, s, i);
}

} // namespace

void validate_meanfield_state(const MeanFieldState& state, int n) {
    if (static_cast<int>(state.s.size()) != n)
        throw ValidationError("mean-field state has " + std::to_string(state.s.size()) +
                              " entries, expected " + std::to_string(n));
    for (double v : state.s)
        if (!std::isfinite(v) || v < 0.0 || v > 1.0)
            throw ValidationError("mean-field state entries must lie in [0,1]");
}

double total_activity(const MeanFieldState& state) {
    double sum = 0.0;
    for (double v : state.s) sum += v;
    return sum;
}

std::vector<MeanFieldState> integrate_ode(const DerivedRates& rates, const MeanFieldState& s0,
                                          double dt, double t_end) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ValidationError("integrate_ode: dt must be > 0");
    if (!(t_end >= 0.0) || !std::isfinite(t_end))
        throw ValidationError("integrate_ode: t_end must be >= 0");
    validate_meanfield_state(s0, rates.size());
    require_finite_rates(rates, "integrate_ode");

    const int n = rates.size();
    const long steps = static_cast<long>(std::ceil(t_end / dt - 1e-12));

    std::vector<double> k1(n), k2(n), k3(n), k4(n), tmp(n);
    for (int halvings = 0; halvings <= kMaxHalvings; ++halvings) {
        const long sub = 1L << halvings;
        const double h = dt / static_cast<double>(sub);
        std::vector<MeanFieldState> traj;
        traj.reserve(static_cast<std::size_t>(steps) + 1);
        traj.push_back({s0.t, s0.s});
        std::vector<double> s = s0.s;
        bool ok = true;
        for (long step = 0; step < steps && ok; ++step) {
            for (long m = 0; m < sub && ok; ++m) {
                rhs_all(rates, s, k1);
                for (int i = 0; i < n; ++i) tmp[i] = s[i] + 0.5 * h * k1[i];
                rhs_all(rates, tmp, k2);
                for (int i = 0; i < n; ++i) tmp[i] = s[i] + 0.5 * h * k2[i];
                rhs_all(rates, tmp, k3);
                for (int i = 0; i < n; ++i) tmp[i] = s[i] + h * k3[i];
                rhs_all(rates, tmp, k4);
                for (int i = 0; i < n; ++i) {
                    s[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
                    if (s[i] < -kBoundEps || s[i] > 1.0 + kBoundEps) {
                        ok = false;
                        break;
                    }
                    // excursions inside the tolerance band are rounded back in
                    s[i] = std::clamp(s[i], 0.0, 1.0);
                }
            }
            if (ok) traj.push_back({s0.t + (step + 1) * dt, s});
        }
        if (ok) return traj;
    }
    throw NumericalError("integrate_ode: trajectory left [0,1] even after " +
                         std::to_string(kMaxHalvings) + " step halvings");
}

MeanFieldState stationary_point(const DerivedRates& rates, double tol,
                                const std::vector<double>* s_init) {
    if (!(tol > 0.0) || !std::isfinite(tol))
        throw ValidationError("stationary_point: tol must be > 0");
    require_finite_rates(rates, "stationary_point");
    const int n = rates.size();
    std::vector<double> s(static_cast<std::size_t>(n), 0.0);
    if (s_init) {
        MeanFieldState probe{0.0, *s_init};
        validate_meanfield_state(probe, n);
        s = *s_init;
    }

    double residual = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < kMaxFixedPointIters; ++iter) {
        double change = 0.0;
        std::vector<double> next(static_cast<std::size_t>(n));
        for (int i = 0; i < n; ++i) {
            double in = 0.0;
            for (int j : rates.neighbors(i)) in += rates.lambda_ext()(j, i) * s[j];
            const double denom = rates.lambda_int()[i] + rates.lambda_rec()[i] + in;
            const double target = denom > 0.0 ? (rates.lambda_int()[i] + in) / denom : s[i];
            next[i] = (1.0 - kDamping) * s[i] + kDamping * target;
            change = std::max(change, std::fabs(next[i] - s[i]));
        }
        s.swap(next);
        if (change < tol) {
            residual = 0.0;
            for (int i = 0; i < n; ++i) residual = std::max(residual, std::fabs(rhs(rates, s, i)));
            if (residual <= 10.0 * tol) return {0.0, s};
        }
    }
    throw NumericalError("stationary_point: no convergence in " +
                         std::to_string(kMaxFixedPointIters) + " iterations (last residual " +
                         std::to_string(residual) + ")");
}

double HomogeneousConfig::b() const {
    const double av = a();
    return std::sqrt(av * av + 4.0 * lambda_s * lambda_E());
}

void validate_homogeneous(const HomogeneousConfig& cfg) {
    auto ok = [](double v) { return std::isfinite(v) && v >= 0.0; };
    if (!ok(cfg.lambda_s) || !ok(cfg.lambda_r) || !ok(cfg.lambda_e))
        throw ValidationError("homogeneous config: intensities must be finite and >= 0");
    if (cfg.n < 1) throw ValidationError("homogeneous config: n must be >= 1");
    if (!std::isfinite(cfg.s0) || cfg.s0 < 0.0 || cfg.s0 > 1.0)
        throw ValidationError("homogeneous config: s0 must lie in [0,1]");
}

double homogeneous_closed_form(const HomogeneousConfig& cfg, double t) {
    validate_homogeneous(cfg);
    if (!std::isfinite(t) || t < 0.0)
        throw ValidationError("homogeneous_closed_form: t must be >= 0");
    const double lE = cfg.lambda_E();
    if (lE == 0.0) {
        LevelResult r = linear_ode_solution(cfg.lambda_s, cfg.lambda_r, t, cfg.s0);
        return r.value;
    }
    if (cfg.lambda_s == 0.0 && cfg.s0 == 0.0) return 0.0;   // nothing ever activates
    const double a = cfg.a();
    const double b = cfg.b();
    if (b == 0.0)
        throw ValidationError("homogeneous_closed_form: degenerate rates (b = 0)");
    const double arg = (2.0 * lE * cfg.s0 + a) / b;
    if (!(arg > -1.0 && arg < 1.0))
        throw ValidationError("homogeneous_closed_form: artanh argument " + std::to_string(arg) +
                              " outside (-1,1)");
    return (b * std::tanh(0.5 * b * t + std::atanh(arg)) - a) / (2.0 * lE);
}

double homogeneous_asymptote(const HomogeneousConfig& cfg) {
    validate_homogeneous(cfg);
    const double lE = cfg.lambda_E();
    if (lE > 0.0) return (cfg.b() - cfg.a()) / (2.0 * lE);
    if (cfg.lambda_s == 0.0) return 0.0;
    return cfg.lambda_s / (cfg.lambda_s + cfg.lambda_r);
}

LevelResult linear_ode_solution(double lambda_int, double lambda_rec, double t, double s0) {
    auto ok = [](double v) { return std::isfinite(v) && v >= 0.0; };
    if (!ok(lambda_int) || !ok(lambda_rec))
        throw ValidationError("linear_ode_solution: intensities must be finite and >= 0");
    if (!std::isfinite(t) || t < 0.0) throw ValidationError("linear_ode_solution: t must be >= 0");
    if (!std::isfinite(s0) || s0 < 0.0 || s0 > 1.0)
        throw ValidationError("linear_ode_solution: s0 must lie in [0,1]");
    const double total = lambda_int + lambda_rec;
    if (total == 0.0) return {s0, true};
    const double s_inf = lambda_int / total;
    return {s_inf + (s0 - s_inf) * std::exp(-total * t), false};
}

LevelResult disconnected_stationary(double p_int, double p_con) {
    auto ok = [](double v) { return !std::isnan(v) && v >= 0.0 && v <= 1.0; };
    if (!ok(p_int) || !ok(p_con))
        throw ValidationError("disconnected_stationary: probabilities must lie in [0,1]");
    const double denom = p_int + (1.0 - p_con);
    if (denom == 0.0) return {std::numeric_limits<double>::quiet_NaN(), true};
    return {p_int / denom, false};
}

} // namespace riskdyn
