#pragma once

#include <vector>

#include "riskdyn/model.hpp"

namespace riskdyn {

/// Continuous-time activation probabilities s_i(t) at one instant (months).
struct MeanFieldState {
    double t = 0.0;
    std::vector<double> s;
};

void validate_meanfield_state(const MeanFieldState& state, int n);

/// Expected number of simultaneously active risks, sum_i s_i.
double total_activity(const MeanFieldState& state);

/// Classical RK4 on ds_i/dt = lambda_int_i (1-s_i) - lambda_rec_i s_i
///                           + (1-s_i) sum_j lambda_ext(j,i) s_j,
/// recorded at t = 0, dt, 2 dt, ..., t_end. When a trajectory component
/// leaves [-1e-9, 1+1e-9] the whole integration restarts with the internal
/// step halved (the recording grid is unchanged); more than 20 halvings is a
/// numerical failure.
std::vector<MeanFieldState> integrate_ode(const DerivedRates& rates, const MeanFieldState& s0,
                                          double dt, double t_end);

/// Damped fixed-point iteration (damping 0.5, at most 10000 iterations) on
/// s_i = (lambda_int_i + L_i(s)) / (lambda_int_i + lambda_rec_i + L_i(s)),
/// L_i(s) = sum_j lambda_ext(j,i) s_j, started from s_init (default all
/// zeros). Stops when the max component change is below tol; the returned
/// point is verified to zero the ODE right-hand side within 10 tol
/// componentwise.
MeanFieldState stationary_point(const DerivedRates& rates, double tol,
                                const std::vector<double>* s_init = nullptr);

/// Homogeneous system: n identical risks on a complete graph with internal
/// intensity lambda_s, recovery lambda_r, and per-edge influence lambda_e.
struct HomogeneousConfig {
    double lambda_s = 0.0;
    double lambda_r = 0.0;
    double lambda_e = 0.0;
    int n = 2;
    double s0 = 0.0;

    double lambda_E() const { return (n - 1) * lambda_e; }
    double a() const { return lambda_s + lambda_r - lambda_E(); }
    double b() const;   ///< sqrt(a^2 + 4 lambda_s lambda_E)
};

void validate_homogeneous(const HomogeneousConfig& cfg);

/// Closed-form s(t) of the homogeneous system,
///   s(t) = (b tanh(b t/2 + artanh((2 lambda_E s0 + a)/b)) - a) / (2 lambda_E)
/// with a = lambda_s + lambda_r - lambda_E and b = sqrt(a^2 + 4 lambda_s
/// lambda_E); reduces to the scalar linear solution when lambda_E = 0.
/// The artanh argument must lie in (-1, 1).
double homogeneous_closed_form(const HomogeneousConfig& cfg, double t);

/// Long-time limit of the homogeneous system: (b - a) / (2 lambda_E) for
/// lambda_E > 0, else lambda_s / (lambda_s + lambda_r).
double homogeneous_asymptote(const HomogeneousConfig& cfg);

struct LevelResult {
    double value = 0.0;
    bool degenerate = false;
};

/// Scalar uncoupled solution s(t) = s_inf + (s0 - s_inf) exp(-(li+lr) t) with
/// s_inf = li/(li+lr). Both intensities zero: constant s0, flagged.
LevelResult linear_ode_solution(double lambda_int, double lambda_rec, double t, double s0 = 0.0);

/// Stationary active probability of the 2-state monthly chain with activation
/// p_int and recovery 1 - p_con: p_int / (p_int + 1 - p_con). The absorbing
/// pair (p_int=0, p_con=1) has no unique stationary level: flagged, value NaN.
LevelResult disconnected_stationary(double p_int, double p_con);

} // namespace riskdyn
