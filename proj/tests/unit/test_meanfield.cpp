#include <doctest.h>

#include <cmath>
#include <vector>

#include "riskdyn/errors.hpp"
#include "riskdyn/meanfield.hpp"

#include "oracles.hpp"

using namespace riskdyn;

namespace {

/// n identical risks on a complete graph, intensity parametrization.
DerivedRates homogeneous_rates(int n, double lam_s, double lam_r, double lam_e) {
    const std::vector<double> li(static_cast<std::size_t>(n), lam_s);
    const std::vector<double> lr(static_cast<std::size_t>(n), lam_r);
    Matrix ext(static_cast<std::size_t>(n), static_cast<std::size_t>(n), lam_e);
    for (std::size_t i = 0; i < static_cast<std::size_t>(n); ++i) ext(i, i) = 0.0;
    return DerivedRates(li, lr, ext);
}

} // namespace

TEST_CASE("closed form solves the homogeneous equation") {
    HomogeneousConfig cfg;
    cfg.lambda_s = 0.25;
    cfg.lambda_r = 0.6;
    cfg.lambda_e = 0.05;
    cfg.n = 8;
    cfg.s0 = 0.1;
    // derivative check by central differences at several times
    for (double t : {0.5, 1.0, 3.0, 10.0}) {
        const double h = 1e-5;
        const double s = homogeneous_closed_form(cfg, t);
        const double ds = (homogeneous_closed_form(cfg, t + h) -
                           homogeneous_closed_form(cfg, t - h)) /
                          (2.0 * h);
        const double lamE = cfg.lambda_E();
        const double rhs = cfg.lambda_s * (1.0 - s) - cfg.lambda_r * s + lamE * s * (1.0 - s);
        CHECK(ds == doctest::Approx(rhs).epsilon(1e-6));
    }
    CHECK(homogeneous_closed_form(cfg, 0.0) == doctest::Approx(0.1).epsilon(1e-12));
    // long-run limit equals the asymptote
    CHECK(homogeneous_closed_form(cfg, 500.0) ==
          doctest::Approx(homogeneous_asymptote(cfg)).epsilon(1e-10));
}

TEST_CASE("asymptote agrees with a bisection root and the golden-ratio case") {
    HomogeneousConfig cfg;
    cfg.lambda_s = 1.0;
    cfg.lambda_r = 1.0;
    cfg.lambda_e = 1.0;
    cfg.n = 2;   // lambda_E = (n-1) lambda_e = 1
    cfg.s0 = 0.0;
    const double a = homogeneous_asymptote(cfg);
    CHECK(a == doctest::Approx(0.6180339887498949).epsilon(1e-12));
    CHECK(a == doctest::Approx(oracles::homogeneous_root_bisect(1.0, 1.0, 1.0)).epsilon(1e-10));

    for (double ls : {0.0, 0.3, 2.0}) {
        for (double lr : {0.2, 1.5}) {
            for (double le : {0.0, 0.4}) {
                cfg.lambda_s = ls;
                cfg.lambda_r = lr;
                cfg.lambda_e = le;
                const double lamE = cfg.lambda_E();
                const double root = oracles::homogeneous_root_bisect(ls, lr, lamE);
                CHECK(homogeneous_asymptote(cfg) == doctest::Approx(root).epsilon(1e-10));
            }
        }
    }
}

TEST_CASE("RK4 follows the homogeneous closed form") {
    const double lam_s = 0.12, lam_r = 0.4, lam_e = 0.03;
    const int n = 10;
    const DerivedRates rates = homogeneous_rates(n, lam_s, lam_r, lam_e);
    MeanFieldState s0;
    s0.s.assign(static_cast<std::size_t>(n), 0.0);
    const auto traj = integrate_ode(rates, s0, 0.1, 200.0);

    HomogeneousConfig cfg;
    cfg.lambda_s = lam_s;
    cfg.lambda_r = lam_r;
    cfg.lambda_e = lam_e;
    cfg.n = n;
    cfg.s0 = 0.0;
    double max_err = 0.0;
    for (const MeanFieldState& st : traj) {
        const double ref = homogeneous_closed_form(cfg, st.t);
        for (double v : st.s) max_err = std::max(max_err, std::abs(v - ref));
    }
    CHECK(max_err <= 1e-6);
    CHECK(traj.front().t == 0.0);
    CHECK(traj.back().t == doctest::Approx(200.0).epsilon(1e-12));
}

TEST_CASE("RK4 follows the linear closed form without influence") {
    const double lam_s = 0.2, lam_r = 0.7;
    const DerivedRates rates = homogeneous_rates(3, lam_s, lam_r, 0.0);
    MeanFieldState s0;
    s0.s = {0.0, 0.5, 1.0};
    const auto traj = integrate_ode(rates, s0, 0.025, 200.0);
    double max_err = 0.0;
    for (const MeanFieldState& st : traj) {
        for (int i = 0; i < 3; ++i) {
            const LevelResult ref =
                linear_ode_solution(lam_s, lam_r, st.t, s0.s[static_cast<std::size_t>(i)]);
            max_err = std::max(max_err,
                               std::abs(st.s[static_cast<std::size_t>(i)] - ref.value));
        }
    }
    CHECK(max_err <= 1e-8);
}

TEST_CASE("linear solution handles the degenerate no-dynamics case") {
    const LevelResult frozen = linear_ode_solution(0.0, 0.0, 5.0, 0.3);
    CHECK(frozen.degenerate);
    CHECK(frozen.value == 0.3);
    const LevelResult limit = linear_ode_solution(0.5, 0.5, 1e9, 0.0);
    CHECK_FALSE(limit.degenerate);
    CHECK(limit.value == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("stationary point zeroes the right-hand side") {
    const DerivedRates rates = homogeneous_rates(6, 0.1, 0.5, 0.02);
    const MeanFieldState s = stationary_point(rates, 1e-12);
    HomogeneousConfig cfg;
    cfg.lambda_s = 0.1;
    cfg.lambda_r = 0.5;
    cfg.lambda_e = 0.02;
    cfg.n = 6;
    const double expected = homogeneous_asymptote(cfg);
    for (double v : s.s) CHECK(v == doctest::Approx(expected).epsilon(1e-8));

    // heterogeneous case: verify the residual directly
    const std::vector<double> li = {0.3, 0.05, 0.0};
    const std::vector<double> lr = {0.2, 0.6, 0.4};
    Matrix ext(3, 3, 0.0);
    ext(0, 1) = ext(1, 0) = 0.1;
    ext(1, 2) = ext(2, 1) = 0.3;
    const DerivedRates het(li, lr, ext);
    const MeanFieldState hs = stationary_point(het, 1e-12);
    for (int i = 0; i < 3; ++i) {
        double in = 0.0;
        for (int j = 0; j < 3; ++j)
            in += ext(static_cast<std::size_t>(j), static_cast<std::size_t>(i)) *
                  hs.s[static_cast<std::size_t>(j)];
        const double si = hs.s[static_cast<std::size_t>(i)];
        const double rhs = (li[static_cast<std::size_t>(i)] + in) * (1.0 - si) -
                           lr[static_cast<std::size_t>(i)] * si;
        CHECK(std::abs(rhs) < 1e-10);
    }
}

TEST_CASE("disconnected stationary level matches the probability ratio") {
    const LevelResult r = disconnected_stationary(0.3, 0.6);
    CHECK_FALSE(r.degenerate);
    CHECK(r.value == doctest::Approx(0.3 / (0.3 + 0.4)).epsilon(1e-14));
    const LevelResult degenerate = disconnected_stationary(0.0, 1.0);
    CHECK(degenerate.degenerate);
    CHECK(std::isnan(degenerate.value));
    const LevelResult off = disconnected_stationary(0.0, 0.5);
    CHECK(off.value == 0.0);
    CHECK_FALSE(off.degenerate);
}

TEST_CASE("homogeneous special cases") {
    HomogeneousConfig cfg;
    cfg.lambda_s = 0.4;
    cfg.lambda_r = 0.1;
    cfg.lambda_e = 0.0;   // no influence: reduces to the linear solution
    cfg.n = 5;
    cfg.s0 = 0.2;
    CHECK(homogeneous_closed_form(cfg, 3.0) ==
          doctest::Approx(linear_ode_solution(0.4, 0.1, 3.0, 0.2).value).epsilon(1e-12));
    CHECK(homogeneous_asymptote(cfg) == doctest::Approx(0.8).epsilon(1e-12));

    cfg.lambda_e = 0.3;
    cfg.lambda_s = 0.0;
    cfg.s0 = 0.0;   // nothing ever activates from an empty start
    CHECK(homogeneous_closed_form(cfg, 10.0) == 0.0);
    // the asymptote reports the attracting level, reached from any s0 > 0
    CHECK(homogeneous_asymptote(cfg) ==
          doctest::Approx(oracles::homogeneous_root_bisect(0.0, cfg.lambda_r, cfg.lambda_E()))
              .epsilon(1e-10));

    cfg.lambda_e = 0.02;   // subcritical influence: extinction is attracting
    CHECK(homogeneous_asymptote(cfg) == doctest::Approx(0.0).scale(1.0).epsilon(1e-12));

    cfg.n = 1;   // single node: lambda_E = 0, influence vanishes
    cfg.lambda_s = 0.2;
    CHECK(homogeneous_closed_form(cfg, 2.0) ==
          doctest::Approx(linear_ode_solution(0.2, 0.1, 2.0, 0.0).value).epsilon(1e-12));

    cfg = HomogeneousConfig{};
    cfg.n = 0;
    CHECK_THROWS_AS(validate_homogeneous(cfg), ValidationError);
    cfg = HomogeneousConfig{};
    cfg.s0 = 1.5;
    CHECK_THROWS_AS(validate_homogeneous(cfg), ValidationError);
    cfg = HomogeneousConfig{};
    cfg.lambda_s = -0.1;
    CHECK_THROWS_AS(validate_homogeneous(cfg), ValidationError);
}

TEST_CASE("integration validates its inputs and clamps excursions") {
    const DerivedRates rates = homogeneous_rates(2, 0.3, 0.7, 0.1);
    MeanFieldState s0;
    s0.s = {0.0, 2.0};
    CHECK_THROWS_AS(integrate_ode(rates, s0, 0.1, 10.0), ValidationError);
    s0.s = {0.0};
    CHECK_THROWS_AS(integrate_ode(rates, s0, 0.1, 10.0), ValidationError);
    s0.s = {0.0, 1.0};
    CHECK_THROWS_AS(integrate_ode(rates, s0, 0.0, 10.0), ValidationError);
    // a zero horizon is allowed and records only the initial state
    const auto instant = integrate_ode(rates, s0, 0.1, 0.0);
    REQUIRE(instant.size() == 1);
    CHECK(instant[0].t == 0.0);
    CHECK(instant[0].s == s0.s);

    // a stiff system forces internal step halving but still lands in [0,1]
    const DerivedRates stiff = homogeneous_rates(2, 80.0, 90.0, 0.0);
    const auto traj = integrate_ode(stiff, s0, 1.0, 5.0);
    for (const MeanFieldState& st : traj)
        for (double v : st.s) {
            CHECK(v >= 0.0);
            CHECK(v <= 1.0);
        }
    // recording grid unchanged by halving
    CHECK(traj.size() == 6);
    CHECK(traj[3].t == doctest::Approx(3.0).epsilon(1e-12));
}
