#include <doctest.h>

#include <cmath>
#include <vector>

#include "riskdyn/errors.hpp"
#include "riskdyn/stats.hpp"

#include "oracles.hpp"

using namespace riskdyn;

TEST_CASE("chi-square upper tail matches quadrature of the density") {
    for (int k : {1, 2, 3, 5}) {
        for (double x : {0.5, 1.0, 2.706, 3.841, 6.635, 10.828, 20.0}) {
            const double mine = chi2_sf(x, k);
            const double ref = oracles::chi2_sf_simpson(x, k);
            CHECK(mine == doctest::Approx(ref).epsilon(1e-8));
        }
    }
    CHECK(chi2_sf(0.0, 1) == 1.0);
    CHECK(chi2_sf(-3.0, 2) == 1.0);
}

TEST_CASE("chi-square tail matches closed forms for small k") {
    for (double x : {0.1, 0.5, 1.0, 2.0, 3.84, 6.63, 12.0, 25.0}) {
        // k=1: erfc(sqrt(x/2)); k=2: exp(-x/2); k=4: exp(-x/2)(1+x/2)
        CHECK(chi2_sf(x, 1) == doctest::Approx(std::erfc(std::sqrt(0.5 * x))).epsilon(1e-12));
        CHECK(chi2_sf(x, 2) == doctest::Approx(std::exp(-0.5 * x)).epsilon(1e-12));
        CHECK(chi2_sf(x, 4) ==
              doctest::Approx(std::exp(-0.5 * x) * (1.0 + 0.5 * x)).epsilon(1e-12));
    }
}

TEST_CASE("chi-square tail is monotone and normalized") {
    double prev = 1.0;
    for (double x = 0.0; x <= 40.0; x += 0.5) {
        const double v = chi2_sf(x, 3);
        CHECK(v <= prev + 1e-15);
        CHECK(v >= 0.0);
        CHECK(v <= 1.0);
        prev = v;
    }
    CHECK(chi2_sf(1e-12, 2) == doctest::Approx(1.0).epsilon(1e-9));
}

TEST_CASE("ols recovers an exact line") {
    std::vector<double> x = {0, 1, 2, 3, 4}, y;
    for (double xi : x) y.push_back(3.5 - 0.25 * xi);
    const LinearFit f = ols(x, y);
    CHECK(f.slope == doctest::Approx(-0.25).epsilon(1e-14));
    CHECK(f.intercept == doctest::Approx(3.5).epsilon(1e-14));
    CHECK(f.r_squared == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("ols on noisy points matches the normal equations") {
    const std::vector<double> x = {1, 2, 3, 5, 8}, y = {2.1, 2.0, 3.2, 4.9, 7.4};
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double n = 5.0;
    for (int i = 0; i < 5; ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const LinearFit f = ols(x, y);
    CHECK(f.slope == doctest::Approx(slope).epsilon(1e-12));
    CHECK(f.r_squared > 0.9);
    CHECK(f.r_squared < 1.0);
}

TEST_CASE("ols rejects degenerate inputs") {
    CHECK_THROWS_AS(ols({1.0}, {2.0}), ValidationError);
    CHECK_THROWS_AS(ols({2.0, 2.0, 2.0}, {1.0, 2.0, 3.0}), ValidationError);
    // constant y: perfect flat line
    const LinearFit f = ols({1.0, 2.0, 3.0}, {4.0, 4.0, 4.0});
    CHECK(f.slope == 0.0);
    CHECK(f.r_squared == 1.0);
}
