#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "vkg/green.hpp"

#include <cmath>

using namespace vkg;

TEST_CASE("Ghat(0,k) = 0 and dtGhat(0,k) = 1 across wavenumbers") {
    for (double k : {0.0, 0.5, 1.0, 3.0, 17.0, 200.0}) {
        CHECK(std::abs(green_hat(0.0, k)) <= 1e-14);
        CHECK(std::abs(green_dt_hat(0.0, k) - 1.0) <= 1e-14);
    }
}

TEST_CASE("Ghat evaluations from the dispersion relation") {
    // t = pi/2, k = 0: sin(pi/2)/1 = 1
    CHECK(green_hat(M_PI / 2.0, 0.0) == doctest::Approx(1.0).epsilon(1e-14));
    // |k| = sqrt(3) has <k> = 2: Ghat = sin(2t)/2
    const double k = std::sqrt(3.0);
    for (double t : {0.3, 1.7, 4.0})
        CHECK(green_hat(t, k) == doctest::Approx(std::sin(2.0 * t) / 2.0).epsilon(1e-14));
}

TEST_CASE("kernel split Ghat = Ghat_osc+ + Ghat_osc- is pointwise exact") {
    for (double k : {0.0, 0.25, 1.0, 2.0, 9.0, 64.0}) {
        for (double t : {0.0, 0.1, 1.0, 7.3, 30.0}) {
            const auto sum = osc_green_hat(Sign::plus, t, k) + osc_green_hat(Sign::minus, t, k);
            CHECK(std::abs(sum - std::complex<double>{green_hat(t, k), 0.0}) <= 1e-15);
        }
    }
}

TEST_CASE("oscillatory kernels carry amplitude a_pm = -+i/(2<k>)") {
    const double k = 1.5;
    const double w = japanese_bracket(k);
    CHECK(std::abs(osc_amplitude(Sign::plus, k) - std::complex<double>{0.0, -1.0 / (2.0 * w)}) <=
          1e-16);
    CHECK(std::abs(osc_amplitude(Sign::minus, k) - std::complex<double>{0.0, 1.0 / (2.0 * w)}) <=
          1e-16);
    CHECK(std::abs(osc_green_hat(Sign::plus, 0.0, k) - osc_amplitude(Sign::plus, k)) <= 1e-16);
}

TEST_CASE("osc_exponent branches are conjugate") {
    for (double k : {0.0, 1.0, 5.0})
        CHECK(osc_exponent(Sign::plus, k) == std::conj(osc_exponent(Sign::minus, k)));
}
