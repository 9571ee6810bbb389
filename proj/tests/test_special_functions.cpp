#include "doctest.h"

#include <cmath>
#include <stdexcept>
#include <vector>

#include "timexec/special_functions.hpp"

using namespace timexec;

namespace {

// Straightforward Gauss series for 2F1(1, kappa-1; (1+kappa)/2; z), usable as
// an independent oracle where it converges comfortably (|z| well below 1).
double hyp_series_reference(double kappa, double z) {
    double term = 1.0;
    double sum = 1.0;
    const double b = kappa - 1.0;
    const double c = 0.5 * (1.0 + kappa);
    for (int n = 0; n < 400; ++n) {
        term *= (b + n) / (c + n) * z;   // (1)_n cancels n! term by term
        sum += term;
        if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

}  // namespace

TEST_CASE("gamma agrees with std::tgamma and hits exact values") {
    for (double x : {0.1, 0.25, 0.5, 0.9, 1.0, 1.5, 2.0, 3.7, 5.0, 10.0, 20.5}) {
        CHECK(timexec::gamma(x) == doctest::Approx(std::tgamma(x)).epsilon(1e-12));
    }
    CHECK(timexec::gamma(0.5) == doctest::Approx(std::sqrt(M_PI)).epsilon(1e-13));
    CHECK(timexec::gamma(1.0) == doctest::Approx(1.0).epsilon(1e-13));
    CHECK(timexec::gamma(5.0) == doctest::Approx(24.0).epsilon(1e-13));
    CHECK_THROWS_AS(timexec::gamma(0.0), std::domain_error);
    CHECK_THROWS_AS(timexec::gamma(-2.5), std::domain_error);
}

TEST_CASE("hypergeometric endpoints are exact") {
    for (double kappa : {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9}) {
        CHECK(hyp2f1_special(kappa, 0.0) == 1.0);
        CHECK(hyp2f1_special(kappa, 1.0) == -1.0);
    }
}

TEST_CASE("hypergeometric matches high-precision reference values") {
    // Reference values computed with 50-digit arithmetic.
    CHECK(hyp2f1_special(0.5, 0.5) == doctest::Approx(0.5990701173677961).epsilon(1e-13));
    CHECK(hyp2f1_special(0.25, 0.9) == doctest::Approx(-0.41790693383871547).epsilon(1e-13));
}

TEST_CASE("hypergeometric agrees with the direct series on the left half-interval") {
    for (double kappa : {0.15, 0.3, 0.5, 0.7, 0.85}) {
        for (double z : {0.05, 0.2, 0.35, 0.5}) {
            CHECK(hyp2f1_special(kappa, z)
                  == doctest::Approx(hyp_series_reference(kappa, z)).epsilon(1e-12));
        }
    }
}

TEST_CASE("reflection constant matches high-precision reference values") {
    CHECK(hyp2f1_reflection_q(0.25) == doctest::Approx(1.135171393293261).epsilon(1e-12));
    CHECK(hyp2f1_reflection_q(0.5) == doctest::Approx(1.6944261695879582).epsilon(1e-12));
    CHECK(hyp2f1_reflection_q(0.75) == doctest::Approx(1.9378587832999072).epsilon(1e-12));
    CHECK(hyp2f1_reflection_q(0.9) == doctest::Approx(1.9911423739724576).epsilon(1e-12));
}

TEST_CASE("reflection identity holds across the interval") {
    // F(z) + F(1-z) = Q(kappa) [z(1-z)]^{(1-kappa)/2}. For z <= 1/2 both sides
    // are computable without the reflection branch, so this is not circular.
    for (double kappa : {0.1, 0.25, 0.4, 0.55, 0.7, 0.9}) {
        const double q = hyp2f1_reflection_q(kappa);
        for (double z = 0.05; z < 0.999; z += 0.045) {
            const double lhs = hyp2f1_special(kappa, z) + hyp2f1_special(kappa, 1.0 - z);
            const double rhs = q * std::pow(z * (1.0 - z), 0.5 * (1.0 - kappa));
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-11));
        }
    }
}

TEST_CASE("hypergeometric is strictly decreasing in z") {
    for (double kappa : {0.2, 0.5, 0.8}) {
        double prev = hyp2f1_special(kappa, 0.0);
        for (double z = 0.02; z <= 1.0 + 1e-12; z += 0.02) {
            const double cur = hyp2f1_special(kappa, std::min(z, 1.0));
            CHECK(cur < prev);
            prev = cur;
        }
    }
}

TEST_CASE("hypergeometric rejects out-of-range arguments") {
    CHECK_THROWS_AS(hyp2f1_special(0.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(hyp2f1_special(1.0, 0.5), std::domain_error);
    CHECK_THROWS_AS(hyp2f1_special(0.5, -0.01), std::domain_error);
    CHECK_THROWS_AS(hyp2f1_special(0.5, 1.01), std::domain_error);
}
