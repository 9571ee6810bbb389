#include "doctest.h"

#include <cfloat>
#include <cmath>
#include <stdexcept>

#include <boost/math/quadrature/tanh_sinh.hpp>

#include "timexec/closed_form.hpp"
#include "timexec/errors.hpp"

using namespace timexec;

namespace {

// Integrate a rate over (0, T), clamping the abscissa away from the endpoint
// singularities the same way the report generator does. The excluded slivers
// carry O(DBL_EPSILON^{(1+kappa)/2}) mass, far below the tolerances used here.
template <typename F>
double integrate_rate(F&& rate, double T) {
    boost::math::quadrature::tanh_sinh<double> integrator;
    auto guarded = [&](double t) {
        if (t <= 0.0) t = DBL_MIN;
        const double top = std::nextafter(T, 0.0);
        if (t > top) t = top;
        return rate(t);
    };
    return integrator.integrate(guarded, 0.0, T, 1e-10);
}

}  // namespace

TEST_CASE("impact-minimizing power-law rate: reference value, symmetry, scaling") {
    // Reference value computed with 50-digit arithmetic.
    CHECK(is_powerlaw_rate(1.0, 1.0, 0.5, 0.5)
          == doctest::Approx(0.83462684167407324).epsilon(1e-13));

    // The profile is symmetric about the midpoint.
    for (double t : {0.05, 0.2, 0.35, 0.45}) {
        CHECK(is_powerlaw_rate(1.0, 1.0, 0.3, t)
              == doctest::Approx(is_powerlaw_rate(1.0, 1.0, 0.3, 1.0 - t)).epsilon(1e-12));
    }

    // Linear in x0; time-rescaling maps through (x0/T) * shape(t/T).
    CHECK(is_powerlaw_rate(2.0, 3.0, 0.5, 1.5)
          == doctest::Approx(2.0 / 3.0 * is_powerlaw_rate(1.0, 1.0, 0.5, 0.5)).epsilon(1e-12));

    CHECK_THROWS_AS(is_powerlaw_rate(1.0, 1.0, 0.5, 0.0), std::domain_error);
    CHECK_THROWS_AS(is_powerlaw_rate(1.0, 1.0, 0.5, 1.0), std::domain_error);
    CHECK_THROWS_AS(is_powerlaw_rate(1.0, -1.0, 0.5, 0.5), std::domain_error);
    CHECK_THROWS_AS(is_powerlaw_rate(1.0, 1.0, 1.2, 0.5), std::domain_error);
}

TEST_CASE("impact-minimizing power-law rate integrates to the order size") {
    for (double kappa : {0.25, 0.5, 0.75}) {
        const double mass =
            integrate_rate([&](double t) { return is_powerlaw_rate(1.0, 1.0, kappa, t); }, 1.0);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
    }
    const double mass =
        integrate_rate([&](double t) { return is_powerlaw_rate(5.0, 2.0, 0.4, t); }, 2.0);
    CHECK(mass == doctest::Approx(5.0).epsilon(1e-9));
}

TEST_CASE("exponential-kernel volume-benchmark schedule") {
    // rho T = 1 gives the textbook coefficients 4/3, 2/3, -2/3.
    const ContinuousSchedule s = vwap_exponential_schedule(1.0, 1.0, 1.0);
    CHECK(s.initial_impulse == doctest::Approx(4.0 / 3.0).epsilon(1e-14));
    CHECK(s.terminal_impulse == doctest::Approx(-2.0 / 3.0).epsilon(1e-14));
    CHECK(s.rate(0.1) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(s.rate(0.9) == doctest::Approx(2.0 / 3.0).epsilon(1e-14));
    CHECK(s.horizon == 1.0);
    CHECK(s.total == 1.0);

    // Executed mass: half of each impulse coefficient plus the interior flow.
    for (double rho : {0.3, 1.0, 4.0}) {
        for (double T : {0.5, 1.0, 2.5}) {
            const ContinuousSchedule g = vwap_exponential_schedule(7.0, T, rho);
            const double mass =
                0.5 * g.initial_impulse + 0.5 * g.terminal_impulse + g.rate(0.0) * T;
            CHECK(mass == doctest::Approx(7.0).epsilon(1e-12));
            CHECK(g.initial_impulse > 0.0);
            CHECK(g.terminal_impulse < 0.0);
        }
    }
    CHECK_THROWS_AS(vwap_exponential_schedule(1.0, 1.0, 0.0), std::domain_error);
    CHECK_THROWS_AS(vwap_exponential_schedule(1.0, 0.0, 1.0), std::domain_error);
}

TEST_CASE("power-law volume-benchmark rate: reference values and mass") {
    // Reference values computed with 50-digit arithmetic.
    CHECK(vwap_powerlaw_rate(1.0, 1.0, 0.25, 0.9)
          == doctest::Approx(-0.36489360468158084).epsilon(1e-12));
    CHECK(vwap_powerlaw_rate(1.0, 1.0, 0.5, 0.25)
          == doctest::Approx(1.1833886034002067).epsilon(1e-12));

    for (double kappa : {0.25, 0.5, 0.75}) {
        const double mass =
            integrate_rate([&](double t) { return vwap_powerlaw_rate(1.0, 1.0, kappa, t); }, 1.0);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-9));
    }
    CHECK_THROWS_AS(vwap_powerlaw_rate(1.0, 1.0, 0.5, 1.0), std::domain_error);
}

TEST_CASE("power-law rate near kappa = 1 approaches the flat benchmark") {
    for (double t = 0.05; t <= 0.95 + 1e-12; t += 0.05) {
        const double v = vwap_powerlaw_rate(1.0, 1.0, 0.99, t);
        CHECK(std::abs(v - 1.0) < 0.02);
    }
}

TEST_CASE("tracking-residual component w2: reference value and mass") {
    CHECK(w2_powerlaw_rate(1.0, 1.0, 0.5, 0.5) == doctest::Approx(-0.5).epsilon(1e-12));
    for (double kappa : {0.3, 0.5, 0.7}) {
        const double mass =
            integrate_rate([&](double t) { return w2_powerlaw_rate(1.0, 1.0, kappa, t); }, 1.0);
        CHECK(mass == doctest::Approx(-0.5).epsilon(1e-8));
    }
}

TEST_CASE("power-law schedule decomposes as flat flow + half-size U profile + w2") {
    // v(t) = x0/T + v_IS(x0/2; t) + w2(t) pointwise: the optimal tracking
    // schedule is the benchmark flow plus an impact-minimizing component of
    // mass x0/2 plus the residual component of mass -x0/2.
    for (double kappa : {0.2, 0.5, 0.8}) {
        for (double t = 0.05; t <= 0.95 + 1e-12; t += 0.09) {
            const double lhs = vwap_powerlaw_rate(2.0, 1.5, kappa, t);
            const double rhs = 2.0 / 1.5 + is_powerlaw_rate(1.0, 1.5, kappa, t) +
                               w2_powerlaw_rate(2.0, 1.5, kappa, t);
            CHECK(lhs == doctest::Approx(rhs).epsilon(1e-10));
        }
    }
}

TEST_CASE("sign-change gap: reference values and sign flip of the rate") {
    // Reference values computed with 50-digit arithmetic. The gap is
    // u* = 1 - t*/T, the distance of the buy/sell crossover from the close.
    CHECK(vwap_powerlaw_sign_change_gap(0.15)
          == doctest::Approx(0.29690442555014249).epsilon(1e-10));
    CHECK(vwap_powerlaw_sign_change_gap(0.25)
          == doctest::Approx(0.16798868206538434).epsilon(1e-10));
    CHECK(vwap_powerlaw_sign_change_gap(0.35)
          == doctest::Approx(0.070453387267759273).epsilon(1e-10));
    // For kappa near 1 the crossover hugs the close far below double-denormal
    // distance; the log-space bisection must still resolve it.
    CHECK(vwap_powerlaw_sign_change_gap(0.9)
          == doctest::Approx(1.0422063245560255e-26).epsilon(1e-10));

    // The gap shrinks monotonically as decay gets faster.
    double prev = vwap_powerlaw_sign_change_gap(0.05);
    for (double kappa = 0.1; kappa < 0.96; kappa += 0.05) {
        const double cur = vwap_powerlaw_sign_change_gap(kappa);
        CHECK(cur < prev);
        prev = cur;
    }

    // The rate actually changes sign there: positive just before, negative
    // just after.
    for (double kappa : {0.15, 0.25, 0.35}) {
        const double ts = 1.0 - vwap_powerlaw_sign_change_gap(kappa);
        CHECK(vwap_powerlaw_rate(1.0, 1.0, kappa, ts - 1e-4) > 0.0);
        CHECK(vwap_powerlaw_rate(1.0, 1.0, kappa, ts + 1e-4) < 0.0);
    }
}

TEST_CASE("schedule sells after the crossover and only there") {
    const double kappa = 0.25;
    const double ts = 1.0 - vwap_powerlaw_sign_change_gap(kappa);
    int flips = 0;
    double prev = vwap_powerlaw_rate(1.0, 1.0, kappa, 1e-3);
    for (double t = 2e-3; t < 1.0; t += 1e-3) {
        const double cur = vwap_powerlaw_rate(1.0, 1.0, kappa, t);
        if ((cur < 0.0) != (prev < 0.0)) {
            ++flips;
            CHECK(std::abs(t - ts) < 2e-3);
        }
        prev = cur;
    }
    CHECK(flips == 1);
    CHECK(prev < 0.0);  // selling into the close
}

TEST_CASE("close-targeting decomposition") {
    const ContinuousSchedule s = target_close_decomposition(3.0, 2.0, DecayKernel{PowerLaw{0.5}});
    CHECK(s.initial_impulse == 0.0);
    CHECK(s.terminal_impulse == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(s.horizon == 2.0);
    CHECK(s.total == 3.0);
    CHECK(s.rate(0.7) == doctest::Approx(is_powerlaw_rate(1.5, 2.0, 0.5, 0.7)).epsilon(1e-13));

    // Interior flow carries half the order; the close impulse executes the
    // other half (delta coefficient x0 -> executed mass x0/2).
    const double interior = integrate_rate(s.rate, 2.0);
    CHECK(interior == doctest::Approx(1.5).epsilon(1e-9));
    CHECK(interior + 0.5 * s.terminal_impulse == doctest::Approx(3.0).epsilon(1e-9));

    CHECK_THROWS_AS(target_close_decomposition(1.0, 1.0, DecayKernel{Exponential{1.0}}),
                    not_implemented_error);
    CHECK_THROWS_AS(target_close_decomposition(1.0, 1.0, DecayKernel{RegularizedPowerLaw{0.5, 2.0}}),
                    not_implemented_error);
    CHECK_THROWS_AS(target_close_decomposition(1.0, 1.0, DecayKernel{PowerLaw{1.5}}),
                    std::domain_error);
}

TEST_CASE("linear risk-averse baseline") {
    // beta = 0: flat at x0/T.
    CHECK(almgren_chriss_baseline(4.0, 2.0, 0.0, 0.3) == doctest::Approx(2.0).epsilon(1e-14));
    // beta = 1: front-loaded ramp 2 x0/T (1 - t/T).
    CHECK(almgren_chriss_baseline(1.0, 1.0, 1.0, 0.0) == doctest::Approx(2.0).epsilon(1e-14));
    CHECK(almgren_chriss_baseline(1.0, 1.0, 1.0, 1.0) == doctest::Approx(0.0));
    // Linear in t, so the trapezoid of the endpoints is the exact mass.
    for (double beta : {-0.5, 0.0, 0.7, 2.0}) {
        const double a = almgren_chriss_baseline(3.0, 1.5, beta, 0.0);
        const double b = almgren_chriss_baseline(3.0, 1.5, beta, 1.5);
        CHECK(0.5 * (a + b) * 1.5 == doctest::Approx(3.0).epsilon(1e-13));
    }
    CHECK_THROWS_AS(almgren_chriss_baseline(1.0, 1.0, 0.5, -0.1), std::domain_error);
    CHECK_THROWS_AS(almgren_chriss_baseline(1.0, 1.0, 0.5, 1.1), std::domain_error);
}
