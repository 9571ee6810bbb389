#include "timexec/closed_form.hpp"

#include <cmath>
#include <stdexcept>

#include "timexec/errors.hpp"
#include "timexec/special_functions.hpp"

namespace timexec {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

void require_positive_horizon(double T) {
    if (!(T > 0.0) || !std::isfinite(T))
        throw std::domain_error("horizon T must be positive and finite");
}

void require_exponent(double kappa) {
    if (!(kappa > 0.0) || !(kappa < 1.0))
        throw std::domain_error("power-law exponent kappa must lie in (0, 1)");
}

// Interior evaluation point; the closed-form rates diverge at the endpoints.
void require_interior(double t, double T) {
    if (!(t > 0.0) || !(t < T))
        throw std::domain_error("evaluation time t must lie strictly inside (0, T)");
}

// 2^k Gamma(1+k/2) / (sqrt(pi) Gamma((1+k)/2)); normalizes the symmetric
// U-shaped profile to unit mass.
double is_coefficient(double kappa) {
    return std::pow(2.0, kappa) * gamma(1.0 + kappa / 2.0) /
           (std::sqrt(kPi) * gamma((1.0 + kappa) / 2.0));
}

// 2^{k-2} sqrt(pi) / (sin(k pi/2) Gamma(1-k/2) Gamma((1+k)/2)).
double vwap_coefficient(double kappa) {
    return std::pow(2.0, kappa - 2.0) * std::sqrt(kPi) /
           (std::sin(kappa * kPi / 2.0) * gamma(1.0 - kappa / 2.0) *
            gamma((1.0 + kappa) / 2.0));
}

}  // namespace

double is_powerlaw_rate(double x0, double T, double kappa, double t) {
    require_positive_horizon(T);
    require_exponent(kappa);
    require_interior(t, T);
    const double z = t / T;
    const double u = (T - t) / T;  // 1 - z without cancellation near t = T
    return x0 / T * is_coefficient(kappa) * std::pow(z * u, -(1.0 - kappa) / 2.0);
}

ContinuousSchedule vwap_exponential_schedule(double x0, double T, double rho) {
    require_positive_horizon(T);
    if (!(rho > 0.0) || !std::isfinite(rho))
        throw std::domain_error("exponential decay rate rho must be positive and finite");
    const double rt = rho * T;
    const double denom = rt * (2.0 + rt);
    const double a1 = 2.0 * x0 * (1.0 + rt) / denom;
    const double b = x0 * rho * (1.0 + rt) / denom;
    const double a2 = -2.0 * x0 / denom;
    return ContinuousSchedule{a1, a2, [b](double) { return b; }, T, x0};
}

double vwap_powerlaw_rate(double x0, double T, double kappa, double t) {
    require_positive_horizon(T);
    require_exponent(kappa);
    require_interior(t, T);
    const double z = t / T;
    const double u = (T - t) / T;
    const double f = hyp2f1_special(kappa, z);
    return x0 / T * vwap_coefficient(kappa) * (kappa + f) /
           std::pow(z * u, (1.0 - kappa) / 2.0);
}

double w2_powerlaw_rate(double x0, double T, double kappa, double t) {
    require_positive_horizon(T);
    require_exponent(kappa);
    require_interior(t, T);
    const double z = t / T;
    const double u = (T - t) / T;
    const double f = hyp2f1_special(kappa, z);
    return x0 / T *
           (-1.0 + vwap_coefficient(kappa) * f / std::pow(z * u, (1.0 - kappa) / 2.0));
}

ContinuousSchedule target_close_decomposition(double x0, double T, const DecayKernel& g) {
    validate(g);
    if (!std::holds_alternative<PowerLaw>(g))
        throw not_implemented_error(
            "target_close_decomposition: closed form exists only for the PowerLaw "
            "kernel; use the integral-equation solver for other variants");
    const double kappa = std::get<PowerLaw>(g).kappa;
    require_positive_horizon(T);
    // Half the order follows the symmetric impact-minimizing profile, half
    // executes at the close (delta coefficient x0 -> executed mass x0/2).
    auto rate = [x0, T, kappa](double t) { return is_powerlaw_rate(x0 / 2.0, T, kappa, t); };
    return ContinuousSchedule{0.0, x0, std::move(rate), T, x0};
}

double almgren_chriss_baseline(double x0, double T, double beta, double t) {
    require_positive_horizon(T);
    if (!std::isfinite(beta)) throw std::domain_error("baseline slope beta must be finite");
    if (!(t >= 0.0) || !(t <= T))
        throw std::domain_error("evaluation time t must lie in [0, T]");
    return x0 / T * ((beta + 1.0) - 2.0 * beta * t / T);
}

double vwap_powerlaw_sign_change_gap(double kappa) {
    require_exponent(kappa);
    // Sign of the rate is the sign of kappa + F(kappa, z). Writing u = 1 - z
    // and reflecting F across z = 1/2,
    //   kappa + F(kappa, 1-u) = kappa - F(kappa, u) + Q(kappa) [u(1-u)]^{(1-kappa)/2},
    // which needs only u and is monotone increasing in u: at u -> 0+ it tends
    // to kappa - 1 < 0, at u = 1/2 it is kappa + F(kappa, 1/2) > 0. Bisect in
    // s = log u so crossings within ~1e-300 < u < 1/2 resolve to full relative
    // precision.
    const double q = hyp2f1_reflection_q(kappa);
    const double half = (1.0 - kappa) / 2.0;
    auto margin = [&](double s) {
        const double u = std::exp(s);
        return kappa - hyp2f1_special(kappa, u) + q * std::pow(u * (1.0 - u), half);
    };
    double lo = std::log(1e-300);
    double hi = std::log(0.5);
    double mlo = margin(lo);
    double mhi = margin(hi);
    if (!(mlo < 0.0) || !(mhi > 0.0))
        throw numerical_error("vwap_powerlaw_sign_change_gap: bracket failed");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (margin(mid) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return std::exp(0.5 * (lo + hi));
}

}  // namespace timexec
