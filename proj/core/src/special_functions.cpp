#include "timexec/special_functions.hpp"

#include <cmath>
#include <stdexcept>

namespace timexec {

namespace {

// Lanczos approximation, g = 7, n = 9 (Godfrey's coefficients). Valid for
// x >= 0.5; smaller arguments go through Gamma(x) = Gamma(x+1)/x once.
constexpr double kLanczos[9] = {
    0.99999999999980993,  676.5203681218851,     -1259.1392167224028,
    771.32342877765313,   -176.61502916214059,   12.507343278686905,
    -0.13857109526572012, 9.9843695780195716e-6, 1.5056327351493116e-7,
};

double lanczos_gamma(double x) {
    if (x < 0.5) return lanczos_gamma(x + 1.0) / x;
    const double z = x - 1.0;
    double a = kLanczos[0];
    for (int i = 1; i < 9; ++i) a += kLanczos[i] / (z + i);
    const double t = z + 7.5;
    return std::sqrt(2.0 * M_PI) * std::pow(t, z + 0.5) * std::exp(-t) * a;
}

void check_params(double kappa, double z) {
    if (!(kappa > 0.0 && kappa < 1.0))
        throw std::domain_error("hyp2f1_special: kappa must lie in (0,1)");
    if (!(z >= 0.0 && z <= 1.0))
        throw std::domain_error("hyp2f1_special: z must lie in [0,1]");
}

// Gauss series of 2F1(1, b; c; z) with b = kappa-1, c = (1+kappa)/2. With
// first parameter 1 the series is sum_n (b)_n/(c)_n z^n; every coefficient
// past n = 0 is negative (the single negative factor b survives in each
// Pochhammer product), so F is strictly decreasing in z.
double gauss_series(double kappa, double z) {
    const double b = kappa - 1.0;
    const double c = 0.5 * (1.0 + kappa);
    double term = 1.0, sum = 1.0;
    for (int n = 0; n < 500; ++n) {
        term *= (b + n) / (c + n) * z;
        sum += term;
        if (std::abs(term) <= 1e-17 * std::abs(sum)) break;
    }
    return sum;
}

}

double gamma(double x) {
    if (!(x > 0.0)) throw std::domain_error("gamma: argument must be > 0");
    return lanczos_gamma(x);
}

double hyp2f1_reflection_q(double kappa) {
    if (!(kappa > 0.0 && kappa < 1.0))
        throw std::domain_error("hyp2f1_reflection_q: kappa must lie in (0,1)");
    const double k = kappa;
    return 2.0 * gamma(0.5 * (1.0 + k)) * std::sin(M_PI * k) * gamma(1.0 - k) /
           (std::sin(M_PI * 0.5 * (1.0 - k)) * gamma(0.5 * (1.0 - k)));
}

double hyp2f1_special(double kappa, double z) {
    check_params(kappa, z);
    if (z == 0.0) return 1.0;
    if (z == 1.0) return -1.0;
    if (z <= 0.5) return gauss_series(kappa, z);
    const double u = 1.0 - z;
    return hyp2f1_reflection_q(kappa) * std::pow(z * u, 0.5 * (1.0 - kappa)) -
           gauss_series(kappa, u);
}

}
