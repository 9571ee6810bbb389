#include "timexec/kernel.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include <boost/math/quadrature/tanh_sinh.hpp>

namespace timexec {

void validate(const DecayKernel& g) {
    std::visit(
        [](const auto& k) {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Exponential>) {
                if (!(k.rho > 0.0))
                    throw std::domain_error("Exponential kernel: rho must be > 0");
            } else if constexpr (std::is_same_v<K, PowerLaw>) {
                if (!(k.kappa > 0.0 && k.kappa < 1.0))
                    throw std::domain_error("PowerLaw kernel: kappa must lie in (0,1)");
            } else if constexpr (std::is_same_v<K, RegularizedPowerLaw>) {
                if (!(k.kappa > 0.0))
                    throw std::domain_error("RegularizedPowerLaw kernel: kappa must be > 0");
                if (!(k.c > 0.0))
                    throw std::domain_error("RegularizedPowerLaw kernel: offset c must be > 0");
            } else {
                if (!(k.level > 0.0))
                    throw std::domain_error("Constant kernel: level must be > 0");
            }
        },
        g);
}

double eval(const DecayKernel& g, double lag) {
    if (lag < 0.0) throw std::domain_error("kernel eval: lag must be >= 0");
    return std::visit(
        [lag](const auto& k) -> double {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Exponential>) {
                return std::exp(-k.rho * lag);
            } else if constexpr (std::is_same_v<K, PowerLaw>) {
                if (lag == 0.0)
                    throw std::domain_error(
                        "PowerLaw kernel is singular at lag 0; use cell-integrated weights");
                return std::pow(lag, -k.kappa);
            } else if constexpr (std::is_same_v<K, RegularizedPowerLaw>) {
                return 1.0 / (k.c + std::pow(lag, k.kappa));
            } else {
                return k.level;
            }
        },
        g);
}

bool finite_at_zero(const DecayKernel& g) {
    return !std::holds_alternative<PowerLaw>(g);
}

double antiderivative(const DecayKernel& g, double x) {
    if (x < 0.0) throw std::domain_error("kernel antiderivative: x must be >= 0");
    if (x == 0.0) return 0.0;
    return std::visit(
        [x](const auto& k) -> double {
            using K = std::decay_t<decltype(k)>;
            if constexpr (std::is_same_v<K, Exponential>) {
                // -expm1 keeps accuracy when rho*x is tiny
                return -std::expm1(-k.rho * x) / k.rho;
            } else if constexpr (std::is_same_v<K, PowerLaw>) {
                return std::pow(x, 1.0 - k.kappa) / (1.0 - k.kappa);
            } else if constexpr (std::is_same_v<K, RegularizedPowerLaw>) {
                // 1/(c + t^kappa) has no elementary antiderivative; the
                // integrand is bounded by 1/c and its only non-smooth point
                // is t = 0, which tanh-sinh absorbs.
                static thread_local boost::math::quadrature::tanh_sinh<double> integrator;
                const double c = k.c, kap = k.kappa;
                return integrator.integrate(
                    [c, kap](double t) { return 1.0 / (c + std::pow(t, kap)); }, 0.0, x,
                    1e-13);
            } else {
                return k.level * x;
            }
        },
        g);
}

Eigen::MatrixXd propagator_matrix(const DecayKernel& g, int n, double tau) {
    validate(g);
    if (n < 1) throw std::domain_error("propagator_matrix: n must be >= 1");
    if (!(tau > 0.0)) throw std::domain_error("propagator_matrix: tau must be > 0");
    if (!finite_at_zero(g))
        throw std::domain_error(
            "propagator_matrix: kernel is singular at lag 0; use a regularized kernel "
            "or quadrature cell weights");

    // Toeplitz: only n distinct values G(tau*m), m = 0..n-1.
    Eigen::VectorXd lags(n);
    for (int m = 0; m < n; ++m) lags[m] = eval(g, tau * m);

    Eigen::MatrixXd G = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) G(i, j) = lags[i - j];
    return G;
}

}
