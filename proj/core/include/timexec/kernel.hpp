#ifndef TIMEXEC_KERNEL_HPP
#define TIMEXEC_KERNEL_HPP

#include <variant>

#include <Eigen/Dense>

namespace timexec {

/*
 * Decay kernels G(t): the propagator weighting how a past trade still moves
 * the price after a given lag. Every variant is non-negative and
 * non-increasing in the lag.
 *
 *   Exponential           e^{-rho t}          rho > 0
 *   PowerLaw              t^{-kappa}          0 < kappa < 1, singular at 0
 *   RegularizedPowerLaw   1/(c + t^kappa)     kappa > 0, c > 0, finite at 0
 *   Constant              level               level > 0
 */
struct Exponential {
    double rho;
};
struct PowerLaw {
    double kappa;
};
struct RegularizedPowerLaw {
    double kappa;
    double c = 2.0;
};
struct Constant {
    double level;
};

using DecayKernel = std::variant<Exponential, PowerLaw, RegularizedPowerLaw, Constant>;

// Throws std::domain_error when a variant's parameters leave its valid range.
void validate(const DecayKernel& g);

// G(lag). PowerLaw at lag = 0 throws std::domain_error: the singularity is
// integrable but not evaluable, so callers must switch to cell-integrated
// weights (see quadrature::cell_weights).
double eval(const DecayKernel& g, double lag);

bool finite_at_zero(const DecayKernel& g);

// \int_0^x G(u) du, x >= 0. Analytic for Exponential / PowerLaw / Constant;
// tanh-sinh quadrature for RegularizedPowerLaw, which has no elementary
// antiderivative.
double antiderivative(const DecayKernel& g, double x);

// Lower-triangular Toeplitz propagator: G_ij = G(tau (i - j)) for i >= j,
// zero above the diagonal. Requires a kernel finite at lag 0 (PowerLaw is
// rejected with std::domain_error).
Eigen::MatrixXd propagator_matrix(const DecayKernel& g, int n, double tau);

}

#endif
