#ifndef TIMEXEC_SPECIAL_FUNCTIONS_HPP
#define TIMEXEC_SPECIAL_FUNCTIONS_HPP

namespace timexec {

// Gamma function for x > 0 via a Lanczos rational approximation (g = 7,
// 9 coefficients), relative accuracy well under 1e-12 on (0, 30].
// Throws std::domain_error for x <= 0.
double gamma(double x);

/*
 * The specific Gauss hypergeometric value the power-law schedules need:
 *
 *   F(kappa, z) = 2F1(1, kappa - 1; (1 + kappa)/2; z),   kappa in (0,1), z in [0,1].
 *
 * Evaluation: the Gauss series for z <= 1/2. For z > 1/2 the generic
 * z -> 1-z linear transformation collapses to an exact reflection,
 *
 *   F(z) + F(1 - z) = Q(kappa) [z (1 - z)]^{(1-kappa)/2},
 *
 * because the transformation's second 2F1 factor has equal second and third
 * parameters and is therefore elementary: 2F1(a, c; c; u) = (1-u)^{-a}.
 * Endpoints are exact: F(0) = 1, F(1) = -1.
 */
double hyp2f1_special(double kappa, double z);

// Q(kappa) above, computed from positive-argument Gamma values only:
//   Q = 2 Gamma((1+k)/2) sin(pi k) Gamma(1-k) / (sin(pi (1-k)/2) Gamma((1-k)/2)).
double hyp2f1_reflection_q(double kappa);

}

#endif
