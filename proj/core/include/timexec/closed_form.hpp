#ifndef TIMEXEC_CLOSED_FORM_HPP
#define TIMEXEC_CLOSED_FORM_HPP

#include <functional>

#include "timexec/kernel.hpp"

namespace timexec {

/*
 * Analytic continuous-time optimal schedule: two possible boundary impulses
 * plus an interior trading-rate density on (0, T).
 *
 * Impulse fields store delta-function COEFFICIENTS. A delta sitting exactly
 * on an interval endpoint only delivers half its coefficient to integrals
 * over the interval ("endpoint half-mass" convention), so the executed
 * masses are initial_impulse/2 and terminal_impulse/2, and
 *
 *   initial_impulse/2 + terminal_impulse/2 + \int_0^T rate(t) dt = total.
 */
struct ContinuousSchedule {
    double initial_impulse;              // delta-coefficient at t = 0
    double terminal_impulse;             // delta-coefficient at t = T
    std::function<double(double)> rate;  // shares/time, defined on (0, T)
    double horizon;                      // T
    double total;                        // x0
};

// Symmetric U-shaped rate minimizing impact cost against the pre-trade
// price: (x0/T) * 2^k Gamma(1+k/2) / (sqrt(pi) Gamma((1+k)/2)) *
// [t/T (1-t/T)]^{-(1-k)/2}. Integrable endpoint divergence of order
// (1-k)/2 < 1/2; integrates to x0.
double is_powerlaw_rate(double x0, double T, double kappa, double t);

// Exponential-kernel VWAP optimum: impulses at both ends plus a constant
// interior rate,
//   a1 = 2 x0 (1+rho T) / (rho T (2+rho T))      (delta-coefficient at 0)
//   b  =   x0 rho (1+rho T) / (rho T (2+rho T))  (constant rate)
//   a2 = -2 x0 / (rho T (2+rho T))               (delta-coefficient at T)
// Executed masses a1/2 + b*T + a2/2 sum to x0 exactly.
ContinuousSchedule vwap_exponential_schedule(double x0, double T, double rho);

// Power-law-kernel VWAP optimum:
//   v(t) = (x0/T) c_k [kappa + F(kappa, t/T)] / [t/T (1 - t/T)]^{(1-kappa)/2}
// with c_k = 2^{k-2} sqrt(pi) csc(k pi/2) / (Gamma(1-k/2) Gamma((1+k)/2))
// and F the fixed-parameter hypergeometric from special_functions.
// Positive (diverging) as t -> 0+, negative (diverging) as t -> T-.
double vwap_powerlaw_rate(double x0, double T, double kappa, double t);

// The benchmark-tracking component of the same solution:
//   w2(t) = (x0/T) [-1 + c_k F(kappa, t/T) / [t/T (1 - t/T)]^{(1-kappa)/2}],
// whose total mass is -x0/2. Satisfies pointwise
//   vwap_powerlaw_rate = w2 + x0/T + is-type rate of mass x0/2.
double w2_powerlaw_rate(double x0, double T, double kappa, double t);

// Close-benchmark decomposition: half the order trades as the symmetric
// IS-type profile, the other half executes in a terminal impulse (delta
// coefficient x0, delivering x0/2 under the half-mass convention). Only the
// PowerLaw kernel has this closed form; other variants must go through the
// quadrature solver and raise not_implemented_error here.
ContinuousSchedule target_close_decomposition(double x0, double T, const DecayKernel& g);

// Linear-rate comparison schedule v(t) = (x0/T) [(beta+1) - 2 beta t/T],
// integrating to x0 for every beta. beta > 1 turns the tail negative.
double almgren_chriss_baseline(double x0, double T, double beta, double t);

/*
 * The VWAP power-law rate is positive before ts and negative after it, with
 * exactly one sign change ts in (0, T). As kappa -> 1 the crossing runs into
 * T so fast that the fraction 1 - ts/T underflows any double that stores ts
 * directly (the gap is ~1e-26 already at kappa = 0.9), so the root is solved
 * in log(1 - t/T) space and returned as the GAP u = 1 - ts/T, which is
 * always representable; ts = T (1 - u).
 */
double vwap_powerlaw_sign_change_gap(double kappa);

}

#endif
