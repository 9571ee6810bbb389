#ifndef TIMEXEC_QUADRATURE_HPP
#define TIMEXEC_QUADRATURE_HPP

#include <Eigen/Core>
#include <functional>
#include <variant>
#include <vector>

#include "timexec/kernel.hpp"

namespace timexec {

/*
 * How the benchmark volume profile eta enters the optimality equation
 *
 *   \int_0^T G(|t-s|) v_s ds - x0 \int_t^T eta_s G(s-t) ds = lambda,  t in (0,T),
 *   tau * sum(v) = x0.
 *
 * Window and sampled profiles describe a genuine density on [0, T]. The two
 * impulse encodings replace the eta integral analytically instead of
 * approximating a Dirac spike on the grid:
 *   - PreTradeImpulse: all benchmark volume prints before trading starts, so
 *     the look-ahead integral vanishes and the rhs is zero (arrival-price /
 *     implementation-shortfall benchmark).
 *   - CloseImpulse: all benchmark volume prints at t = T, so the look-ahead
 *     integral is x0 * G(T - t) exactly (target-close benchmark).
 */
struct WindowProfile {
    std::function<double(double)> density;  // eta(t), 1/time, on [t1, t2]
    double t1;
    double t2;
};
struct SampledProfile {
    std::vector<double> values;  // eta at the N cell midpoints, 1/time
};
struct PreTradeImpulse {};
struct CloseImpulse {};

using VolumeProfile =
    std::variant<WindowProfile, SampledProfile, PreTradeImpulse, CloseImpulse>;

struct IntegralEquationSpec {
    DecayKernel kernel;
    double x0 = 0.0;  // shares to execute
    double T = 1.0;   // horizon
    int N = 0;        // number of grid cells
    VolumeProfile eta = PreTradeImpulse{};

    // Flat benchmark density over the whole horizon (TWAP-style VWAP).
    static IntegralEquationSpec flat(DecayKernel g, double x0, double T, int N);
    // Flat benchmark density over a sub-window [t1, t2] of the horizon.
    static IntegralEquationSpec flat_window(DecayKernel g, double x0, double T, int N,
                                            double t1, double t2);
    // Arrival-price benchmark (all benchmark volume pre-trade).
    static IntegralEquationSpec pre_trade(DecayKernel g, double x0, double T, int N);
    // Target-close benchmark (all benchmark volume at t = T).
    static IntegralEquationSpec at_close(DecayKernel g, double x0, double T, int N);

    // Benchmark rate per cell, averaged over each cell for window profiles;
    // the zero vector for the impulse encodings.
    Eigen::VectorXd cell_eta() const;

    // Checks kernel parameters, scalar fields, N >= 4, and the profile:
    // eta >= 0 and tau * sum(cell_eta) == 1 within 1e-10.
    void validate() const;
};

struct QuadratureSolution {
    Eigen::VectorXd grid;      // N cell midpoints
    Eigen::VectorXd velocity;  // shares/time on each cell
    double lambda = 0.0;       // multiplier; 0 for the unconstrained w2 solve
    double residual = 0.0;     // max |equation defect| at off-collocation points
    double tau = 0.0;          // cell width T/N

    double mass() const { return tau * velocity.sum(); }
};

// Product-integration weights W_{ij} = \int_{cell j} G(|t_i - s|) ds with t_i
// the midpoint of cell i. Exact cell integrals via the kernel antiderivative,
// so the weakly singular PowerLaw diagonal stays finite:
// W_{ii} = 2 g1(tau/2), W_{ij} = g1((m+1/2)tau) - g1((m-1/2)tau), m = |i-j|.
Eigen::MatrixXd cell_weights(const DecayKernel& g, int N, double T);

// Solves the (N+1)x(N+1) saddle system [W, 1; 1' tau, 0] [v; -lambda] =
// [rhs; x0] where rhs_i = x0 \int_{t_i}^T eta_s G(s - t_i) ds under the same
// product rule (the cell containing t_i contributes its upper half). The
// defect of the full equation is then measured at the cell quarter points,
// which are never collocation nodes. Throws numerical_error if the solve is
// degenerate.
QuadratureSolution solve_optimal_velocity(const IntegralEquationSpec& spec);

// Benchmark-tracking component: plain N x N solve of
//   \int_0^T G(|t-s|) w2_s ds = -x0 \int_0^t eta_s G(t-s) ds
// with no mass constraint; QuadratureSolution::mass() recovers the total
// (-x0/2 for a flat profile as N grows). Impulse encodings give a zero rhs
// and hence w2 == 0.
QuadratureSolution solve_w2(const IntegralEquationSpec& spec);

}

#endif
