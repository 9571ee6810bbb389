#ifndef TIMEXEC_DISCRETE_HPP
#define TIMEXEC_DISCRETE_HPP

#include <Eigen/Core>
#include <limits>
#include <optional>
#include <vector>

#include "timexec/kernel.hpp"

namespace timexec {

/*
 * Discrete bucketed market. Over bucket l the trader prints x_l shares; the
 * price follows
 *
 *   S_l = S0 - k sum_{i <= l} G((l-i) tau) x_i + tau^{1/2} sum_{i <= l} eps_i,
 *
 * with eps ~ N(mu, Sigma). S0 never enters the optimization (it cancels
 * against the benchmark); it is carried for reporting only.
 */
struct MarketModel {
    double k = 0.0;          // impact coefficient, price per share
    double tau = 0.0;        // bucket length
    int N = 0;               // number of buckets
    Eigen::VectorXd mu;      // per-bucket innovation drift
    Eigen::MatrixXd Sigma;   // innovation covariance, symmetric PD
    Eigen::VectorXd volume;  // market volume per bucket, strictly positive
    double S0 = 0.0;

    // Throws std::domain_error on bad shapes/signs or when Sigma fails the
    // symmetric positive-definite (Cholesky) certificate.
    void validate() const;
};

// Benchmark averaging window in 1-based bucket indices, l1 <= l <= l2.
struct BenchmarkWindow {
    int l1 = 1;
    int l2 = 1;

    static BenchmarkWindow full(int N) { return {1, N}; }
    // Nearest-integer bucket for a continuous time: l = round(N t / T),
    // clamped into [1, N] so a window starting at t = 0 lands on bucket 1.
    static BenchmarkWindow from_times(double T1, double T2, int N, double T);

    void validate(int N) const;
    bool contains(int l) const { return l1 <= l && l <= l2; }
    int length() const { return l2 - l1 + 1; }
};

/*
 * Equality-constrained quadratic program  min_x x'Ax - b'x  s.t.  1'x = x0,
 * optionally boxed by lower/upper. The constant C makes
 *
 *   expected utility = -(x'Ax - b'x) + C
 *
 * an identity, so reports can quote utilities without the market model.
 */
struct QPSpec {
    Eigen::MatrixXd A;
    Eigen::VectorXd b;
    double x0 = 0.0;
    double C = 0.0;
    std::optional<Eigen::VectorXd> lower;  // entries may be -inf
    std::optional<Eigen::VectorXd> upper;  // entries may be +inf
};

struct SolveReport {
    Eigen::VectorXd schedule;         // bucket shares, sums to x0
    double multiplier = 0.0;          // budget-constraint multiplier
    std::vector<int> active_set;      // 0-based indices held at a bound
    double kkt_residual = 0.0;
    double objective = 0.0;           // x'Ax - b'x
    double utility = 0.0;             // -(objective) + C
    double expected_excess_profit =
        std::numeric_limits<double>::quiet_NaN();  // filled by optimize_schedule
};

// eta_l = V_l / sum_{j in window} V_j inside the window, 0 outside.
Eigen::VectorXd build_eta(const Eigen::VectorXd& volume, const BenchmarkWindow& window);

/*
 * Assembles the QP of the mean-variance objective
 *
 *   A = k G + gamma tau L Sigma L',
 *   b = k x0 G' eta + 2 gamma tau x0 L Sigma L' eta + tau^{1/2} L mu,
 *   C = -(tau^{1/2} x0 eta' L mu + gamma tau x0^2 eta' L Sigma L' eta),
 *
 * with G the lower-triangular propagator and L the lower-triangular
 * all-ones (cumulative sum) matrix. No window means an arrival-price
 * benchmark: eta == 0.
 *
 * cost_discretization halves the diagonal of G (trapezoidal reading of the
 * continuous cost integral) instead of the default, which keeps the full
 * G(0) diagonal as the price-path recursion implies.
 *
 * include_own_volume applies the executed-volume correction
 * G -> G - x0 M (see executed_volume_correction); it requires a window and
 * a flat volume profile.
 */
QPSpec build_qp(const MarketModel& model, const DecayKernel& g,
                const std::optional<BenchmarkWindow>& window, double gamma, double x0,
                bool cost_discretization = false, bool include_own_volume = false);

// Exact KKT solve of [(A+A'), 1; 1', 0] [x; nu] = [b; x0]. Throws
// numerical_error when the symmetrized A fails its Cholesky certificate.
SolveReport solve_equality(const QPSpec& spec);

/*
 * Primal active-set solve honoring spec.lower/spec.upper. Starts from the
 * equality solution, pins the most violated bound, re-solves on the free
 * variables, and releases pinned variables whose multiplier has the wrong
 * sign, until the KKT conditions hold. Bounds that cannot accommodate the
 * budget raise infeasible_error; more than 10 N iterations raise
 * numerical_error. Without bounds this reduces to solve_equality.
 */
SolveReport solve_bounded(const QPSpec& spec);

// G - x0 M where M_ij = (1/V) I_{i in B} I_{j in B} (delta_ij - 1/Delta),
// Delta the window length: first-order impact of the trader's own prints on
// the benchmark volume average, valid in the |x_l| << V regime.
Eigen::MatrixXd executed_volume_correction(const Eigen::MatrixXd& G, double x0,
                                           const BenchmarkWindow& window, double V);

// E[(x - x0 eta)' S] = -k (x - x0 eta)' G x + tau^{1/2} (x - x0 eta)' L mu.
// The S0 term cancels because both x and x0 eta sum to x0. No window means
// eta == 0 (arrival-price benchmark).
double expected_excess_profit(const Eigen::VectorXd& x, const MarketModel& model,
                              const DecayKernel& g,
                              const std::optional<BenchmarkWindow>& window, double x0);

// Mean minus gamma times variance: expected_excess_profit
// - gamma tau (x - x0 eta)' L Sigma L' (x - x0 eta).
double expected_utility(const Eigen::VectorXd& x, const MarketModel& model,
                        const DecayKernel& g,
                        const std::optional<BenchmarkWindow>& window, double gamma,
                        double x0);

// build_qp + solve (+bounds) + profit/utility evaluation in one call.
SolveReport optimize_schedule(const MarketModel& model, const DecayKernel& g,
                              const std::optional<BenchmarkWindow>& window, double gamma,
                              double x0,
                              const std::optional<Eigen::VectorXd>& lower = {},
                              const std::optional<Eigen::VectorXd>& upper = {},
                              bool cost_discretization = false,
                              bool include_own_volume = false);

struct ProfitPoint {
    BenchmarkWindow window;
    double profit;
};

// Risk-neutral unconstrained profit for each window (build, solve, evaluate).
std::vector<ProfitPoint> profit_scan(const MarketModel& model, const DecayKernel& g,
                                     double gamma, double x0,
                                     const std::vector<BenchmarkWindow>& windows);

}

#endif
