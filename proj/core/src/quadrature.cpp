#include "timexec/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

#include "timexec/errors.hpp"

namespace timexec {

namespace {

// 16-point Gauss-Legendre rule on [-1, 1] (positive abscissae; symmetric).
constexpr int kGaussN = 8;
constexpr double kGaussX[kGaussN] = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274, 0.6178762444026438,
    0.7554044083550030, 0.8656312023878318, 0.9445750230732326, 0.9894009349916499};
constexpr double kGaussW[kGaussN] = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025, 0.1495959888165767,
    0.1246289712555339, 0.0951585116824928, 0.0622535239386479, 0.0271524594117541};

double gauss16(const std::function<double(double)>& f, double a, double b) {
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int k = 0; k < kGaussN; ++k)
        acc += kGaussW[k] * (f(mid - half * kGaussX[k]) + f(mid + half * kGaussX[k]));
    return half * acc;
}

/*
 * Every integral the solver needs is a difference of kernel antiderivatives
 * g1(x) = \int_0^x G, evaluated at quarter-cell multiples of tau: the weight
 * matrix and midpoint right-hand sides use half-integer multiples, and the
 * off-collocation defect probes at cell quarter points add the odd quarters.
 * One table q[k] = g1(k tau/4) therefore serves everything — important for
 * RegularizedPowerLaw, whose antiderivative is itself a quadrature.
 */
std::vector<double> quarter_antiderivatives(const DecayKernel& g, int N, double tau) {
    std::vector<double> q(4 * static_cast<std::size_t>(N) + 4);
    for (std::size_t k = 0; k < q.size(); ++k)
        q[k] = antiderivative(g, static_cast<double>(k) * tau / 4.0);
    return q;
}

Eigen::MatrixXd weights_from_table(const std::vector<double>& q, int N) {
    Eigen::VectorXd band(N);
    band[0] = 2.0 * q[2];  // \int_{-tau/2}^{tau/2} G(|u|) du
    for (int m = 1; m < N; ++m) band[m] = q[4 * m + 2] - q[4 * m - 2];
    Eigen::MatrixXd W(N, N);
    for (int i = 0; i < N; ++i)
        for (int j = 0; j < N; ++j) W(i, j) = band[std::abs(i - j)];
    return W;
}

// x0 \int_{t_i}^T eta_s G(s - t_i) ds at the collocation midpoints: the cell
// containing t_i contributes only its upper half [t_i, t_i + tau/2].
Eigen::VectorXd lookahead_rhs(const std::vector<double>& q, const Eigen::VectorXd& e,
                              double x0, int N) {
    Eigen::VectorXd r(N);
    for (int i = 0; i < N; ++i) {
        double acc = e[i] * q[2];
        for (int j = i + 1; j < N; ++j)
            acc += e[j] * (q[4 * (j - i) + 2] - q[4 * (j - i) - 2]);
        r[i] = x0 * acc;
    }
    return r;
}

// -x0 \int_0^{t_i} eta_s G(t_i - s) ds: mirror image (lower half-cell).
Eigen::VectorXd lookback_rhs(const std::vector<double>& q, const Eigen::VectorXd& e,
                             double x0, int N) {
    Eigen::VectorXd r(N);
    for (int i = 0; i < N; ++i) {
        double acc = e[i] * q[2];
        for (int j = 0; j < i; ++j)
            acc += e[j] * (q[4 * (i - j) + 2] - q[4 * (i - j) - 2]);
        r[i] = -x0 * acc;
    }
    return r;
}

// \int_{cell j} G(|t - s|) ds at the quarter point t = (i + 1/2 + s/4) tau,
// s = -1 or +1, expressed through the quarter table.
double quarter_weight(const std::vector<double>& q, int i, int j, int s) {
    if (j < i) return q[4 * (i - j) + 2 + s] - q[4 * (i - j) + s - 2];
    if (j > i) return q[4 * (j - i) + 2 - s] - q[4 * (j - i) - 2 - s];
    return q[2 + s] + q[2 - s];
}

enum class Side { lookahead, lookback };

// Benchmark integral at the quarter point t = (i + 1/2 + s/4) tau for a
// density profile; impulse encodings are handled by the callers.
double quarter_eta_integral(const std::vector<double>& q, const Eigen::VectorXd& e,
                            int i, int s, int N, Side side) {
    if (side == Side::lookahead) {
        double acc = e[i] * q[2 - s];  // partial cell [t, b_i]
        for (int j = i + 1; j < N; ++j)
            acc += e[j] * (q[4 * (j - i) + 2 - s] - q[4 * (j - i) - 2 - s]);
        return acc;
    }
    double acc = e[i] * q[2 + s];  // partial cell [a_i, t]
    for (int j = 0; j < i; ++j)
        acc += e[j] * (q[4 * (i - j) + 2 + s] - q[4 * (i - j) + s - 2]);
    return acc;
}

// Max |W(t) v - rhs(t) - lambda| over the 2N quarter points, where rhs(t) is
// rebuilt from the spec at each probe. Collocation nodes are midpoints, so
// the quarter points genuinely test the continuous equation.
double offgrid_defect(const IntegralEquationSpec& spec, const std::vector<double>& q,
                      const Eigen::VectorXd& e, const Eigen::VectorXd& v, double lambda,
                      Side side) {
    const int N = spec.N;
    const double tau = spec.T / N;
    double worst = 0.0;
    for (int i = 0; i < N; ++i) {
        for (int s = -1; s <= 1; s += 2) {
            double lhs = 0.0;
            for (int j = 0; j < N; ++j) lhs += quarter_weight(q, i, j, s) * v[j];
            double bench = 0.0;
            if (std::holds_alternative<CloseImpulse>(spec.eta)) {
                if (side == Side::lookahead) {
                    const double gap = (static_cast<double>(N - i) - (2.0 + s) / 4.0) * tau;
                    bench = eval(spec.kernel, gap);
                }
            } else if (!std::holds_alternative<PreTradeImpulse>(spec.eta)) {
                bench = quarter_eta_integral(q, e, i, s, N, side);
            }
            const double sign = (side == Side::lookahead) ? 1.0 : -1.0;
            const double r = lhs - sign * spec.x0 * bench - lambda;
            worst = std::max(worst, std::abs(r));
        }
    }
    return worst;
}

void check_solution(const Eigen::MatrixXd& A, const Eigen::VectorXd& x,
                    const Eigen::VectorXd& b) {
    if (!x.allFinite()) throw numerical_error("quadrature solve produced non-finite values");
    const double defect = (A * x - b).norm();
    const double scale = b.norm() + A.norm() * x.norm();
    if (defect > 1e-8 * (scale + 1.0))
        throw numerical_error("quadrature solve is degenerate (singular saddle system)");
}

}  // namespace

IntegralEquationSpec IntegralEquationSpec::flat(DecayKernel g, double x0, double T,
                                                int N) {
    return flat_window(std::move(g), x0, T, N, 0.0, T);
}

IntegralEquationSpec IntegralEquationSpec::flat_window(DecayKernel g, double x0, double T,
                                                       int N, double t1, double t2) {
    const double h = 1.0 / (t2 - t1);
    return IntegralEquationSpec{std::move(g), x0, T, N,
                                WindowProfile{[h](double) { return h; }, t1, t2}};
}

IntegralEquationSpec IntegralEquationSpec::pre_trade(DecayKernel g, double x0, double T,
                                                     int N) {
    return IntegralEquationSpec{std::move(g), x0, T, N, PreTradeImpulse{}};
}

IntegralEquationSpec IntegralEquationSpec::at_close(DecayKernel g, double x0, double T,
                                                    int N) {
    return IntegralEquationSpec{std::move(g), x0, T, N, CloseImpulse{}};
}

Eigen::VectorXd IntegralEquationSpec::cell_eta() const {
    const double tau = T / N;
    Eigen::VectorXd e = Eigen::VectorXd::Zero(N);
    if (const auto* w = std::get_if<WindowProfile>(&eta)) {
        for (int i = 0; i < N; ++i) {
            const double a = std::max(i * tau, w->t1);
            const double b = std::min((i + 1) * tau, w->t2);
            if (b > a) e[i] = gauss16(w->density, a, b) / tau;
        }
    } else if (const auto* s = std::get_if<SampledProfile>(&eta)) {
        if (static_cast<int>(s->values.size()) != N)
            throw std::domain_error("sampled benchmark profile must have one value per cell");
        for (int i = 0; i < N; ++i) e[i] = s->values[i];
    }
    return e;
}

void IntegralEquationSpec::validate() const {
    timexec::validate(kernel);
    if (!std::isfinite(x0)) throw std::domain_error("x0 must be finite");
    if (!(T > 0.0) || !std::isfinite(T)) throw std::domain_error("horizon T must be positive");
    if (N < 4) throw std::domain_error("grid size N must be at least 4");
    if (const auto* w = std::get_if<WindowProfile>(&eta)) {
        if (!w->density) throw std::domain_error("window profile needs a density callable");
        if (!(0.0 <= w->t1) || !(w->t1 < w->t2) || !(w->t2 <= T))
            throw std::domain_error("benchmark window must satisfy 0 <= t1 < t2 <= T");
    }
    if (std::holds_alternative<WindowProfile>(eta) ||
        std::holds_alternative<SampledProfile>(eta)) {
        const Eigen::VectorXd e = cell_eta();
        if ((e.array() < -1e-12).any())
            throw std::domain_error("benchmark profile must be non-negative");
        const double tau = T / N;
        if (std::abs(tau * e.sum() - 1.0) > 1e-10)
            throw std::domain_error("benchmark profile must integrate to 1 (within 1e-10)");
    }
}

Eigen::MatrixXd cell_weights(const DecayKernel& g, int N, double T) {
    timexec::validate(g);
    if (N < 1) throw std::domain_error("cell_weights: N must be >= 1");
    if (!(T > 0.0)) throw std::domain_error("cell_weights: T must be > 0");
    return weights_from_table(quarter_antiderivatives(g, N, T / N), N);
}

QuadratureSolution solve_optimal_velocity(const IntegralEquationSpec& spec) {
    spec.validate();
    const int N = spec.N;
    const double tau = spec.T / N;
    const auto q = quarter_antiderivatives(spec.kernel, N, tau);
    const Eigen::VectorXd e = spec.cell_eta();

    Eigen::VectorXd rhs;
    if (std::holds_alternative<PreTradeImpulse>(spec.eta)) {
        rhs = Eigen::VectorXd::Zero(N);
    } else if (std::holds_alternative<CloseImpulse>(spec.eta)) {
        rhs.resize(N);
        for (int i = 0; i < N; ++i)
            rhs[i] = spec.x0 * eval(spec.kernel, (N - i - 0.5) * tau);
    } else {
        rhs = lookahead_rhs(q, e, spec.x0, N);
    }

    // Saddle system: unknowns [v; -lambda]; last row enforces tau * sum(v) = x0.
    Eigen::MatrixXd A = Eigen::MatrixXd::Zero(N + 1, N + 1);
    A.topLeftCorner(N, N) = weights_from_table(q, N);
    A.topRightCorner(N, 1).setOnes();
    A.bottomLeftCorner(1, N).setConstant(tau);
    Eigen::VectorXd b(N + 1);
    b.head(N) = rhs;
    b[N] = spec.x0;

    const Eigen::VectorXd y = Eigen::PartialPivLU<Eigen::MatrixXd>(A).solve(b);
    check_solution(A, y, b);

    QuadratureSolution sol;
    sol.tau = tau;
    sol.grid.resize(N);
    for (int i = 0; i < N; ++i) sol.grid[i] = (i + 0.5) * tau;
    sol.velocity = y.head(N);
    sol.lambda = -y[N];
    sol.residual = offgrid_defect(spec, q, e, sol.velocity, sol.lambda, Side::lookahead);
    return sol;
}

QuadratureSolution solve_w2(const IntegralEquationSpec& spec) {
    spec.validate();
    const int N = spec.N;
    const double tau = spec.T / N;
    const auto q = quarter_antiderivatives(spec.kernel, N, tau);
    const Eigen::VectorXd e = spec.cell_eta();

    // Impulse benchmarks place no volume inside (0, t), so the look-back
    // integral — and with it w2 — vanishes identically.
    Eigen::VectorXd rhs;
    const bool impulse = std::holds_alternative<PreTradeImpulse>(spec.eta) ||
                         std::holds_alternative<CloseImpulse>(spec.eta);
    if (impulse)
        rhs = Eigen::VectorXd::Zero(N);
    else
        rhs = lookback_rhs(q, e, spec.x0, N);

    const Eigen::MatrixXd W = weights_from_table(q, N);
    const Eigen::VectorXd w = Eigen::PartialPivLU<Eigen::MatrixXd>(W).solve(rhs);
    check_solution(W, w, rhs);

    QuadratureSolution sol;
    sol.tau = tau;
    sol.grid.resize(N);
    for (int i = 0; i < N; ++i) sol.grid[i] = (i + 0.5) * tau;
    sol.velocity = w;
    sol.lambda = 0.0;
    sol.residual = offgrid_defect(spec, q, e, w, 0.0, Side::lookback);
    return sol;
}

}  // namespace timexec
