#include "timexec/discrete.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "timexec/errors.hpp"

namespace timexec {

namespace {

// Lower-triangular all-ones matrix: (L eps)_l is the accumulated noise.
Eigen::MatrixXd cumsum_matrix(int n) {
    Eigen::MatrixXd L = Eigen::MatrixXd::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= i; ++j) L(i, j) = 1.0;
    return L;
}

void require_pd(const Eigen::MatrixXd& H, const char* what) {
    Eigen::LLT<Eigen::MatrixXd> llt(H);
    if (llt.info() != Eigen::Success) throw numerical_error(what);
}

Eigen::VectorXd window_eta(const MarketModel& model,
                           const std::optional<BenchmarkWindow>& window) {
    if (!window) return Eigen::VectorXd::Zero(model.N);
    return build_eta(model.volume, *window);
}

// KKT residual pieces shared by both solvers. g = Hx - b + nu is the
// stationarity gradient including the budget multiplier.
double kkt_defect(const Eigen::MatrixXd& H, const Eigen::VectorXd& b, double x0,
                  const Eigen::VectorXd& x, double nu, const std::vector<bool>& at_lower,
                  const std::vector<bool>& at_upper) {
    const int n = static_cast<int>(x.size());
    const Eigen::VectorXd g =
        H * x - b + Eigen::VectorXd::Constant(n, nu);
    double worst = std::abs(x.sum() - x0);
    for (int i = 0; i < n; ++i) {
        if (at_lower[i])
            worst = std::max(worst, std::max(0.0, -g[i]));  // needs g >= 0
        else if (at_upper[i])
            worst = std::max(worst, std::max(0.0, g[i]));  // needs g <= 0
        else
            worst = std::max(worst, std::abs(g[i]));
    }
    return worst;
}

SolveReport finish_report(const QPSpec& spec, Eigen::VectorXd x, double nu,
                          std::vector<int> active, double kkt) {
    SolveReport r;
    r.objective = x.dot(spec.A * x) - spec.b.dot(x);
    r.utility = -r.objective + spec.C;
    r.schedule = std::move(x);
    r.multiplier = nu;
    r.active_set = std::move(active);
    r.kkt_residual = kkt;
    return r;
}

}  // namespace

void MarketModel::validate() const {
    if (N < 1) throw std::domain_error("market model: N must be >= 1");
    if (!(k > 0.0) || !std::isfinite(k))
        throw std::domain_error("market model: impact coefficient k must be > 0");
    if (!(tau > 0.0) || !std::isfinite(tau))
        throw std::domain_error("market model: bucket length tau must be > 0");
    if (mu.size() != N) throw std::domain_error("market model: mu must have N entries");
    if (!mu.allFinite()) throw std::domain_error("market model: mu must be finite");
    if (volume.size() != N)
        throw std::domain_error("market model: volume must have N entries");
    if (!((volume.array() > 0.0).all()) || !volume.allFinite())
        throw std::domain_error("market model: volume must be strictly positive");
    if (Sigma.rows() != N || Sigma.cols() != N)
        throw std::domain_error("market model: Sigma must be N x N");
    if (!Sigma.allFinite()) throw std::domain_error("market model: Sigma must be finite");
    const double scale = Sigma.cwiseAbs().maxCoeff();
    if ((Sigma - Sigma.transpose()).cwiseAbs().maxCoeff() > 1e-12 * std::max(scale, 1.0))
        throw std::domain_error("market model: Sigma must be symmetric");
    Eigen::LLT<Eigen::MatrixXd> llt(Sigma);
    if (llt.info() != Eigen::Success)
        throw std::domain_error(
            "market model: Sigma must be positive definite (Cholesky failed)");
    if (!std::isfinite(S0)) throw std::domain_error("market model: S0 must be finite");
}

BenchmarkWindow BenchmarkWindow::from_times(double T1, double T2, int N, double T) {
    if (!(T > 0.0) || N < 1) throw std::domain_error("window rounding: need T > 0, N >= 1");
    if (!(0.0 <= T1) || !(T1 <= T2) || !(T2 <= T))
        throw std::domain_error("window rounding: need 0 <= T1 <= T2 <= T");
    const auto to_bucket = [&](double t) {
        const long l = std::lround(static_cast<double>(N) * t / T);
        return static_cast<int>(std::clamp(l, 1L, static_cast<long>(N)));
    };
    return BenchmarkWindow{to_bucket(T1), to_bucket(T2)};
}

void BenchmarkWindow::validate(int N) const {
    if (!(1 <= l1 && l1 <= l2 && l2 <= N))
        throw std::domain_error("benchmark window must satisfy 1 <= l1 <= l2 <= N");
}

Eigen::VectorXd build_eta(const Eigen::VectorXd& volume, const BenchmarkWindow& window) {
    const int N = static_cast<int>(volume.size());
    window.validate(N);
    double denom = 0.0;
    for (int l = window.l1; l <= window.l2; ++l) denom += volume[l - 1];
    if (!(denom > 0.0))
        throw std::domain_error("build_eta: window volume must be strictly positive");
    Eigen::VectorXd eta = Eigen::VectorXd::Zero(N);
    for (int l = window.l1; l <= window.l2; ++l) eta[l - 1] = volume[l - 1] / denom;
    return eta;
}

QPSpec build_qp(const MarketModel& model, const DecayKernel& g,
                const std::optional<BenchmarkWindow>& window, double gamma, double x0,
                bool cost_discretization, bool include_own_volume) {
    model.validate();
    if (!(gamma >= 0.0) || !std::isfinite(gamma))
        throw std::domain_error("build_qp: gamma must be >= 0");
    if (!std::isfinite(x0)) throw std::domain_error("build_qp: x0 must be finite");
    if (window) window->validate(model.N);

    const int N = model.N;
    Eigen::MatrixXd G = propagator_matrix(g, N, model.tau);
    if (cost_discretization) G.diagonal() *= 0.5;
    if (include_own_volume) {
        if (!window)
            throw std::domain_error("executed-volume correction needs a benchmark window");
        const double v0 = model.volume[0];
        if (((model.volume.array() - v0).abs() > 1e-12 * std::max(v0, 1.0)).any())
            throw std::domain_error(
                "executed-volume correction assumes a flat volume profile");
        G = executed_volume_correction(G, x0, *window, v0);
    }

    const Eigen::VectorXd eta = window_eta(model, window);
    const Eigen::MatrixXd L = cumsum_matrix(N);
    const Eigen::MatrixXd LSL = L * model.Sigma * L.transpose();

    QPSpec spec;
    spec.A = model.k * G + gamma * model.tau * LSL;
    spec.b = model.k * x0 * G.transpose() * eta +
             2.0 * gamma * model.tau * x0 * LSL * eta +
             std::sqrt(model.tau) * L * model.mu;
    spec.x0 = x0;
    spec.C = -(std::sqrt(model.tau) * x0 * eta.dot(L * model.mu) +
               gamma * model.tau * x0 * x0 * eta.dot(LSL * eta));
    return spec;
}

SolveReport solve_equality(const QPSpec& spec) {
    const int N = static_cast<int>(spec.b.size());
    if (spec.A.rows() != N || spec.A.cols() != N)
        throw std::domain_error("solve_equality: A and b shapes disagree");
    const Eigen::MatrixXd H = spec.A + spec.A.transpose();
    require_pd(H, "solve_equality: quadratic form is not positive definite");

    Eigen::MatrixXd K = Eigen::MatrixXd::Zero(N + 1, N + 1);
    K.topLeftCorner(N, N) = H;
    K.topRightCorner(N, 1).setOnes();
    K.bottomLeftCorner(1, N).setOnes();
    Eigen::VectorXd rhs(N + 1);
    rhs.head(N) = spec.b;
    rhs[N] = spec.x0;

    const Eigen::VectorXd y = Eigen::PartialPivLU<Eigen::MatrixXd>(K).solve(rhs);
    if (!y.allFinite()) throw numerical_error("solve_equality: singular KKT system");
    const Eigen::VectorXd x = y.head(N);
    const double nu = y[N];
    const std::vector<bool> none(N, false);
    return finish_report(spec, x, nu, {}, kkt_defect(H, spec.b, spec.x0, x, nu, none, none));
}

SolveReport solve_bounded(const QPSpec& spec) {
    if (!spec.lower && !spec.upper) return solve_equality(spec);
    const int N = static_cast<int>(spec.b.size());
    const double inf = std::numeric_limits<double>::infinity();
    const Eigen::VectorXd lo =
        spec.lower ? *spec.lower : Eigen::VectorXd::Constant(N, -inf);
    const Eigen::VectorXd up = spec.upper ? *spec.upper : Eigen::VectorXd::Constant(N, inf);
    if (lo.size() != N || up.size() != N)
        throw std::domain_error("solve_bounded: bounds must have one entry per bucket");
    for (int i = 0; i < N; ++i) {
        if (std::isnan(lo[i]) || std::isnan(up[i]))
            throw std::domain_error("solve_bounded: bounds must not be NaN");
        if (lo[i] > up[i])
            throw infeasible_error("solve_bounded: lower bound exceeds upper bound");
    }
    const double budget_tol = 1e-9 * (1.0 + std::abs(spec.x0));
    {
        double sum_lo = 0.0, sum_up = 0.0;
        bool lo_open = false, up_open = false;
        for (int i = 0; i < N; ++i) {
            if (std::isinf(lo[i])) lo_open = true; else sum_lo += lo[i];
            if (std::isinf(up[i])) up_open = true; else sum_up += up[i];
        }
        if (!lo_open && sum_lo > spec.x0 + budget_tol)
            throw infeasible_error("solve_bounded: lower bounds cannot meet the budget");
        if (!up_open && sum_up < spec.x0 - budget_tol)
            throw infeasible_error("solve_bounded: upper bounds cannot meet the budget");
    }

    const Eigen::MatrixXd H = spec.A + spec.A.transpose();
    require_pd(H, "solve_bounded: quadratic form is not positive definite");

    // Warm start: clip the unconstrained-over-bounds solution; every clipped
    // coordinate begins pinned at its bound.
    const Eigen::VectorXd x_eq = solve_equality(spec).schedule;
    std::vector<bool> at_lower(N, false), at_upper(N, false);
    for (int i = 0; i < N; ++i) {
        if (x_eq[i] < lo[i]) at_lower[i] = true;
        else if (x_eq[i] > up[i]) at_upper[i] = true;
    }

    const double scale = 1.0 + spec.b.cwiseAbs().maxCoeff();
    const double tol_mult = 1e-9 * scale;
    const double tol_feas = 1e-11 * (1.0 + std::abs(spec.x0));
    const int cap = 10 * N;

    Eigen::VectorXd x = Eigen::VectorXd::Zero(N);
    double nu = 0.0;
    for (int it = 0; it <= cap; ++it) {
        if (it == cap)
            throw numerical_error("solve_bounded: active-set iteration cap exceeded");

        std::vector<int> free;
        double pinned_sum = 0.0;
        for (int i = 0; i < N; ++i) {
            if (at_lower[i]) { x[i] = lo[i]; pinned_sum += lo[i]; }
            else if (at_upper[i]) { x[i] = up[i]; pinned_sum += up[i]; }
            else free.push_back(i);
        }

        const int F = static_cast<int>(free.size());
        if (F == 0) {
            if (std::abs(pinned_sum - spec.x0) > budget_tol)
                throw numerical_error(
                    "solve_bounded: every variable pinned but the budget is not met");
            // Best uniform multiplier for the sign test below.
            nu = (spec.b - H * x).mean();
        } else {
            Eigen::MatrixXd K = Eigen::MatrixXd::Zero(F + 1, F + 1);
            Eigen::VectorXd rhs(F + 1);
            for (int a = 0; a < F; ++a) {
                for (int c = 0; c < F; ++c) K(a, c) = H(free[a], free[c]);
                K(a, F) = 1.0;
                K(F, a) = 1.0;
                double adj = spec.b[free[a]];
                for (int i = 0; i < N; ++i)
                    if (at_lower[i] || at_upper[i]) adj -= H(free[a], i) * x[i];
                rhs[a] = adj;
            }
            rhs[F] = spec.x0 - pinned_sum;
            const Eigen::VectorXd y = Eigen::PartialPivLU<Eigen::MatrixXd>(K).solve(rhs);
            if (!y.allFinite())
                throw numerical_error("solve_bounded: singular working-set system");
            for (int a = 0; a < F; ++a) x[free[a]] = y[a];
            nu = y[F];

            // Pin the most violated bound, if any.
            int worst = -1;
            bool worst_low = true;
            double worst_gap = tol_feas;
            for (int a = 0; a < F; ++a) {
                const int i = free[a];
                if (lo[i] - x[i] > worst_gap) { worst_gap = lo[i] - x[i]; worst = i; worst_low = true; }
                if (x[i] - up[i] > worst_gap) { worst_gap = x[i] - up[i]; worst = i; worst_low = false; }
            }
            if (worst >= 0) {
                (worst_low ? at_lower : at_upper)[worst] = true;
                continue;
            }
        }

        // Release the pinned variable whose multiplier has the wrong sign.
        const Eigen::VectorXd g = H * x - spec.b + Eigen::VectorXd::Constant(N, nu);
        int release = -1;
        double worst_sign = tol_mult;
        for (int i = 0; i < N; ++i) {
            if (at_lower[i] && -g[i] > worst_sign) { worst_sign = -g[i]; release = i; }
            if (at_upper[i] && g[i] > worst_sign) { worst_sign = g[i]; release = i; }
        }
        if (release >= 0) {
            at_lower[release] = false;
            at_upper[release] = false;
            continue;
        }
        break;  // KKT holds
    }

    std::vector<int> active;
    for (int i = 0; i < N; ++i)
        if (at_lower[i] || at_upper[i]) active.push_back(i);
    return finish_report(spec, x, nu, std::move(active),
                         kkt_defect(H, spec.b, spec.x0, x, nu, at_lower, at_upper));
}

Eigen::MatrixXd executed_volume_correction(const Eigen::MatrixXd& G, double x0,
                                           const BenchmarkWindow& window, double V) {
    const int N = static_cast<int>(G.rows());
    window.validate(N);
    if (!(V > 0.0)) throw std::domain_error("executed_volume_correction: V must be > 0");
    const double delta = window.length();
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(N, N);
    for (int i = window.l1 - 1; i < window.l2; ++i)
        for (int j = window.l1 - 1; j < window.l2; ++j)
            M(i, j) = ((i == j ? 1.0 : 0.0) - 1.0 / delta) / V;
    return G - x0 * M;
}

double expected_excess_profit(const Eigen::VectorXd& x, const MarketModel& model,
                              const DecayKernel& g,
                              const std::optional<BenchmarkWindow>& window, double x0) {
    model.validate();
    if (x.size() != model.N)
        throw std::domain_error("expected_excess_profit: schedule must have N entries");
    const Eigen::VectorXd eta = window_eta(model, window);
    const Eigen::VectorXd y = x - x0 * eta;
    const Eigen::MatrixXd G = propagator_matrix(g, model.N, model.tau);
    const Eigen::VectorXd cum_mu = cumsum_matrix(model.N) * model.mu;
    return -model.k * y.dot(G * x) + std::sqrt(model.tau) * y.dot(cum_mu);
}

double expected_utility(const Eigen::VectorXd& x, const MarketModel& model,
                        const DecayKernel& g,
                        const std::optional<BenchmarkWindow>& window, double gamma,
                        double x0) {
    if (!(gamma >= 0.0)) throw std::domain_error("expected_utility: gamma must be >= 0");
    const double mean = expected_excess_profit(x, model, g, window, x0);
    const Eigen::VectorXd eta = window_eta(model, window);
    const Eigen::VectorXd y = x - x0 * eta;
    const Eigen::MatrixXd L = cumsum_matrix(model.N);
    const Eigen::VectorXd Ly = L.transpose() * y;  // y' L Sigma L' y via (L'y)
    return mean - gamma * model.tau * Ly.dot(model.Sigma * Ly);
}

SolveReport optimize_schedule(const MarketModel& model, const DecayKernel& g,
                              const std::optional<BenchmarkWindow>& window, double gamma,
                              double x0, const std::optional<Eigen::VectorXd>& lower,
                              const std::optional<Eigen::VectorXd>& upper,
                              bool cost_discretization, bool include_own_volume) {
    QPSpec spec = build_qp(model, g, window, gamma, x0, cost_discretization,
                           include_own_volume);
    spec.lower = lower;
    spec.upper = upper;
    SolveReport report = (lower || upper) ? solve_bounded(spec) : solve_equality(spec);
    report.expected_excess_profit =
        expected_excess_profit(report.schedule, model, g, window, x0);
    report.utility = expected_utility(report.schedule, model, g, window, gamma, x0);
    return report;
}

std::vector<ProfitPoint> profit_scan(const MarketModel& model, const DecayKernel& g,
                                     double gamma, double x0,
                                     const std::vector<BenchmarkWindow>& windows) {
    std::vector<ProfitPoint> table;
    table.reserve(windows.size());
    for (const auto& w : windows) {
        const SolveReport r = optimize_schedule(model, g, w, gamma, x0);
        table.push_back(ProfitPoint{w, r.expected_excess_profit});
    }
    return table;
}

}  // namespace timexec
