#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "timexec/discrete.hpp"
#include "timexec/kernel.hpp"
#include "timexec/quadrature.hpp"
#include "timexec/special_functions.hpp"

using namespace timexec;

namespace {

MarketModel flat_model(int N) {
    MarketModel m;
    m.k = 1.0;
    m.tau = 1.0;
    m.N = N;
    m.mu = Eigen::VectorXd::Zero(N);
    m.Sigma = 0.01 * Eigen::MatrixXd::Identity(N, N);
    m.volume = Eigen::VectorXd::Constant(N, 1e4);
    return m;
}

const DecayKernel kDecay{RegularizedPowerLaw{0.5, 2.0}};

void BM_hyp2f1(benchmark::State& state) {
    double z = 0.0;
    for (auto _ : state) {
        z += 1.0 / 1024.0;
        if (z > 1.0) z -= 1.0;
        benchmark::DoNotOptimize(hyp2f1_special(0.4, z));
    }
}
BENCHMARK(BM_hyp2f1);

void BM_cell_weights(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    for (auto _ : state)
        benchmark::DoNotOptimize(cell_weights(DecayKernel{PowerLaw{0.5}}, N, 1.0));
    state.SetComplexityN(N);
}
BENCHMARK(BM_cell_weights)->RangeMultiplier(2)->Range(128, 1024)->Complexity();

void BM_flat_benchmark_solve(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    const IntegralEquationSpec spec =
        IntegralEquationSpec::flat(DecayKernel{PowerLaw{0.5}}, 1.0, 1.0, N);
    for (auto _ : state) benchmark::DoNotOptimize(solve_optimal_velocity(spec));
    state.SetComplexityN(N);
}
BENCHMARK(BM_flat_benchmark_solve)->RangeMultiplier(2)->Range(64, 512)->Complexity();

void BM_equality_solve(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    const QPSpec qp = build_qp(flat_model(N), kDecay, BenchmarkWindow::full(N), 0.5, 1000.0);
    for (auto _ : state) benchmark::DoNotOptimize(solve_equality(qp));
    state.SetComplexityN(N);
}
BENCHMARK(BM_equality_solve)->RangeMultiplier(2)->Range(50, 400)->Complexity();

void BM_long_only_solve(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    QPSpec qp = build_qp(flat_model(N), kDecay, BenchmarkWindow::full(N), 0.0, 1000.0);
    qp.lower = Eigen::VectorXd::Zero(N);
    for (auto _ : state) benchmark::DoNotOptimize(solve_bounded(qp));
}
BENCHMARK(BM_long_only_solve)->Arg(50)->Arg(100)->Arg(200);

void BM_build_qp(benchmark::State& state) {
    const int N = static_cast<int>(state.range(0));
    const MarketModel m = flat_model(N);
    for (auto _ : state)
        benchmark::DoNotOptimize(build_qp(m, kDecay, BenchmarkWindow::full(N), 0.5, 1000.0));
}
BENCHMARK(BM_build_qp)->Arg(100)->Arg(200);

}  // namespace

BENCHMARK_MAIN();
