#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "tlsdyn/gauge.hpp"
#include "tlsdyn/multiqubit.hpp"
#include "tlsdyn/oracle.hpp"
#include "tlsdyn/rate_operator.hpp"
#include "tlsdyn/spectral.hpp"

using namespace tlsdyn;

namespace {

std::vector<double> grid(double t_max, std::size_t n) {
    std::vector<double> g(n);
    for (std::size_t i = 0; i < n; ++i) g[i] = t_max * static_cast<double>(i) / static_cast<double>(n - 1);
    return g;
}

ParamSchedule ramp() {
    return ParamSchedule::with_nbar(Schedule(ExponentialApproach{0.3, 1.5, 0.8}),
                                    Schedule(ExponentialApproach{2.0, 0.4, 1.2}),
                                    Schedule(ExponentialApproach{3.0, 1.0, 0.5}));
}

DensityMatrix initial() { return DensityMatrix::pure(0.6, complex(0.0, 0.8)); }

void BM_GaugeIntegration(benchmark::State& st) {
    const auto p = ramp();
    const auto g = grid(10.0, 101);
    const double tol = std::pow(10.0, -static_cast<double>(st.range(0)));
    for (auto _ : st) benchmark::DoNotOptimize(integrate_gauge(p, g, tol));
}
BENCHMARK(BM_GaugeIntegration)->Arg(8)->Arg(10)->Arg(12);

void BM_Propagate(benchmark::State& st) {
    const auto p = ramp();
    const auto g = grid(10.0, static_cast<std::size_t>(st.range(0)));
    const DensityMatrix r0 = initial();
    for (auto _ : st) benchmark::DoNotOptimize(propagate(p, r0, g, 1e-10));
}
BENCHMARK(BM_Propagate)->Arg(11)->Arg(101)->Arg(1001);

void BM_OracleRK4(benchmark::State& st) {
    const auto p = ramp();
    const auto g = grid(10.0, 101);
    const DensityMatrix r0 = initial();
    for (auto _ : st) benchmark::DoNotOptimize(oracle::integrate_direct(p, r0, g, 2e-3));
}
BENCHMARK(BM_OracleRK4);

void BM_Expm(benchmark::State& st) {
    const DensityMatrix r0 = initial();
    double t = 0.0;
    for (auto _ : st) {
        t += 1e-3;
        benchmark::DoNotOptimize(oracle::expm_propagate(1.0, 1.0, 2.0, r0, t));
    }
}
BENCHMARK(BM_Expm);

void BM_Spectrum(benchmark::State& st) {
    for (auto _ : st) benchmark::DoNotOptimize(adjoint_eigensolutions(1.0, 1.0, 2.0));
}
BENCHMARK(BM_Spectrum);

void BM_DenseEigensolve(benchmark::State& st) {
    const SuperOp g = lindblad_superop_direct(Params{1.0, 1.0, 2.0});
    for (auto _ : st) benchmark::DoNotOptimize(oracle::dense_eigensolve(g));
}
BENCHMARK(BM_DenseEigensolve);

void BM_RegisterFactorized(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    std::vector<DensityMatrix> f(n, initial());
    const auto rho0 = ProductStateExpansion::product(f);
    const auto rs = RegisterSchedule::shared(ramp(), n);
    const auto g = grid(3.0, 31);
    for (auto _ : st) benchmark::DoNotOptimize(propagate_register(rs, rho0, g, 1e-10));
}
BENCHMARK(BM_RegisterFactorized)->DenseRange(1, 4);

void BM_RegisterDense(benchmark::State& st) {
    const auto n = static_cast<std::size_t>(st.range(0));
    std::vector<DensityMatrix> f(n, initial());
    const Eigen::MatrixXcd rho0 = ProductStateExpansion::product(f).to_dense();
    const std::vector<ParamSchedule> ps(n, ramp());
    const auto g = grid(3.0, 31);
    for (auto _ : st) benchmark::DoNotOptimize(oracle::integrate_register(ps, rho0, g, 2e-3 / static_cast<double>(n)));
}
BENCHMARK(BM_RegisterDense)->DenseRange(1, 2);

}  // namespace

BENCHMARK_MAIN();
