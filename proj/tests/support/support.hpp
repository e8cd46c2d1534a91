#pragma once

// Shared fixtures for the test suites: seeded random inputs and reference
// solutions written directly with 2x2 matrix arithmetic, independent of the
// superoperator machinery under test.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "tlsdyn/schedule.hpp"
#include "tlsdyn/superalgebra.hpp"

namespace tlsdyn::test {

using Mat2 = Eigen::Matrix2cd;

inline std::mt19937_64& rng() {
    static std::mt19937_64 gen(0x5eedULL);
    return gen;
}

inline double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng()); }

inline double gauss() { return std::normal_distribution<double>(0.0, 1.0)(rng()); }

inline complex cgauss() { return {gauss(), gauss()}; }

inline Params random_params() { return {uniform(0.1, 3.0), uniform(0.0, 4.0), uniform(-5.0, 5.0)}; }

inline Mat2 random_matrix() {
    Mat2 m;
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m(i, j) = cgauss();
    return m;
}

/// Ginibre mixed state G G^dagger / Tr; full rank with probability 1.
inline DensityMatrix random_state() {
    const Mat2 g = random_matrix();
    Mat2 r = g * g.adjoint();
    r /= r.trace();
    return DensityMatrix(r);
}

inline std::pair<complex, complex> random_pure_amplitudes() {
    complex mu = cgauss(), nu = cgauss();
    const double n = std::sqrt(std::norm(mu) + std::norm(nu));
    return {mu / n, nu / n};
}

inline Mat2 sz() { return (Mat2() << 1, 0, 0, -1).finished(); }
inline Mat2 sp() { return (Mat2() << 0, 1, 0, 0).finished(); }  // |+1><-1|
inline Mat2 sm() { return (Mat2() << 0, 0, 1, 0).finished(); }  // |-1><+1|

/// Master-equation right-hand side with H = w0 sz / 2 and the two thermal
/// jump channels, evaluated by plain matrix products.
inline Mat2 lindblad_rhs(const Params& p, const Mat2& rho) {
    const complex i(0.0, 1.0);
    const Mat2 h = 0.5 * p.omega0 * sz();
    Mat2 d = -i * (h * rho - rho * h);
    const Mat2 pm = sp() * sm(), mp = sm() * sp();
    d += p.gamma * (p.nbar + 1.0) * (sm() * rho * sp() - 0.5 * (pm * rho + rho * pm));
    d += p.gamma * p.nbar * (sp() * rho * sm() - 0.5 * (mp * rho + rho * mp));
    return d;
}

/// Fixed-step RK4 on the 2x2 matrix equation; returns rho at each grid time.
inline std::vector<Mat2> reference_trajectory(const std::function<Params(double)>& params, const Mat2& rho0,
                                              const std::vector<double>& grid, double dt) {
    std::vector<Mat2> out{rho0};
    Mat2 rho = rho0;
    for (std::size_t k = 1; k < grid.size(); ++k) {
        const double t0 = grid[k - 1];
        const auto n = static_cast<int>(std::ceil((grid[k] - t0) / dt));
        const double h = (grid[k] - t0) / n;
        for (int s = 0; s < n; ++s) {
            const double t = t0 + s * h;
            const Mat2 k1 = lindblad_rhs(params(t), rho);
            const Mat2 k2 = lindblad_rhs(params(t + 0.5 * h), rho + 0.5 * h * k1);
            const Mat2 k3 = lindblad_rhs(params(t + 0.5 * h), rho + 0.5 * h * k2);
            const Mat2 k4 = lindblad_rhs(params(t + h), rho + h * k3);
            rho += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        }
        out.push_back(rho);
    }
    return out;
}

inline std::vector<double> linspace(double a, double b, std::size_t n) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    v.back() = b;
    return v;
}

inline double max_abs(const Mat2& m) { return m.cwiseAbs().maxCoeff(); }

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace tlsdyn::test
