#pragma once

// Method-independent reference solutions: fixed-step RK4 on the vectorized
// Lindblad equation, a Pade matrix exponential for frozen parameters, a dense
// non-Hermitian eigensolver, and a dense N-qubit Liouvillian (N <= 3).
//
// Everything here is built from lindblad_superop_direct, never from the
// composite-algebra form used by the gauge solver.

#include <array>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tlsdyn/schedule.hpp"
#include "tlsdyn/superalgebra.hpp"

namespace tlsdyn::oracle {

enum class Method { rk4, expm };

struct OracleResult {
    std::vector<double> t;
    std::vector<DensityMatrix> rho;
    Method method = Method::rk4;
    double dt = 0.0;              ///< RK4 step actually used (upper bound)
    std::size_t steps = 0;
    double max_trace_drift = 0.0;
    bool trace_ok = true;         ///< max_trace_drift < 1e-10
};

/// Largest RK4 step admitted for `p` on [0, t_max]:
/// min(dt_max, (1/50) / max(g (2n+1), |w0|)).
double oracle_step(const ParamSchedule& p, std::span<const double> grid, double dt_max);

OracleResult integrate_direct(const ParamSchedule& p, const DensityMatrix& rho0, std::span<const double> grid,
                              double dt_max);

/// exp(A) by scaling and squaring with the degree-13 Pade approximant.
Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a);

DensityMatrix expm_propagate(double gamma, double nbar, double omega0, const DensityMatrix& rho0, double t);

struct EigenDecomposition {
    bool converged = false;
    double residual = 0.0;          ///< max_i |S v_i - l_i v_i| / |v_i|
    double reciprocal_condition = 0.0;  ///< of the right eigenvector matrix
    std::array<complex, 4> values{};
    Eigen::Matrix4cd right;  ///< columns v_i, unit norm
    Eigen::Matrix4cd left;   ///< columns w_i with S^dagger w_i = conj(l_i) w_i, w_i^dagger v_i = 1
    std::string message;
};

/// Dense eigen-decomposition of a general 4x4 superoperator. Defective or
/// failed inputs come back with converged = false and a message.
EigenDecomposition dense_eigensolve(const SuperOp& s);

/// Dense Liouvillian on the 2^N x 2^N register, column-stacked, qubit 0 the
/// most significant tensor factor. One Lindblad generator per qubit.
Eigen::MatrixXcd register_liouvillian(std::span<const Params> per_qubit);

/// RK4 on the dense register Liouvillian; N = per_qubit.size() <= 3.
std::vector<Eigen::MatrixXcd> integrate_register(std::span<const ParamSchedule> per_qubit,
                                                 const Eigen::MatrixXcd& rho0, std::span<const double> grid,
                                                 double dt_max);

}  // namespace tlsdyn::oracle
