#pragma once

// Register of N two-level atoms, each coupled to its own bath. The register
// Liouvillian is a sum of single-atom generators, so the propagator factorizes
// and acts factor-wise on product superbasis terms |s1><s1'| x ... x |sN><sN'|.

#include <cstddef>
#include <map>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "tlsdyn/gauge.hpp"
#include "tlsdyn/schedule.hpp"
#include "tlsdyn/superalgebra.hpp"

namespace tlsdyn {

inline constexpr std::size_t kMaxDenseQubits = 3;

struct ProductTerm {
    complex coefficient;
    std::vector<Label> factors;  ///< one superbasis label per qubit, qubit 0 first
};

/// rho = sum_terms c * (x)_k |s_k><s_k'|. Kept canonical: one term per
/// distinct label tuple, ordered by the tuple.
class ProductStateExpansion {
public:
    explicit ProductStateExpansion(std::size_t n_qubits = 1) : n_(n_qubits) {}
    ProductStateExpansion(std::size_t n_qubits, std::span<const ProductTerm> terms);

    /// Throws ValidationError if the number of factors differs from n_qubits.
    void add(complex coefficient, std::vector<Label> factors);

    std::size_t n_qubits() const { return n_; }
    std::vector<ProductTerm> terms() const;
    std::size_t size() const { return terms_.size(); }

    /// Coefficient of the product basis element with these labels (0 if absent).
    complex coefficient(std::span<const Label> factors) const;
    /// Dense matrix element in the computational product basis (bit 0 of a
    /// qubit index means s = +1; qubit 0 is the most significant bit).
    complex element(std::size_t row, std::size_t col) const;

    complex trace() const;
    /// Tr rho^2.
    double purity() const;
    /// Sum of |rho_ij| over i != j.
    double coherence_l1() const;
    /// Largest |c(labels) - conj(c(swapped labels))|.
    double hermiticity_defect() const;

    /// 2^N x 2^N matrix; N <= kMaxDenseQubits.
    Eigen::MatrixXcd to_dense() const;

    /// Single-qubit product state rho_0 x ... x rho_{N-1}.
    static ProductStateExpansion product(std::span<const DensityMatrix> factors);

private:
    using Key = std::vector<int>;  // vec_index per qubit
    std::size_t n_;
    std::map<Key, complex> terms_;
};

/// Trace 1, Hermitian, and for N <= 3 positive semidefinite, within tol.
bool is_physical(const ProductStateExpansion& rho, double tol);

/// One schedule per qubit, or a single schedule shared by all qubits.
class RegisterSchedule {
public:
    static RegisterSchedule shared(ParamSchedule p, std::size_t n_qubits);
    static RegisterSchedule per_qubit(std::vector<ParamSchedule> ps);

    std::size_t n_qubits() const { return n_; }
    const ParamSchedule& schedule(std::size_t qubit) const;
    /// Distinct schedules and, per qubit, the index of its schedule.
    const std::vector<ParamSchedule>& distinct() const { return distinct_; }
    std::size_t distinct_index(std::size_t qubit) const { return index_.at(qubit); }
    std::vector<ParamSchedule> expanded() const;

private:
    std::size_t n_ = 0;
    std::vector<ParamSchedule> distinct_;
    std::vector<std::size_t> index_;
};

struct RegisterTrajectory {
    std::vector<double> t;
    std::vector<ProductStateExpansion> states;
    /// Gauge solutions, one series per distinct schedule.
    std::vector<std::vector<GaugeState>> gauges;
};

/// Applies a single-qubit superoperator per factor to every term.
ProductStateExpansion apply_factorwise(std::span<const SuperOp> per_qubit, const ProductStateExpansion& rho);

RegisterTrajectory propagate_register(const RegisterSchedule& rs, const ProductStateExpansion& rho0,
                                      std::span<const double> grid, double tol);

/// alpha|+1,-1> + beta|-1,+1> as a four-term expansion.
ProductStateExpansion entangled_pair(complex alpha, complex beta);

/// Throws ValidationError unless |alpha|^2 + |beta|^2 = 1 within 1e-12.
RegisterTrajectory two_qubit_entangled(complex alpha, complex beta, const ParamSchedule& p,
                                       std::span<const double> grid, double tol);

/// Closed-form two-qubit density matrix for constant parameters, written in
/// products of the damping basis rho_j x rho_k.
Eigen::Matrix4cd autonomous_two_qubit(complex alpha, complex beta, double gamma, double nbar, double omega0,
                                      double t);

struct DecoherenceMetrics {
    std::vector<double> t;
    std::vector<double> coherence_l1;
    std::vector<double> purity;
    double tau_decoh = 0.0;
    bool fit_degenerate = true;
    std::size_t fit_points = 0;
};

/// tau_decoh from a least-squares line through log coherence_l1 over the
/// samples where coherence_l1 > 1e-8.
DecoherenceMetrics decoherence_metrics(const RegisterTrajectory& traj);

/// Kronecker product with the first argument as the most significant factor.
Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b);

}  // namespace tlsdyn
