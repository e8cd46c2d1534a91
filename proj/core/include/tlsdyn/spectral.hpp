#pragma once

// Frozen-parameter spectrum of Gamma via the two similarity transforms
// U = exp(a+ J+) exp(a- J-) that diagonalize it, and the bi-orthogonal
// damping basis of Gamma and Gamma^dagger.

#include <array>

#include "tlsdyn/superalgebra.hpp"

namespace tlsdyn {

struct Branch {
    complex alpha_plus;
    complex alpha_minus;
};

struct BranchPair {
    Branch a;  ///< alpha+ = -1: reachable only from the unstable fixed point
    Branch b;  ///< alpha+ = nbar / (nbar + 1): the stable one
};

/// Both roots of the diagonalization conditions for occupation `nbar`.
BranchPair diagonalization_branches(double nbar);

/// Residuals of -(n+1) a+^2 - a+ + n = 0 and (n+1)(1 + 2 a+ a-) + a- = 0.
std::array<complex, 2> diagonalization_residuals(const Branch& br, double nbar);

struct SimilarityTransform {
    complex alpha_plus;
    complex alpha_minus;
    SuperOp U;      ///< (I + a+ J+)(I + a- J-)
    SuperOp U_inv;  ///< (I - a- J-)(I - a+ J+)

    /// J+- are nilpotent, so the exponentials truncate after the linear term.
    static SimilarityTransform make(complex alpha_plus, complex alpha_minus);
    /// exp(-a+ J-) exp(-a- J+); its inverse-adjoint diagonalizes Gamma^dagger.
    SuperOp adjoint_transform() const;
};

/// U^-1 Gamma U. Throws ValidationError if the result has off-diagonal
/// entries above 1e-12 (relative to the size of Gamma).
SuperOp transformed_rate(const Branch& br, double gamma, double nbar, double omega0);

/// -i w0 U0 - (g/2)[2(n+1) a+ + 1] J0 - (g/2)(2n+1): the diagonal form
/// predicted when `br` satisfies the diagonalization conditions.
SuperOp diagonal_rate(const Branch& br, double gamma, double nbar, double omega0);

struct Eigentriple {
    complex beta;            ///< eigenvalue of Gamma
    DensityMatrix rho;       ///< right eigenvector, Gamma rho = beta rho
    DensityMatrix rho_tilde; ///< left eigenvector, Gamma^dagger rho~ = conj(beta) rho~
    Label label;
};

struct SpectralSet {
    std::array<Eigentriple, 4> entries;
    bool degenerate = false;  ///< two eigenvalues coincide (gamma = 0 or omega0 = 0)
    /// Largest eigenvalue / collinearity mismatch seen while matching the
    /// branch results to the closed forms.
    double branch_residual = 0.0;
};

/// Closed-form damping basis (zero mode, population mode, two coherences)
/// cross-checked against both similarity branches. Throws NumericalError when
/// a branch fails to reproduce an eigenpair.
SpectralSet physical_eigensolutions(double gamma, double nbar, double omega0);

/// Same set with the left eigenvectors of Gamma^dagger filled in, also
/// cross-checked against both branches.
SpectralSet adjoint_eigensolutions(double gamma, double nbar, double omega0);

/// ((n+1)|-1><-1| + n|+1><+1|) / (2n + 1).
DensityMatrix steady_state(double nbar);

/// M(i, j) = Tr(rho~_i^dagger rho_j).
Eigen::Matrix4cd biorthogonality_matrix(const SpectralSet& s);
/// max_{i != j} |M(i,j)| / min_i |M(i,i)|.
double biorthogonality_defect(const SpectralSet& s);

/// Coefficients c_j with rho = sum_j c_j rho_j.
std::array<complex, 4> damping_basis_coefficients(const SpectralSet& s, const DensityMatrix& rho);
DensityMatrix reconstruct(const SpectralSet& s, const std::array<complex, 4>& coeffs);

}  // namespace tlsdyn
