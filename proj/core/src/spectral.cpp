#include "tlsdyn/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "tlsdyn/errors.hpp"
#include "tlsdyn/rate_operator.hpp"

namespace tlsdyn {

namespace {

constexpr double kDiagTol = 1e-12;
constexpr double kMatchTol = 1e-11;

const CompositeAlgebra& gens() {
    static const CompositeAlgebra g = composite_generators();
    return g;
}

double scale_of(double gamma, double nbar, double omega0) {
    return std::max({1.0, std::abs(gamma) * (2.0 * nbar + 1.0), std::abs(omega0)});
}

// Distance of v from the line spanned by ref, relative to |v|.
double collinearity_defect(const Eigen::Vector4cd& v, const Eigen::Vector4cd& ref) {
    const complex c = ref.dot(v) / ref.squaredNorm();
    return (v - c * ref).norm() / v.norm();
}

struct BranchPairing {
    complex beta;
    Eigen::Vector4cd vec;
};

// Eigenpairs produced by one branch, in the transformed-frame label order.
std::array<BranchPairing, 4> branch_eigenpairs(const Branch& br, double gamma, double nbar, double omega0,
                                               bool adjoint) {
    const SuperOp bar = transformed_rate(br, gamma, nbar, omega0);
    const auto tr = SimilarityTransform::make(br.alpha_plus, br.alpha_minus);
    const Eigen::Matrix4cd map = adjoint ? tr.adjoint_transform().matrix() : tr.U.matrix();
    std::array<BranchPairing, 4> out;
    for (int k = 0; k < 4; ++k) {
        const complex d = bar.matrix()(k, k);
        out[k] = {adjoint ? std::conj(d) : d, map.col(k)};
    }
    return out;
}

// Matches every closed-form pair to a branch pair with equal eigenvalue and
// collinear vector. Returns the worst residual, throws on failure.
double match_branch(const std::array<BranchPairing, 4>& branch, const std::array<complex, 4>& betas,
                    const std::array<DensityMatrix, 4>& vecs, double scale, const char* which) {
    double worst = 0.0;
    std::array<bool, 4> used{};
    for (int j = 0; j < 4; ++j) {
        const Eigen::Vector4cd ref = vecs[j].vectorize();
        int best = -1;
        double best_res = 0.0;
        for (int k = 0; k < 4; ++k) {
            if (used[k]) continue;
            const double dbeta = std::abs(branch[k].beta - betas[j]) / scale;
            if (dbeta > kMatchTol) continue;
            const double res = std::max(dbeta, collinearity_defect(branch[k].vec, ref));
            if (best < 0 || res < best_res) {
                best = k;
                best_res = res;
            }
        }
        if (best < 0 || best_res > kMatchTol) {
            std::ostringstream os;
            os << "spectral: branch " << which << " does not reproduce eigenpair " << (j + 1);
            throw NumericalError(os.str());
        }
        used[best] = true;
        worst = std::max(worst, best_res);
    }
    return worst;
}

std::array<complex, 4> closed_form_betas(double gamma, double nbar, double omega0) {
    const double half = 0.5 * gamma * (2.0 * nbar + 1.0);
    return {complex(0.0, 0.0), complex(-2.0 * half, 0.0), complex(-half, -omega0), complex(-half, omega0)};
}

constexpr std::array<Label, 4> kPhysicalLabels{Label{Spin::down, Spin::down}, Label{Spin::up, Spin::up},
                                               Label{Spin::up, Spin::down}, Label{Spin::down, Spin::up}};

}  // namespace

BranchPair diagonalization_branches(double nbar) {
    const double n = nbar;
    BranchPair bp;
    bp.a = {complex(-1.0), complex((n + 1.0) / (2.0 * n + 1.0))};
    bp.b = {complex(n / (n + 1.0)), complex(-(n + 1.0) / (2.0 * n + 1.0))};
    return bp;
}

std::array<complex, 2> diagonalization_residuals(const Branch& br, double nbar) {
    const complex ap = br.alpha_plus;
    const complex am = br.alpha_minus;
    return {-(nbar + 1.0) * ap * ap - ap + nbar, (nbar + 1.0) * (1.0 + 2.0 * ap * am) + am};
}

SimilarityTransform SimilarityTransform::make(complex alpha_plus, complex alpha_minus) {
    const auto& g = gens();
    const SuperOp I = SuperOp::identity();
    SimilarityTransform t;
    t.alpha_plus = alpha_plus;
    t.alpha_minus = alpha_minus;
    t.U = (I + alpha_plus * g.Jplus) * (I + alpha_minus * g.Jminus);
    t.U_inv = (I - alpha_minus * g.Jminus) * (I - alpha_plus * g.Jplus);
    return t;
}

SuperOp SimilarityTransform::adjoint_transform() const {
    const auto& g = gens();
    const SuperOp I = SuperOp::identity();
    return (I - std::conj(alpha_plus) * g.Jminus) * (I - std::conj(alpha_minus) * g.Jplus);
}

SuperOp transformed_rate(const Branch& br, double gamma, double nbar, double omega0) {
    const auto t = SimilarityTransform::make(br.alpha_plus, br.alpha_minus);
    const SuperOp gam = build_rate_superop(Params{gamma, nbar, omega0}).superop;
    SuperOp bar = t.U_inv * gam * t.U;
    Eigen::Matrix4cd off = bar.matrix();
    off.diagonal().setZero();
    const double defect = off.cwiseAbs().maxCoeff();
    if (defect > kDiagTol * std::max(1.0, max_abs(gam))) {
        std::ostringstream os;
        os << "spectral: branch (" << br.alpha_plus << ", " << br.alpha_minus
           << ") leaves off-diagonal entries of size " << defect;
        throw ValidationError(os.str());
    }
    return bar;
}

SuperOp diagonal_rate(const Branch& br, double gamma, double nbar, double omega0) {
    const auto& g = gens();
    return complex(0.0, -omega0) * g.U0 +
           (-0.5 * gamma * (2.0 * (nbar + 1.0) * br.alpha_plus + 1.0)) * g.J0 +
           complex(-0.5 * gamma * (2.0 * nbar + 1.0)) * SuperOp::identity();
}

DensityMatrix steady_state(double nbar) {
    DensityMatrix rho;
    rho(Spin::down, Spin::down) = (nbar + 1.0) / (2.0 * nbar + 1.0);
    rho(Spin::up, Spin::up) = nbar / (2.0 * nbar + 1.0);
    return rho;
}

SpectralSet physical_eigensolutions(double gamma, double nbar, double omega0) {
    const auto betas = closed_form_betas(gamma, nbar, omega0);
    const double n = nbar;

    std::array<DensityMatrix, 4> rhos;
    rhos[0] = steady_state(n);
    rhos[1] = DensityMatrix::basis({Spin::down, Spin::down}) - DensityMatrix::basis({Spin::up, Spin::up});
    rhos[2] = DensityMatrix::basis({Spin::up, Spin::down});
    rhos[3] = DensityMatrix::basis({Spin::down, Spin::up});

    const double scale = scale_of(gamma, nbar, omega0);
    const auto branches = diagonalization_branches(nbar);
    SpectralSet set;
    set.branch_residual = std::max(
        match_branch(branch_eigenpairs(branches.a, gamma, nbar, omega0, false), betas, rhos, scale, "a"),
        match_branch(branch_eigenpairs(branches.b, gamma, nbar, omega0, false), betas, rhos, scale, "b"));

    for (int j = 0; j < 4; ++j) set.entries[j] = {betas[j], rhos[j], DensityMatrix(), kPhysicalLabels[j]};
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            if (std::abs(betas[i] - betas[j]) <= 1e-12 * scale) set.degenerate = true;
    return set;
}

SpectralSet adjoint_eigensolutions(double gamma, double nbar, double omega0) {
    SpectralSet set = physical_eigensolutions(gamma, nbar, omega0);
    const double n = nbar;

    std::array<DensityMatrix, 4> tildes;
    tildes[0] = DensityMatrix::identity();
    tildes[1] = (n / (2.0 * n + 1.0)) * DensityMatrix::basis({Spin::down, Spin::down}) -
                ((n + 1.0) / (2.0 * n + 1.0)) * DensityMatrix::basis({Spin::up, Spin::up});
    tildes[2] = DensityMatrix::basis({Spin::up, Spin::down});
    tildes[3] = DensityMatrix::basis({Spin::down, Spin::up});

    std::array<complex, 4> conj_betas;
    for (int j = 0; j < 4; ++j) conj_betas[j] = std::conj(set.entries[j].beta);

    const double scale = scale_of(gamma, nbar, omega0);
    const auto branches = diagonalization_branches(nbar);
    set.branch_residual = std::max(
        {set.branch_residual,
         match_branch(branch_eigenpairs(branches.a, gamma, nbar, omega0, true), conj_betas, tildes, scale, "a"),
         match_branch(branch_eigenpairs(branches.b, gamma, nbar, omega0, true), conj_betas, tildes, scale, "b")});

    for (int j = 0; j < 4; ++j) set.entries[j].rho_tilde = tildes[j];
    return set;
}

Eigen::Matrix4cd biorthogonality_matrix(const SpectralSet& s) {
    Eigen::Matrix4cd m;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = hs_inner(s.entries[i].rho_tilde, s.entries[j].rho);
    return m;
}

double biorthogonality_defect(const SpectralSet& s) {
    const Eigen::Matrix4cd m = biorthogonality_matrix(s);
    double off = 0.0;
    double diag = std::abs(m(0, 0));
    for (int i = 0; i < 4; ++i) {
        diag = std::min(diag, std::abs(m(i, i)));
        for (int j = 0; j < 4; ++j)
            if (i != j) off = std::max(off, std::abs(m(i, j)));
    }
    return off / diag;
}

std::array<complex, 4> damping_basis_coefficients(const SpectralSet& s, const DensityMatrix& rho) {
    std::array<complex, 4> c;
    for (int j = 0; j < 4; ++j) {
        const auto& e = s.entries[j];
        c[j] = hs_inner(e.rho_tilde, rho) / hs_inner(e.rho_tilde, e.rho);
    }
    return c;
}

DensityMatrix reconstruct(const SpectralSet& s, const std::array<complex, 4>& coeffs) {
    DensityMatrix out;
    for (int j = 0; j < 4; ++j) out += coeffs[j] * s.entries[j].rho;
    return out;
}

}  // namespace tlsdyn
