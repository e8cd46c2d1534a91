#include "tlsdyn/superalgebra.hpp"

#include <algorithm>
#include <cmath>

namespace tlsdyn {

DensityMatrix DensityMatrix::basis(Label l) {
    DensityMatrix d;
    d.at(l) = 1.0;
    return d;
}

DensityMatrix DensityMatrix::pure(complex mu, complex nu) {
    Eigen::Vector2cd psi(mu, nu);
    return DensityMatrix(psi * psi.adjoint());
}

Eigen::Vector4cd DensityMatrix::vectorize() const {
    Eigen::Vector4cd v;
    for (int k = 0; k < 4; ++k) v(k) = at(label_at(k));
    return v;
}

DensityMatrix DensityMatrix::unvectorize(const Eigen::Vector4cd& v) {
    DensityMatrix d;
    for (int k = 0; k < 4; ++k) d.at(label_at(k)) = v(k);
    return d;
}

double max_abs_diff(const DensityMatrix& a, const DensityMatrix& b) {
    return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

complex hs_inner(const DensityMatrix& a, const DensityMatrix& b) {
    return (a.matrix().adjoint() * b.matrix()).trace();
}

PhysicalityDefects physicality_defects(const DensityMatrix& rho) {
    PhysicalityDefects d;
    const auto& m = rho.matrix();
    d.trace_error = std::abs(m.trace() - 1.0);
    d.hermiticity_defect = (m - m.adjoint()).cwiseAbs().maxCoeff();
    // Closed-form eigenvalues of the Hermitian part.
    const Eigen::Matrix2cd h = 0.5 * (m + m.adjoint());
    const double a = h(0, 0).real();
    const double b = h(1, 1).real();
    const double off = std::abs(h(0, 1));
    d.min_eigenvalue = 0.5 * (a + b) - std::hypot(0.5 * (a - b), off);
    return d;
}

bool is_physical(const DensityMatrix& rho, double tol) {
    const auto d = physicality_defects(rho);
    return d.trace_error <= tol && d.hermiticity_defect <= tol && d.min_eigenvalue >= -tol;
}

SuperOp SuperOp::sandwich(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    // vec(a X b) = kron(b^T, a) vec(X)
    Eigen::Matrix4cd m;
    const Eigen::Matrix2cd bt = b.transpose();
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m.block<2, 2>(2 * i, 2 * j) = bt(i, j) * a;
    return SuperOp(m);
}

double max_abs(const SuperOp& s) { return s.matrix().cwiseAbs().maxCoeff(); }

double max_abs_diff(const SuperOp& a, const SuperOp& b) {
    return (a.matrix() - b.matrix()).cwiseAbs().maxCoeff();
}

Eigen::Matrix2cd pauli(Pauli p) {
    Eigen::Matrix2cd m = Eigen::Matrix2cd::Zero();
    switch (p) {
        case Pauli::z:
            m(0, 0) = 1.0;
            m(1, 1) = -1.0;
            break;
        case Pauli::plus:
            m(0, 1) = 1.0;
            break;
        case Pauli::minus:
            m(1, 0) = 1.0;
            break;
    }
    return m;
}

SuperOp left_rep(Pauli p) { return SuperOp::sandwich(pauli(p), Eigen::Matrix2cd::Identity()); }

SuperOp right_rep(Pauli p) { return SuperOp::sandwich(Eigen::Matrix2cd::Identity(), pauli(p)); }

CompositeAlgebra composite_generators() {
    const SuperOp rz = left_rep(Pauli::z);
    const SuperOp lz = right_rep(Pauli::z);
    CompositeAlgebra g;
    g.J0 = 0.5 * (rz + lz);
    g.Jplus = left_rep(Pauli::plus) * right_rep(Pauli::minus);
    g.Jminus = left_rep(Pauli::minus) * right_rep(Pauli::plus);
    g.U0 = 0.5 * (rz - lz);
    return g;
}

SuperOp commutator(const SuperOp& a, const SuperOp& b) { return a * b - b * a; }

DensityMatrix apply(const SuperOp& s, const DensityMatrix& rho) {
    return DensityMatrix::unvectorize(s.matrix() * rho.vectorize());
}

}  // namespace tlsdyn
