#pragma once

// Von Neumann space of a two-level system and the superoperator algebra
// acting on it.
//
// Basis order is fixed: row/column 0 is the excited level s = +1, row/column 1
// the ground level s = -1. Density matrices are vectorized by column stacking,
// so the superbasis order is (+1,+1), (-1,+1), (+1,-1), (-1,-1) and the map
// rho -> A rho B has the matrix kron(B^T, A).

#include <array>
#include <complex>

#include <Eigen/Dense>

namespace tlsdyn {

using complex = std::complex<double>;

/// Level label of the two-level atom.
enum class Spin : int { up = +1, down = -1 };

constexpr int value(Spin s) { return static_cast<int>(s); }
constexpr int index(Spin s) { return s == Spin::up ? 0 : 1; }
constexpr Spin spin_at(int idx) { return idx == 0 ? Spin::up : Spin::down; }

/// A superbasis label |s><s'|.
struct Label {
    Spin ket;
    Spin bra;
    friend constexpr bool operator==(Label, Label) = default;
};

/// Position of |s><s'| in the column-stacked vector.
constexpr int vec_index(Label l) { return index(l.ket) + 2 * index(l.bra); }
constexpr Label label_at(int k) { return {spin_at(k % 2), spin_at(k / 2)}; }

inline constexpr std::array<Label, 4> kSuperbasis{
    Label{Spin::up, Spin::up}, Label{Spin::down, Spin::up},
    Label{Spin::up, Spin::down}, Label{Spin::down, Spin::down}};

/// 2x2 operator on the atom. Used both for physical states and for
/// superbasis vectors; physicality is checked explicitly, never assumed.
class DensityMatrix {
public:
    DensityMatrix() : m_(Eigen::Matrix2cd::Zero()) {}
    explicit DensityMatrix(const Eigen::Matrix2cd& m) : m_(m) {}

    static DensityMatrix basis(Label l);
    static DensityMatrix identity() { return DensityMatrix(Eigen::Matrix2cd::Identity()); }
    /// |psi><psi| for psi = mu|+1> + nu|-1>.
    static DensityMatrix pure(complex mu, complex nu);

    complex& operator()(Spin s, Spin sp) { return m_(index(s), index(sp)); }
    complex operator()(Spin s, Spin sp) const { return m_(index(s), index(sp)); }
    complex& at(Label l) { return (*this)(l.ket, l.bra); }
    complex at(Label l) const { return (*this)(l.ket, l.bra); }

    const Eigen::Matrix2cd& matrix() const { return m_; }
    Eigen::Matrix2cd& matrix() { return m_; }

    complex trace() const { return m_.trace(); }
    DensityMatrix adjoint() const { return DensityMatrix(m_.adjoint()); }

    Eigen::Vector4cd vectorize() const;
    static DensityMatrix unvectorize(const Eigen::Vector4cd& v);

    DensityMatrix& operator+=(const DensityMatrix& o) { m_ += o.m_; return *this; }
    DensityMatrix& operator-=(const DensityMatrix& o) { m_ -= o.m_; return *this; }
    DensityMatrix& operator*=(complex c) { m_ *= c; return *this; }
    friend DensityMatrix operator+(DensityMatrix a, const DensityMatrix& b) { return a += b; }
    friend DensityMatrix operator-(DensityMatrix a, const DensityMatrix& b) { return a -= b; }
    friend DensityMatrix operator*(complex c, DensityMatrix a) { return a *= c; }

private:
    Eigen::Matrix2cd m_;
};

/// Largest absolute entry of a - b.
double max_abs_diff(const DensityMatrix& a, const DensityMatrix& b);

/// Hilbert-Schmidt pairing Tr(a^dagger b).
complex hs_inner(const DensityMatrix& a, const DensityMatrix& b);

struct PhysicalityDefects {
    double trace_error = 0.0;       ///< |Tr rho - 1|
    double hermiticity_defect = 0.0;  ///< max |rho - rho^dagger|
    double min_eigenvalue = 0.0;    ///< of the Hermitian part
};

PhysicalityDefects physicality_defects(const DensityMatrix& rho);

/// True when rho is a state within `tol` (trace and Hermiticity) and its
/// smallest eigenvalue is >= -tol.
bool is_physical(const DensityMatrix& rho, double tol);

/// Linear map on the von Neumann space as a 4x4 matrix on vec(rho).
class SuperOp {
public:
    SuperOp() : m_(Eigen::Matrix4cd::Zero()) {}
    explicit SuperOp(const Eigen::Matrix4cd& m) : m_(m) {}

    static SuperOp identity() { return SuperOp(Eigen::Matrix4cd::Identity()); }
    static SuperOp zero() { return SuperOp(); }
    /// Superoperator of rho -> a rho b.
    static SuperOp sandwich(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b);

    const Eigen::Matrix4cd& matrix() const { return m_; }
    Eigen::Matrix4cd& matrix() { return m_; }

    /// Matrix adjoint, i.e. the adjoint with respect to Tr(a^dagger b).
    SuperOp adjoint() const { return SuperOp(m_.adjoint()); }

    SuperOp& operator+=(const SuperOp& o) { m_ += o.m_; return *this; }
    SuperOp& operator-=(const SuperOp& o) { m_ -= o.m_; return *this; }
    SuperOp& operator*=(complex c) { m_ *= c; return *this; }
    friend SuperOp operator+(SuperOp a, const SuperOp& b) { return a += b; }
    friend SuperOp operator-(SuperOp a, const SuperOp& b) { return a -= b; }
    friend SuperOp operator*(complex c, SuperOp a) { return a *= c; }
    /// Composition: (a * b) rho = a(b(rho)).
    friend SuperOp operator*(const SuperOp& a, const SuperOp& b) { return SuperOp(a.m_ * b.m_); }

private:
    Eigen::Matrix4cd m_;
};

double max_abs(const SuperOp& s);
double max_abs_diff(const SuperOp& a, const SuperOp& b);

enum class Pauli { z, plus, minus };

/// 2x2 Pauli-type matrix in the (+1, -1) basis; plus = |+1><-1|.
Eigen::Matrix2cd pauli(Pauli p);

/// rho -> sigma rho. Acts on the ket |s>; this is the sigma^r family.
SuperOp left_rep(Pauli p);

/// rho -> rho sigma. Acts on the bra <s'|; this is the sigma^l family.
SuperOp right_rep(Pauli p);

struct CompositeAlgebra {
    SuperOp J0;      ///< (sigma^r_z + sigma^l_z) / 2
    SuperOp Jplus;   ///< sigma^r_+ sigma^l_-
    SuperOp Jminus;  ///< sigma^r_- sigma^l_+
    SuperOp U0;      ///< (sigma^r_z - sigma^l_z) / 2
};

CompositeAlgebra composite_generators();

SuperOp commutator(const SuperOp& a, const SuperOp& b);

DensityMatrix apply(const SuperOp& s, const DensityMatrix& rho);

}  // namespace tlsdyn
