#include <catch_amalgamated.hpp>

#include "support.hpp"
#include "tlsdyn/superalgebra.hpp"

using namespace tlsdyn;
using tlsdyn::test::Mat2;

namespace {

const Label pp{Spin::up, Spin::up};
const Label mp{Spin::down, Spin::up};
const Label pm{Spin::up, Spin::down};
const Label mm{Spin::down, Spin::down};

DensityMatrix basis(Label l) { return DensityMatrix::basis(l); }

bool exactly(const SuperOp& a, const SuperOp& b) { return max_abs_diff(a, b) == 0.0; }

}  // namespace

TEST_CASE("superbasis ordering and vectorization") {
    CHECK(vec_index(pp) == 0);
    CHECK(vec_index(mp) == 1);
    CHECK(vec_index(pm) == 2);
    CHECK(vec_index(mm) == 3);
    for (int k = 0; k < 4; ++k) CHECK(vec_index(label_at(k)) == k);

    // Column stacking: vec index = row + 2 * col.
    const Mat2 m = test::random_matrix();
    const DensityMatrix rho(m);
    const auto v = rho.vectorize();
    CHECK(v[0] == m(0, 0));
    CHECK(v[1] == m(1, 0));
    CHECK(v[2] == m(0, 1));
    CHECK(v[3] == m(1, 1));
    for (int i = 0; i < 100; ++i) {
        const DensityMatrix r(test::random_matrix());
        CHECK(max_abs_diff(DensityMatrix::unvectorize(r.vectorize()), r) == 0.0);
    }
}

TEST_CASE("sandwich matches explicit products") {
    for (int i = 0; i < 20; ++i) {
        const Mat2 a = test::random_matrix(), b = test::random_matrix(), x = test::random_matrix();
        const DensityMatrix out = apply(SuperOp::sandwich(a, b), DensityMatrix(x));
        CHECK(test::max_abs(out.matrix() - a * x * b) < 1e-13);
    }
}

TEST_CASE("left_rep examples") {
    const DensityMatrix r = apply(left_rep(Pauli::z), basis(pp));
    CHECK(max_abs_diff(r, basis(pp)) == 0.0);
    CHECK(max_abs_diff(apply(left_rep(Pauli::plus), basis(mm)), basis(pm)) == 0.0);
    CHECK(exactly(commutator(left_rep(Pauli::plus), left_rep(Pauli::minus)), left_rep(Pauli::z)));
}

TEST_CASE("right_rep examples") {
    CHECK(exactly(commutator(right_rep(Pauli::z), right_rep(Pauli::plus)), complex(-2.0) * right_rep(Pauli::plus)));

    // rho sigma_- by explicit 2x2 multiplication: <-1| sigma_- = <+1|.
    const Mat2 x = test::random_matrix();
    CHECK(test::max_abs(apply(right_rep(Pauli::minus), DensityMatrix(x)).matrix() - x * test::sm()) == 0.0);
    CHECK(max_abs_diff(apply(right_rep(Pauli::minus), basis(pm)), basis(pp)) == 0.0);
    CHECK(max_abs_diff(apply(right_rep(Pauli::minus), basis(pp)), DensityMatrix()) == 0.0);

    for (Pauli a : {Pauli::z, Pauli::plus, Pauli::minus})
        for (Pauli b : {Pauli::z, Pauli::plus, Pauli::minus})
            CHECK(max_abs(commutator(left_rep(a), right_rep(b))) == 0.0);
}

TEST_CASE("left and right su(2) relations") {
    const SuperOp lz = left_rep(Pauli::z), lp = left_rep(Pauli::plus), lm = left_rep(Pauli::minus);
    const SuperOp rz = right_rep(Pauli::z), rp = right_rep(Pauli::plus), rm = right_rep(Pauli::minus);
    CHECK(exactly(commutator(lz, lp), complex(2.0) * lp));
    CHECK(exactly(commutator(lz, lm), complex(-2.0) * lm));
    CHECK(exactly(commutator(lp, lm), lz));
    CHECK(exactly(commutator(rz, rp), complex(-2.0) * rp));
    CHECK(exactly(commutator(rz, rm), complex(2.0) * rm));
    CHECK(exactly(commutator(rp, rm), complex(-1.0) * rz));
}

TEST_CASE("composite generators act on the superbasis") {
    const auto g = composite_generators();
    for (Label l : kSuperbasis) {
        const double s = value(l.ket), sp = value(l.bra);
        CHECK(max_abs_diff(apply(g.J0, basis(l)), complex((s + sp) / 2) * basis(l)) == 0.0);
        CHECK(max_abs_diff(apply(g.U0, basis(l)), complex((s - sp) / 2) * basis(l)) == 0.0);
        const DensityMatrix up = apply(g.Jplus, basis(l));
        const DensityMatrix down = apply(g.Jminus, basis(l));
        CHECK(max_abs_diff(up, l == mm ? basis(pp) : DensityMatrix()) == 0.0);
        CHECK(max_abs_diff(down, l == pp ? basis(mm) : DensityMatrix()) == 0.0);
    }
    CHECK(max_abs_diff(apply(g.U0, basis(pm)), basis(pm)) == 0.0);
}

TEST_CASE("composite algebra commutators") {
    const auto g = composite_generators();
    CHECK(exactly(commutator(g.J0, g.Jplus), complex(2.0) * g.Jplus));
    CHECK(exactly(commutator(g.J0, g.Jminus), complex(-2.0) * g.Jminus));
    CHECK(exactly(commutator(g.Jplus, g.Jminus), g.J0));
    CHECK(max_abs(commutator(g.U0, g.Jplus)) == 0.0);
    CHECK(max_abs(commutator(g.U0, g.Jminus)) == 0.0);
    CHECK(max_abs(commutator(g.U0, g.J0)) == 0.0);
}

TEST_CASE("nilpotency and apply") {
    const auto g = composite_generators();
    CHECK(max_abs(g.Jplus * g.Jplus) == 0.0);
    CHECK(max_abs(g.Jminus * g.Jminus) == 0.0);
    const DensityMatrix r(test::random_matrix());
    CHECK(max_abs_diff(apply(SuperOp::identity(), r), r) == 0.0);
    CHECK(max_abs_diff(apply(g.Jplus * g.Jplus, r), DensityMatrix()) == 0.0);
    CHECK(max_abs_diff(apply(g.Jminus, basis(pp)), basis(mm)) == 0.0);
}

TEST_CASE("composition is matrix product") {
    for (int i = 0; i < 20; ++i) {
        SuperOp a, b;
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) {
                a.matrix()(r, c) = test::cgauss();
                b.matrix()(r, c) = test::cgauss();
            }
        const DensityMatrix x(test::random_matrix());
        CHECK(max_abs_diff(apply(a * b, x), apply(a, apply(b, x))) < 1e-13);
        CHECK(max_abs(commutator(a, a)) == 0.0);
    }
}

TEST_CASE("physicality checks") {
    const DensityMatrix rho = test::random_state();
    CHECK(is_physical(rho, 1e-12));
    const auto d = physicality_defects(rho);
    CHECK(d.trace_error < 1e-14);
    CHECK(d.hermiticity_defect < 1e-14);
    CHECK(d.min_eigenvalue > 0.0);

    CHECK_FALSE(is_physical(basis(pm), 1e-9));  // not Hermitian, trace 0
    CHECK_FALSE(is_physical(DensityMatrix(Mat2{{1.5, 0}, {0, -0.5}}), 1e-9));
    CHECK(is_physical(DensityMatrix::pure(complex(0.6), complex(0.0, 0.8)), 1e-12));
    const DensityMatrix p = DensityMatrix::pure(complex(0.6), complex(0.0, 0.8));
    CHECK(p(Spin::up, Spin::down) == std::conj(complex(0.0, 0.8)) * 0.6);
    CHECK(std::abs(hs_inner(DensityMatrix::identity(), rho) - 1.0) < 1e-14);
}
