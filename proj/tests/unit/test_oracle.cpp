#include <catch_amalgamated.hpp>

#include <unsupported/Eigen/KroneckerProduct>
#include <unsupported/Eigen/MatrixFunctions>

#include "support.hpp"
#include "tlsdyn/errors.hpp"
#include "tlsdyn/oracle.hpp"
#include "tlsdyn/rate_operator.hpp"
#include "tlsdyn/spectral.hpp"

using namespace tlsdyn;
using Catch::Matchers::WithinAbs;

namespace {

Eigen::VectorXcd vec(const Eigen::MatrixXcd& m) { return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size()); }

}  // namespace

TEST_CASE("oracle step rule") {
    const auto p = ParamSchedule::constant(1.0, 1.0, 2.0);
    const std::vector<double> grid{0.0, 1.0};
    CHECK_THAT(oracle::oracle_step(p, grid, 1.0), WithinAbs(1.0 / 150.0, 1e-16));
    CHECK(oracle::oracle_step(p, grid, 1e-3) == 1e-3);
    const auto fast = ParamSchedule::constant(0.1, 0.0, 10.0);
    CHECK_THAT(oracle::oracle_step(fast, grid, 1.0), WithinAbs(1.0 / 500.0, 1e-16));
}

TEST_CASE("integrate_direct examples") {
    SECTION("unitary limit") {
        const double w = 1.7;
        const DensityMatrix r0 = test::random_state();
        const auto grid = test::linspace(0.0, 3.0, 7);
        const auto r = oracle::integrate_direct(ParamSchedule::constant(0.0, 0.5, w), r0, grid, 1e-3);
        for (std::size_t i = 0; i < grid.size(); ++i) {
            CHECK(std::abs(r.rho[i](Spin::up, Spin::down) - r0(Spin::up, Spin::down) * std::exp(complex(0, -w * grid[i]))) < 1e-11);
            CHECK(std::abs(r.rho[i](Spin::up, Spin::up) - r0(Spin::up, Spin::up)) < 1e-14);
        }
        CHECK(r.trace_ok);
        CHECK(r.method == oracle::Method::rk4);
    }
    SECTION("exact decay") {
        const auto r = oracle::integrate_direct(ParamSchedule::constant(1.0, 0.0, 0.0),
                                                DensityMatrix::basis({Spin::up, Spin::up}), std::vector<double>{0.0, 1.0}, 1e-2);
        CHECK_THAT(r.rho.back()(Spin::up, Spin::up).real(), WithinAbs(std::exp(-1.0), 1e-9));
        CHECK(r.dt <= 1.0 / 50.0);
        CHECK(r.steps >= 50);
    }
    SECTION("fourth-order convergence") {
        const DensityMatrix r0 = DensityMatrix::basis({Spin::up, Spin::up});
        const std::vector<double> grid{0.0, 1.0};
        const auto p = ParamSchedule::constant(1.0, 1.0, 2.0);
        const DensityMatrix exact = oracle::expm_propagate(1.0, 1.0, 2.0, r0, 1.0);
        const double e1 = max_abs_diff(oracle::integrate_direct(p, r0, grid, 0.004).rho.back(), exact);
        const double e2 = max_abs_diff(oracle::integrate_direct(p, r0, grid, 0.002).rho.back(), exact);
        CHECK(e1 / e2 > 12.0);
        CHECK(e1 / e2 < 20.0);
    }
    CHECK_THROWS_AS(oracle::integrate_direct(ParamSchedule::constant(1, 0, 0), DensityMatrix::basis({Spin::up, Spin::down}),
                                             std::vector<double>{0.0, 1.0}, 1e-3),
                    ValidationError);
}

TEST_CASE("matrix exponential") {
    for (int i = 0; i < 20; ++i) {
        Eigen::MatrixXcd a(4, 4);
        const double scale = test::uniform(0.01, 30.0);
        for (int r = 0; r < 4; ++r)
            for (int c = 0; c < 4; ++c) a(r, c) = scale * test::cgauss() / 4.0;
        const Eigen::MatrixXcd ours = oracle::expm(a);
        const Eigen::MatrixXcd ref = a.exp();
        CHECK((ours - ref).cwiseAbs().maxCoeff() < 1e-11 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
    }
    Eigen::MatrixXcd d = Eigen::MatrixXcd::Zero(3, 3);
    d.diagonal() << complex(-2, 1), complex(0.5, 0), complex(-40, 3);
    const Eigen::MatrixXcd ed = oracle::expm(d);
    for (int k = 0; k < 3; ++k) CHECK(std::abs(ed(k, k) - std::exp(d(k, k))) < 1e-13 * std::max(1.0, std::abs(std::exp(d(k, k)))));
    CHECK((oracle::expm(Eigen::MatrixXcd::Zero(4, 4)) - Eigen::MatrixXcd::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("expm propagation") {
    const DensityMatrix r0 = test::random_state();
    CHECK(max_abs_diff(oracle::expm_propagate(1.0, 1.0, 2.0, r0, 0.0), r0) < 1e-16);
    for (double n : {0.0, 0.5, 2.0}) {
        const DensityMatrix ss = steady_state(n);
        CHECK(max_abs_diff(oracle::expm_propagate(1.3, n, 0.4, ss, 7.0), ss) < 1e-12);
    }
    const double t = 5.0 / 3.0;
    const auto rk = oracle::integrate_direct(ParamSchedule::constant(1.0, 1.0, 2.0), r0, std::vector<double>{0.0, t}, 1e-3);
    CHECK(max_abs_diff(rk.rho.back(), oracle::expm_propagate(1.0, 1.0, 2.0, r0, t)) < 1e-8);

    // Against the closed-form spectral expansion.
    const SpectralSet s = adjoint_eigensolutions(0.8, 0.3, 1.1);
    auto c = damping_basis_coefficients(s, r0);
    for (int j = 0; j < 4; ++j) c[j] *= std::exp(s.entries[j].beta * 2.5);
    CHECK(max_abs_diff(oracle::expm_propagate(0.8, 0.3, 1.1, r0, 2.5), reconstruct(s, c)) < 1e-12);
}

TEST_CASE("dense eigensolver") {
    SuperOp diag;
    diag.matrix().diagonal() << complex(1, 2), complex(-3, 0), complex(0.5, -1), complex(7, 7);
    const auto d = oracle::dense_eigensolve(diag);
    REQUIRE(d.converged);
    for (int k = 0; k < 4; ++k) {
        double best = 1e300;
        for (complex v : d.values) best = std::min(best, std::abs(v - diag.matrix()(k, k)));
        CHECK(best < 1e-14);
    }

    const auto g = oracle::dense_eigensolve(lindblad_superop_direct(Params{1.0, 1.0, 2.0}));
    REQUIRE(g.converged);
    CHECK(g.residual < 1e-11);
    for (complex expect : {complex(0), complex(-3), complex(-1.5, -2), complex(-1.5, 2)}) {
        double best = 1e300;
        for (complex v : g.values) best = std::min(best, std::abs(v - expect));
        CHECK(best < 1e-12);
    }
    // Left eigenvectors: S^dagger w = conj(l) w, w_i^dagger v_j = delta_ij.
    const Eigen::Matrix4cd m = lindblad_superop_direct(Params{1.0, 1.0, 2.0}).matrix();
    const Eigen::Matrix4cd gram = g.left.adjoint() * g.right;
    CHECK((gram - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff() < 1e-10);
    for (int i = 0; i < 4; ++i)
        CHECK((m.adjoint() * g.left.col(i) - std::conj(g.values[i]) * g.left.col(i)).norm() < 1e-10 * g.left.col(i).norm());

    SuperOp jordan;
    jordan.matrix() << 2, 1, 0, 0, 0, 2, 1, 0, 0, 0, 2, 0, 0, 0, 0, -1;
    const auto j = oracle::dense_eigensolve(jordan);
    CHECK_FALSE(j.converged);
    CHECK_FALSE(j.message.empty());

    for (int i = 0; i < 20; ++i) {
        const Params p = test::random_params();
        const auto e = oracle::dense_eigensolve(lindblad_superop_direct(p));
        REQUIRE(e.converged);
        CHECK((e.left.adjoint() * e.right - Eigen::Matrix4cd::Identity()).cwiseAbs().maxCoeff() < 1e-10);
    }
}

TEST_CASE("register Liouvillian") {
    const Params p = test::random_params();
    const std::vector<Params> one{p};
    CHECK((oracle::register_liouvillian(one) - lindblad_superop_direct(p).matrix()).cwiseAbs().maxCoeff() < 1e-14);

    const Params q = test::random_params();
    const std::vector<Params> two{p, q};
    const test::Mat2 a = test::random_matrix(), b = test::random_matrix();
    const Eigen::MatrixXcd ab = Eigen::kroneckerProduct(a, b);
    const Eigen::MatrixXcd expect =
        Eigen::kroneckerProduct(test::lindblad_rhs(p, a), b) + Eigen::kroneckerProduct(a, test::lindblad_rhs(q, b));
    Eigen::VectorXcd got = oracle::register_liouvillian(two) * vec(ab);
    CHECK((got - vec(expect)).cwiseAbs().maxCoeff() < 1e-12);

    const std::vector<Params> four(4, p);
    CHECK_THROWS_AS(oracle::register_liouvillian(four), ValidationError);
}

TEST_CASE("register integration reduces to the single-atom oracle") {
    const auto p = ParamSchedule::constant(0.9, 0.4, 1.5);
    const DensityMatrix r0 = test::random_state();
    const auto grid = test::linspace(0.0, 2.0, 5);
    const std::vector<ParamSchedule> one{p};
    const auto reg = oracle::integrate_register(one, r0.matrix(), grid, 1e-3);
    const auto single = oracle::integrate_direct(p, r0, grid, 1e-3);
    for (std::size_t i = 0; i < grid.size(); ++i) CHECK((reg[i] - single.rho[i].matrix()).cwiseAbs().maxCoeff() < 1e-13);
}
