#include "tlsdyn/oracle.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "tlsdyn/errors.hpp"
#include "tlsdyn/ode.hpp"
#include "tlsdyn/rate_operator.hpp"

namespace tlsdyn::oracle {

namespace {

std::vector<double> sample_times(const ParamSchedule& p, std::span<const double> grid) {
    std::vector<double> ts(grid.begin(), grid.end());
    const auto b = p.breakpoints(grid.front(), grid.back());
    ts.insert(ts.end(), b.begin(), b.end());
    return ts;
}

Eigen::MatrixXcd embed(const Eigen::Matrix2cd& op, std::size_t qubit, std::size_t n) {
    Eigen::MatrixXcd out = Eigen::MatrixXcd::Identity(1, 1);
    for (std::size_t k = 0; k < n; ++k) {
        const Eigen::Matrix2cd f = k == qubit ? op : Eigen::Matrix2cd::Identity();
        Eigen::MatrixXcd next(out.rows() * 2, out.cols() * 2);
        for (Eigen::Index i = 0; i < out.rows(); ++i)
            for (Eigen::Index j = 0; j < out.cols(); ++j) next.block(2 * i, 2 * j, 2, 2) = out(i, j) * f;
        out = std::move(next);
    }
    return out;
}

// vec(A X B) = kron(B^T, A) vec(X)
Eigen::MatrixXcd sandwich(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    const Eigen::MatrixXcd bt = b.transpose();
    const Eigen::Index d = a.rows();
    Eigen::MatrixXcd m(d * d, d * d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) m.block(i * d, j * d, d, d) = bt(i, j) * a;
    return m;
}

Eigen::VectorXcd vec(const Eigen::MatrixXcd& m) {
    return Eigen::Map<const Eigen::VectorXcd>(m.data(), m.size());
}

Eigen::MatrixXcd unvec(const Eigen::VectorXcd& v, Eigen::Index d) {
    return Eigen::Map<const Eigen::MatrixXcd>(v.data(), d, d);
}

}  // namespace

double oracle_step(const ParamSchedule& p, std::span<const double> grid, double dt_max) {
    double rate = 0.0;
    for (double t : sample_times(p, grid)) {
        const Params q = p.at(t);
        rate = std::max({rate, q.gamma * (2.0 * q.nbar + 1.0), std::abs(q.omega0)});
    }
    return rate > 0.0 ? std::min(dt_max, (1.0 / 50.0) / rate) : dt_max;
}

OracleResult integrate_direct(const ParamSchedule& p, const DensityMatrix& rho0, std::span<const double> grid,
                              double dt_max) {
    if (!is_physical(rho0, 1e-9)) throw ValidationError("integrate_direct: initial state is not a density matrix");
    if (grid.empty()) throw ValidationError("integrate_direct: empty grid");
    p.validate(grid.back());

    OracleResult r;
    r.method = Method::rk4;
    r.dt = oracle_step(p, grid, dt_max);
    auto rhs = [&p](double t, const Eigen::Vector4cd& v) -> Eigen::Vector4cd {
        return lindblad_superop_direct(p, t).matrix() * v;
    };
    ode::Stats st;
    const auto raw = ode::rk4(rhs, rho0.vectorize(), grid, p.breakpoints(grid.front(), grid.back()), r.dt, &st);
    r.steps = st.accepted;
    const complex tr0 = rho0.trace();
    for (std::size_t i = 0; i < raw.size(); ++i) {
        r.t.push_back(grid[i]);
        r.rho.push_back(DensityMatrix::unvectorize(raw[i]));
        r.max_trace_drift = std::max(r.max_trace_drift, std::abs(r.rho.back().trace() - tr0));
    }
    r.trace_ok = r.max_trace_drift < 1e-10;
    return r;
}

Eigen::MatrixXcd expm(const Eigen::MatrixXcd& a) {
    constexpr double b[] = {64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
                            1187353796428800.0,  129060195264000.0,   10559470521600.0,
                            670442572800.0,      33522128640.0,       1323241920.0,
                            40840800.0,          960960.0,            16380.0,
                            182.0,               1.0};
    constexpr double theta13 = 5.371920351148152;
    const Eigen::Index n = a.rows();
    const double norm1 = a.cwiseAbs().colwise().sum().maxCoeff();
    if (norm1 == 0.0) return Eigen::MatrixXcd::Identity(n, n);
    int s = 0;
    if (norm1 > theta13) s = std::max(0, static_cast<int>(std::ceil(std::log2(norm1 / theta13))));
    const Eigen::MatrixXcd A = a / std::ldexp(1.0, s);
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(n, n);
    const Eigen::MatrixXcd A2 = A * A;
    const Eigen::MatrixXcd A4 = A2 * A2;
    const Eigen::MatrixXcd A6 = A4 * A2;
    const Eigen::MatrixXcd U =
        A * (A6 * (b[13] * A6 + b[11] * A4 + b[9] * A2) + b[7] * A6 + b[5] * A4 + b[3] * A2 + b[1] * I);
    const Eigen::MatrixXcd V = A6 * (b[12] * A6 + b[10] * A4 + b[8] * A2) + b[6] * A6 + b[4] * A4 + b[2] * A2 + b[0] * I;
    Eigen::MatrixXcd R = (V - U).partialPivLu().solve(V + U);
    for (int k = 0; k < s; ++k) R = R * R;
    return R;
}

DensityMatrix expm_propagate(double gamma, double nbar, double omega0, const DensityMatrix& rho0, double t) {
    const Eigen::MatrixXcd gen = lindblad_superop_direct(Params{gamma, nbar, omega0}).matrix() * t;
    const Eigen::Vector4cd v = expm(gen) * rho0.vectorize();
    return DensityMatrix::unvectorize(v);
}

EigenDecomposition dense_eigensolve(const SuperOp& s) {
    EigenDecomposition out;
    const Eigen::Matrix4cd& m = s.matrix();
    Eigen::ComplexEigenSolver<Eigen::Matrix4cd> es(m, true);
    if (es.info() != Eigen::Success) {
        out.message = "complex Schur iteration did not converge";
        return out;
    }
    const Eigen::Matrix4cd V = es.eigenvectors();
    for (int i = 0; i < 4; ++i) out.values[i] = es.eigenvalues()(i);
    out.right = V;
    for (int i = 0; i < 4; ++i) out.right.col(i).normalize();

    const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
    for (int i = 0; i < 4; ++i) {
        const Eigen::Vector4cd r = m * out.right.col(i) - out.values[i] * out.right.col(i);
        out.residual = std::max(out.residual, r.norm() / scale);
    }

    Eigen::JacobiSVD<Eigen::Matrix4cd> svd(out.right);
    const auto sv = svd.singularValues();
    out.reciprocal_condition = sv(3) / sv(0);
    if (out.reciprocal_condition < 1e-8) {
        out.message = "eigenvector matrix is numerically singular (defective input)";
        return out;
    }
    // Rows of V^-1 are the left eigenvectors, already dual to the columns of V.
    const Eigen::Matrix4cd inv = out.right.inverse();
    out.left = inv.adjoint();
    out.converged = out.residual < 1e-11;
    if (!out.converged) out.message = "eigenpair residual above 1e-11";
    return out;
}

Eigen::MatrixXcd register_liouvillian(std::span<const Params> per_qubit) {
    const std::size_t n = per_qubit.size();
    if (n == 0 || n > 3) throw ValidationError("register_liouvillian: dense oracle supports 1 to 3 qubits");
    const Eigen::Index d = Eigen::Index{1} << n;
    const Eigen::MatrixXcd I = Eigen::MatrixXcd::Identity(d, d);
    Eigen::MatrixXcd gen = Eigen::MatrixXcd::Zero(d * d, d * d);
    for (std::size_t k = 0; k < n; ++k) {
        const Params& q = per_qubit[k];
        const Eigen::MatrixXcd H = embed(0.5 * q.omega0 * pauli(Pauli::z), k, n);
        gen += complex(0.0, -1.0) * (sandwich(H, I) - sandwich(I, H));
        const Eigen::MatrixXcd lower = embed(pauli(Pauli::minus), k, n);
        const Eigen::MatrixXcd raise = embed(pauli(Pauli::plus), k, n);
        const std::pair<double, const Eigen::MatrixXcd*> channels[] = {
            {q.gamma * (q.nbar + 1.0), &lower}, {q.gamma * q.nbar, &raise}};
        for (const auto& [rate, L] : channels) {
            const Eigen::MatrixXcd Ld = L->adjoint();
            const Eigen::MatrixXcd LdL = Ld * *L;
            gen += rate * (sandwich(*L, Ld) - 0.5 * sandwich(LdL, I) - 0.5 * sandwich(I, LdL));
        }
    }
    return gen;
}

std::vector<Eigen::MatrixXcd> integrate_register(std::span<const ParamSchedule> per_qubit,
                                                 const Eigen::MatrixXcd& rho0, std::span<const double> grid,
                                                 double dt_max) {
    const std::size_t n = per_qubit.size();
    if (n == 0 || n > 3) throw ValidationError("integrate_register: dense oracle supports 1 to 3 qubits");
    const Eigen::Index d = Eigen::Index{1} << n;
    if (rho0.rows() != d || rho0.cols() != d) throw ValidationError("integrate_register: rho0 has the wrong size");
    if (grid.empty()) throw ValidationError("integrate_register: empty grid");

    double dt = dt_max;
    std::vector<double> breaks;
    for (const auto& p : per_qubit) {
        p.validate(grid.back());
        dt = std::min(dt, oracle_step(p, grid, dt_max));
        const auto b = p.breakpoints(grid.front(), grid.back());
        breaks.insert(breaks.end(), b.begin(), b.end());
    }
    auto rhs = [&](double t, const Eigen::VectorXcd& v) -> Eigen::VectorXcd {
        std::vector<Params> q;
        q.reserve(n);
        for (const auto& p : per_qubit) q.push_back(p.at(t));
        return register_liouvillian(q) * v;
    };
    const auto raw = ode::rk4(rhs, vec(rho0), grid, breaks, dt);
    std::vector<Eigen::MatrixXcd> out;
    out.reserve(raw.size());
    for (const auto& v : raw) out.push_back(unvec(v, d));
    return out;
}

}  // namespace tlsdyn::oracle
