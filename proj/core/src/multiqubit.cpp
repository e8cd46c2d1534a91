#include "tlsdyn/multiqubit.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>

#include "tlsdyn/errors.hpp"
#include "tlsdyn/spectral.hpp"

namespace tlsdyn {

namespace {

std::pair<std::size_t, std::size_t> dense_position(const std::vector<int>& key) {
    std::size_t row = 0;
    std::size_t col = 0;
    for (int k : key) {
        const Label l = label_at(k);
        row = (row << 1) | static_cast<std::size_t>(index(l.ket));
        col = (col << 1) | static_cast<std::size_t>(index(l.bra));
    }
    return {row, col};
}

std::vector<int> transposed(const std::vector<int>& key) {
    std::vector<int> out(key.size());
    for (std::size_t i = 0; i < key.size(); ++i) {
        const Label l = label_at(key[i]);
        out[i] = vec_index({l.bra, l.ket});
    }
    return out;
}

}  // namespace

ProductStateExpansion::ProductStateExpansion(std::size_t n_qubits, std::span<const ProductTerm> terms)
    : n_(n_qubits) {
    for (const auto& t : terms) add(t.coefficient, t.factors);
}

void ProductStateExpansion::add(complex coefficient, std::vector<Label> factors) {
    if (factors.size() != n_) throw ValidationError("product term has the wrong number of factors");
    Key key(factors.size());
    for (std::size_t i = 0; i < factors.size(); ++i) key[i] = vec_index(factors[i]);
    terms_[key] += coefficient;
}

std::vector<ProductTerm> ProductStateExpansion::terms() const {
    std::vector<ProductTerm> out;
    out.reserve(terms_.size());
    for (const auto& [key, c] : terms_) {
        ProductTerm t{c, {}};
        for (int k : key) t.factors.push_back(label_at(k));
        out.push_back(std::move(t));
    }
    return out;
}

complex ProductStateExpansion::coefficient(std::span<const Label> factors) const {
    Key key(factors.size());
    for (std::size_t i = 0; i < factors.size(); ++i) key[i] = vec_index(factors[i]);
    const auto it = terms_.find(key);
    return it == terms_.end() ? complex(0.0) : it->second;
}

complex ProductStateExpansion::element(std::size_t row, std::size_t col) const {
    Key key(n_);
    for (std::size_t k = 0; k < n_; ++k) {
        const std::size_t shift = n_ - 1 - k;
        const Spin ket = spin_at(static_cast<int>((row >> shift) & 1U));
        const Spin bra = spin_at(static_cast<int>((col >> shift) & 1U));
        key[k] = vec_index({ket, bra});
    }
    const auto it = terms_.find(key);
    return it == terms_.end() ? complex(0.0) : it->second;
}

complex ProductStateExpansion::trace() const {
    complex tr = 0.0;
    for (const auto& [key, c] : terms_) {
        const auto [r, col] = dense_position(key);
        if (r == col) tr += c;
    }
    return tr;
}

double ProductStateExpansion::purity() const {
    complex acc = 0.0;
    for (const auto& [key, c] : terms_) {
        const auto it = terms_.find(transposed(key));
        if (it != terms_.end()) acc += c * it->second;
    }
    return acc.real();
}

double ProductStateExpansion::coherence_l1() const {
    double acc = 0.0;
    for (const auto& [key, c] : terms_) {
        const auto [r, col] = dense_position(key);
        if (r != col) acc += std::abs(c);
    }
    return acc;
}

double ProductStateExpansion::hermiticity_defect() const {
    double worst = 0.0;
    for (const auto& [key, c] : terms_) {
        const auto it = terms_.find(transposed(key));
        const complex partner = it == terms_.end() ? complex(0.0) : it->second;
        worst = std::max(worst, std::abs(c - std::conj(partner)));
    }
    return worst;
}

Eigen::MatrixXcd ProductStateExpansion::to_dense() const {
    if (n_ == 0 || n_ > kMaxDenseQubits) throw ValidationError("dense reconstruction is limited to 1..3 qubits");
    const Eigen::Index d = Eigen::Index{1} << n_;
    Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(d, d);
    for (const auto& [key, c] : terms_) {
        const auto [r, col] = dense_position(key);
        m(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(col)) += c;
    }
    return m;
}

ProductStateExpansion ProductStateExpansion::product(std::span<const DensityMatrix> factors) {
    ProductStateExpansion out(factors.size());
    if (factors.empty()) return out;
    // Enumerate all 4^N label tuples with a non-zero product coefficient.
    std::vector<int> idx(factors.size(), 0);
    while (true) {
        complex c = 1.0;
        std::vector<Label> labels(factors.size());
        for (std::size_t k = 0; k < factors.size(); ++k) {
            labels[k] = label_at(idx[k]);
            c *= factors[k].at(labels[k]);
        }
        if (c != complex(0.0)) out.add(c, labels);
        std::size_t k = factors.size();
        while (k > 0 && ++idx[k - 1] == 4) idx[--k] = 0;
        if (k == 0) break;
    }
    return out;
}

bool is_physical(const ProductStateExpansion& rho, double tol) {
    if (std::abs(rho.trace() - 1.0) > tol || rho.hermiticity_defect() > tol) return false;
    if (rho.n_qubits() > kMaxDenseQubits) return true;
    const Eigen::MatrixXcd m = rho.to_dense();
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(0.5 * (m + m.adjoint()), Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tol;
}

RegisterSchedule RegisterSchedule::shared(ParamSchedule p, std::size_t n_qubits) {
    if (n_qubits == 0) throw ValidationError("register needs at least one qubit");
    RegisterSchedule rs;
    rs.n_ = n_qubits;
    rs.distinct_.push_back(std::move(p));
    rs.index_.assign(n_qubits, 0);
    return rs;
}

RegisterSchedule RegisterSchedule::per_qubit(std::vector<ParamSchedule> ps) {
    if (ps.empty()) throw ValidationError("register needs at least one qubit");
    RegisterSchedule rs;
    rs.n_ = ps.size();
    for (auto& p : ps) {
        const auto it = std::find(rs.distinct_.begin(), rs.distinct_.end(), p);
        if (it == rs.distinct_.end()) {
            rs.index_.push_back(rs.distinct_.size());
            rs.distinct_.push_back(std::move(p));
        } else {
            rs.index_.push_back(static_cast<std::size_t>(it - rs.distinct_.begin()));
        }
    }
    return rs;
}

const ParamSchedule& RegisterSchedule::schedule(std::size_t qubit) const { return distinct_.at(index_.at(qubit)); }

std::vector<ParamSchedule> RegisterSchedule::expanded() const {
    std::vector<ParamSchedule> out;
    for (std::size_t k = 0; k < n_; ++k) out.push_back(schedule(k));
    return out;
}

ProductStateExpansion apply_factorwise(std::span<const SuperOp> per_qubit, const ProductStateExpansion& rho) {
    const std::size_t n = rho.n_qubits();
    if (per_qubit.size() != n) throw ValidationError("apply_factorwise: one superoperator per qubit required");
    ProductStateExpansion out(n);
    std::vector<Label> labels(n);
    for (const auto& term : rho.terms()) {
        // Depth-first expansion over the non-zero images of each factor.
        auto expand = [&](auto&& self, std::size_t k, complex c) -> void {
            if (k == n) {
                out.add(c, labels);
                return;
            }
            const auto col = per_qubit[k].matrix().col(vec_index(term.factors[k]));
            for (int r = 0; r < 4; ++r) {
                if (col(r) == complex(0.0)) continue;
                labels[k] = label_at(r);
                self(self, k + 1, c * col(r));
            }
        };
        expand(expand, 0, term.coefficient);
    }
    return out;
}

RegisterTrajectory propagate_register(const RegisterSchedule& rs, const ProductStateExpansion& rho0,
                                      std::span<const double> grid, double tol) {
    if (rho0.n_qubits() != rs.n_qubits())
        throw ValidationError("propagate_register: state and schedule disagree on the number of qubits");
    if (!is_physical(rho0, 1e-9)) throw ValidationError("propagate_register: initial state is not a density matrix");

    RegisterTrajectory traj;
    traj.t.assign(grid.begin(), grid.end());
    for (const auto& p : rs.distinct()) traj.gauges.push_back(integrate_gauge(p, grid, tol));

    const std::size_t n = rs.n_qubits();
    traj.states.reserve(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        std::vector<SuperOp> cache;
        cache.reserve(traj.gauges.size());
        for (const auto& g : traj.gauges) cache.push_back(propagator(g[i]));
        std::vector<SuperOp> per_qubit;
        per_qubit.reserve(n);
        for (std::size_t k = 0; k < n; ++k) per_qubit.push_back(cache[rs.distinct_index(k)]);
        traj.states.push_back(apply_factorwise(per_qubit, rho0));
    }
    return traj;
}

ProductStateExpansion entangled_pair(complex alpha, complex beta) {
    const Label pp{Spin::up, Spin::up};
    const Label mm{Spin::down, Spin::down};
    const Label pm{Spin::up, Spin::down};
    const Label mp{Spin::down, Spin::up};
    ProductStateExpansion rho(2);
    rho.add(std::norm(alpha), {pp, mm});
    rho.add(std::norm(beta), {mm, pp});
    rho.add(alpha * std::conj(beta), {pm, mp});
    rho.add(std::conj(alpha) * beta, {mp, pm});
    return rho;
}

RegisterTrajectory two_qubit_entangled(complex alpha, complex beta, const ParamSchedule& p,
                                       std::span<const double> grid, double tol) {
    if (std::abs(std::norm(alpha) + std::norm(beta) - 1.0) > 1e-12)
        throw ValidationError("two_qubit_entangled: |alpha|^2 + |beta|^2 must equal 1");
    return propagate_register(RegisterSchedule::shared(p, 2), entangled_pair(alpha, beta), grid, tol);
}

Eigen::MatrixXcd kron(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b) {
    Eigen::MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

Eigen::Matrix4cd autonomous_two_qubit(complex alpha, complex beta, double gamma, double nbar, double omega0,
                                      double t) {
    const SpectralSet basis = physical_eigensolutions(gamma, nbar, omega0);
    const Eigen::MatrixXcd r1 = basis.entries[0].rho.matrix();
    const Eigen::MatrixXcd r2 = basis.entries[1].rho.matrix();
    const Eigen::MatrixXcd r3 = basis.entries[2].rho.matrix();
    const Eigen::MatrixXcd r4 = basis.entries[3].rho.matrix();

    const double n = nbar;
    const double a2 = std::norm(alpha);
    const double b2 = std::norm(beta);
    const double e = std::exp(-gamma * (2.0 * n + 1.0) * t);
    // The population mode rho_2 = |-1><-1| - |+1><+1| enters with unit
    // weight in each factor; with rho_2 / 2 the weights would be 2, 2, 4.
    Eigen::MatrixXcd m = e * ((n * a2 - (n + 1.0) * b2) / (2.0 * n + 1.0) * kron(r1, r2) +
                              (n * b2 - (n + 1.0) * a2) / (2.0 * n + 1.0) * kron(r2, r1) +
                              alpha * std::conj(beta) * kron(r3, r4) + std::conj(alpha) * beta * kron(r4, r3)) -
                         e * e * n * (n + 1.0) / ((2.0 * n + 1.0) * (2.0 * n + 1.0)) * kron(r2, r2) + kron(r1, r1);
    return m;
}

DecoherenceMetrics decoherence_metrics(const RegisterTrajectory& traj) {
    DecoherenceMetrics m;
    m.t = traj.t;
    for (const auto& s : traj.states) {
        m.coherence_l1.push_back(s.coherence_l1());
        m.purity.push_back(s.purity());
    }
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t k = 0;
    for (std::size_t i = 0; i < m.t.size(); ++i) {
        if (!(m.coherence_l1[i] > 1e-8)) continue;
        const double x = m.t[i];
        const double y = std::log(m.coherence_l1[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
        ++k;
    }
    m.fit_points = k;
    if (k < 2) return m;
    const double kd = static_cast<double>(k);
    const double denom = kd * sxx - sx * sx;
    if (!(denom > 0.0)) return m;
    const double slope = (kd * sxy - sx * sy) / denom;
    if (!(slope < 0.0)) return m;
    m.tau_decoh = -1.0 / slope;
    m.fit_degenerate = false;
    return m;
}

}  // namespace tlsdyn
