#include "tlsdyn/gauge.hpp"

#include <algorithm>
#include <cmath>

#include "tlsdyn/errors.hpp"

namespace tlsdyn {

GaugeState::Packed GaugeState::pack() const {
    Packed v;
    v << alpha_plus.real(), alpha_plus.imag(), y.real(), y.imag(), log_F11, phase, decay_half;
    return v;
}

GaugeState GaugeState::unpack(double t, const Packed& v) {
    GaugeState g;
    g.alpha_plus = {v[0], v[1]};
    g.y = {v[2], v[3]};
    g.log_F11 = v[4];
    g.phase = v[5];
    g.decay_half = v[6];
    g.t = t;
    return g;
}

complex GaugeState::alpha_minus() const { return y / std::exp(log_F11); }

// Equal to exp(-log F11 - 2 D) on exact solutions; this form avoids the
// cancellation between two large exponents.
double GaugeState::f_mm() const { return 1.0 / (1.0 + alpha_plus.real()); }

GaugeState riccati_rhs(const GaugeState& g, const Params& p) {
    const double gamma = p.gamma;
    const double n = p.nbar;
    const complex ap = g.alpha_plus;
    GaugeState d;
    d.t = g.t;
    d.alpha_plus = -gamma * (n + 1.0) * ap * ap - gamma * ap + gamma * n;
    d.log_F11 = -gamma * (n + 1.0) * (ap.real() + 1.0);
    d.phase = p.omega0;
    d.decay_half = 0.5 * gamma * (2.0 * n + 1.0);
    // y = a- F11; the a- equation g(n+1)(1 + 2 a+ a-) + g a- becomes
    // y' = g(n+1) F11 + y g [(n+1) a+ - n].
    d.y = gamma * (n + 1.0) * std::exp(g.log_F11) + g.y * gamma * ((n + 1.0) * ap - n);
    return d;
}

GaugeState riccati_rhs(const GaugeState& g, const ParamSchedule& p) { return riccati_rhs(g, p.at(g.t)); }

std::vector<GaugeState> integrate_gauge(const ParamSchedule& p, std::span<const double> grid,
                                        const GaugeOptions& opt, ode::Stats* stats) {
    if (grid.empty() || grid.front() != 0.0) throw ValidationError("integrate_gauge: time grid must start at 0");
    if (!(opt.tol > 0.0)) throw ValidationError("integrate_gauge: tol must be > 0");
    p.validate(grid.back());

    using Packed = GaugeState::Packed;
    auto rhs = [&p](double t, const Packed& v) -> Packed {
        return riccati_rhs(GaugeState::unpack(t, v), p).pack();
    };
    const auto breaks = p.breakpoints(grid.front(), grid.back());
    const Packed y0 = GaugeState{}.pack();

    std::vector<Packed> raw;
    if (opt.method == GaugeMethod::dopri5) {
        ode::AdaptiveOptions ao;
        ao.rtol = opt.tol;
        ao.atol = opt.tol;
        raw = ode::dopri5(rhs, y0, grid, breaks, ao, stats);
    } else {
        raw = ode::rk4(rhs, y0, grid, breaks, opt.rk4_dt, stats);
    }

    std::vector<GaugeState> out;
    out.reserve(raw.size());
    for (std::size_t i = 0; i < raw.size(); ++i) {
        for (Eigen::Index k = 0; k < raw[i].size(); ++k)
            if (!std::isfinite(raw[i][k])) throw NumericalError("integrate_gauge: non-finite gauge state", grid[i]);
        out.push_back(GaugeState::unpack(grid[i], raw[i]));
    }
    return out;
}

std::vector<GaugeState> integrate_gauge(const ParamSchedule& p, std::span<const double> grid, double tol) {
    GaugeOptions opt;
    opt.tol = tol;
    return integrate_gauge(p, grid, opt);
}

SuperOp propagator(const GaugeState& g) {
    const double fmm = g.f_mm();
    const complex ap = g.alpha_plus;
    const double damp = std::exp(-g.decay_half);

    constexpr int pp = vec_index({Spin::up, Spin::up});
    constexpr int mp = vec_index({Spin::down, Spin::up});
    constexpr int pm = vec_index({Spin::up, Spin::down});
    constexpr int mm = vec_index({Spin::down, Spin::down});

    Eigen::Matrix4cd m = Eigen::Matrix4cd::Zero();
    // F11 + a+ y = 1 - y on exact solutions; the right-hand form keeps the
    // trace at 1 independent of the integration error.
    m(pp, pp) = 1.0 - g.y;
    m(mm, pp) = g.y;
    m(pp, mm) = fmm * ap;
    m(mm, mm) = fmm;
    m(pm, pm) = std::polar(damp, -g.phase);
    m(mp, mp) = std::polar(damp, g.phase);
    return SuperOp(m);
}

DensityMatrix evolve(const GaugeState& g, const DensityMatrix& rho0) { return apply(propagator(g), rho0); }

Observables observables(const DensityMatrix& rho) {
    Observables o;
    o.sigma_z = (rho(Spin::up, Spin::up) - rho(Spin::down, Spin::down)).real();
    // Tr(sigma_+ rho) = rho_{-+}, Tr(sigma_- rho) = rho_{+-}
    o.sigma_plus = rho(Spin::down, Spin::up);
    o.sigma_minus = rho(Spin::up, Spin::down);
    return o;
}

double purity(const DensityMatrix& rho) { return (rho.matrix() * rho.matrix()).trace().real(); }

Trajectory propagate(const ParamSchedule& p, const DensityMatrix& rho0, std::span<const double> grid,
                     const GaugeOptions& opt) {
    if (!is_physical(rho0, 1e-9)) throw ValidationError("propagate: initial state is not a density matrix");
    Trajectory traj;
    const auto gauges = integrate_gauge(p, grid, opt, &traj.stats);
    traj.samples.reserve(gauges.size());
    for (const auto& g : gauges) {
        Trajectory::Sample s;
        s.t = g.t;
        s.gauge = g;
        s.rho = evolve(g, rho0);
        s.obs = observables(s.rho);
        traj.samples.push_back(s);
    }
    return traj;
}

Trajectory propagate(const ParamSchedule& p, const DensityMatrix& rho0, std::span<const double> grid, double tol) {
    GaugeOptions opt;
    opt.tol = tol;
    return propagate(p, rho0, grid, opt);
}

AlphaPair autonomous_alpha(double gamma, double nbar, double t) {
    const double n = nbar;
    const double rate = gamma * (2.0 * n + 1.0);
    const double one_minus_e = -std::expm1(-rate * t);
    const double e = std::exp(-rate * t);
    AlphaPair a;
    // Written with n in the numerator so the nbar -> 0 limit stays finite.
    a.alpha_plus = n * one_minus_e / ((n + 1.0) + n * e);
    a.alpha_minus = (n + 1.0) * ((n + 1.0) + n * e) * one_minus_e / ((2.0 * n + 1.0) * (2.0 * n + 1.0) * e);
    return a;
}

FFactors autonomous_f(double gamma, double nbar, double omega0, double t) {
    const double n = nbar;
    const double rate = gamma * (2.0 * n + 1.0);
    const double e = std::exp(-rate * t);
    FFactors f;
    f.f_pp = (2.0 * n + 1.0) * e / ((n + 1.0) + n * e);
    f.f_mm = ((n + 1.0) + n * e) / (2.0 * n + 1.0);
    f.f_pm = std::polar(std::exp(-0.5 * rate * t), -omega0 * t);
    f.f_mp = std::polar(std::exp(-0.5 * rate * t), omega0 * t);
    return f;
}

FFactors f_factors(const GaugeState& g) {
    FFactors f;
    f.f_pp = std::exp(g.log_F11);
    f.f_mm = g.f_mm();
    f.f_pm = std::polar(std::exp(-g.decay_half), -g.phase);
    f.f_mp = std::polar(std::exp(-g.decay_half), g.phase);
    return f;
}

AsymptoticReport asymptotic_report(const ParamSchedule& p, double horizon, double tol) {
    if (!(horizon > 0.0)) throw ValidationError("asymptotic_report: horizon must be > 0");
    std::vector<double> grid(11);
    for (int k = 0; k <= 10; ++k) grid[k] = horizon * k / 10.0;
    grid.back() = horizon;
    const auto gs = integrate_gauge(p, grid, tol);
    const GaugeState& last = gs.back();
    const GaugeState& prev = gs[9];

    AsymptoticReport r;
    r.horizon = horizon;
    const Params fin = p.at(horizon);
    const Params near = p.at(grid[9]);
    r.nbar_final = fin.nbar;
    r.alpha_plus_final = last.alpha_plus.real();
    r.alpha_plus_target = fin.nbar / (fin.nbar + 1.0);
    r.alpha_plus_residual = std::abs(last.alpha_plus - r.alpha_plus_target);
    r.y_final = last.y;
    r.y_relative_drift = std::abs(last.y) > 0.0 ? std::abs(last.y - prev.y) / std::abs(last.y) : 0.0;
    r.f_mm_final = last.f_mm();
    r.f_mm_target = (fin.nbar + 1.0) / (2.0 * fin.nbar + 1.0);
    r.f_mm_residual = std::abs(r.f_mm_final - r.f_mm_target);
    r.relaxation_integral = 2.0 * last.decay_half;
    r.relaxed = std::exp(-r.relaxation_integral) < 1e-6;

    auto stationary = [](double a, double b) { return std::abs(a - b) <= 1e-6 * std::max(1.0, std::abs(a)); };
    r.schedule_converged =
        stationary(fin.gamma, near.gamma) && stationary(fin.nbar, near.nbar) && stationary(fin.omega0, near.omega0);
    r.converged = r.relaxed && r.schedule_converged && r.alpha_plus_residual < 1e-6 && r.y_relative_drift < 1e-6 &&
                  r.f_mm_residual < 1e-6;
    return r;
}

}  // namespace tlsdyn
