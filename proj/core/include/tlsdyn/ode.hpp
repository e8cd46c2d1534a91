#pragma once

// Explicit Runge-Kutta integrators over Eigen vectors.
//
//  * dopri5: Dormand-Prince 5(4) with FSAL, PI-free step control and the
//    standard 4th-order continuous extension for output on a time grid.
//  * rk4: classic fixed-step Runge-Kutta 4.
//
// Both stop exactly at caller-supplied breakpoints (kinks of a piecewise
// schedule) so that no step straddles a derivative discontinuity.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <span>
#include <sstream>
#include <vector>

#include <Eigen/Core>

#include "tlsdyn/errors.hpp"

namespace tlsdyn::ode {

struct AdaptiveOptions {
    double rtol = 1e-10;
    double atol = 1e-10;
    /// Steps smaller than h_min * max(1, |t|) abort the integration.
    double h_min = 1e-14;
    std::size_t max_steps = 50'000'000;
};

struct Stats {
    std::size_t accepted = 0;
    std::size_t rejected = 0;
    std::size_t rhs_evals = 0;
};

namespace detail {

inline void check_grid(std::span<const double> grid) {
    if (grid.empty()) throw ValidationError("time grid is empty");
    for (std::size_t i = 1; i < grid.size(); ++i)
        if (!(grid[i] > grid[i - 1])) throw ValidationError("time grid must be strictly increasing");
}

// Segment ends: breakpoints strictly inside the grid span, then the last grid time.
inline std::vector<double> segment_ends(std::span<const double> grid, std::span<const double> breakpoints) {
    std::vector<double> ends;
    for (double b : breakpoints)
        if (b > grid.front() && b < grid.back()) ends.push_back(b);
    ends.push_back(grid.back());
    std::sort(ends.begin(), ends.end());
    ends.erase(std::unique(ends.begin(), ends.end()), ends.end());
    return ends;
}

}  // namespace detail

/// Integrates dy/dt = rhs(t, y) from grid[0] and returns y at every grid time.
template <class Vec, class Rhs>
std::vector<Vec> dopri5(Rhs&& rhs, const Vec& y0, std::span<const double> grid,
                        std::span<const double> breakpoints, const AdaptiveOptions& opt, Stats* stats = nullptr) {
    detail::check_grid(grid);
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                     a65 = -5103.0 / 18656;
    constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784,
                     a76 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                     e6 = 22.0 / 525, e7 = -1.0 / 40;
    constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                     d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                     d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;

    Stats local;
    Stats& st = stats ? *stats : local;

    std::vector<Vec> out;
    out.reserve(grid.size());
    out.push_back(y0);
    std::size_t next = 1;

    double t = grid.front();
    Vec y = y0;
    double h = 0.0;

    auto norm = [&](const Vec& err, const Vec& ya, const Vec& yb) {
        double acc = 0.0;
        for (Eigen::Index i = 0; i < err.size(); ++i) {
            const double sk = opt.atol + opt.rtol * std::max(std::abs(ya[i]), std::abs(yb[i]));
            const double r = err[i] / sk;
            acc += r * r;
        }
        return std::sqrt(acc / static_cast<double>(err.size()));
    };

    for (double t_end : detail::segment_ends(grid, breakpoints)) {
        Vec k1 = rhs(t, y);
        ++st.rhs_evals;
        if (h == 0.0) {
            // Initial step from the scale of y and y'.
            const Vec zero = Vec::Zero(y.size());
            const double d0 = norm(y, y, zero);
            const double d1n = norm(k1, y, zero);
            h = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
            h = std::min(h, t_end - t);
        }
        bool reject_last = false;
        while (t < t_end) {
            if (st.accepted + st.rejected >= opt.max_steps) throw NumericalError("dopri5: step budget exhausted", t);
            bool last = false;
            if (t + h >= t_end - 1e-15 * std::max(1.0, std::abs(t_end))) {
                h = t_end - t;
                last = true;
            }
            if (h < opt.h_min * std::max(1.0, std::abs(t))) {
                std::ostringstream os;
                os << "dopri5: step size underflow at t=" << t;
                throw NumericalError(os.str(), t);
            }
            const Vec k2 = rhs(t + c2 * h, Vec(y + h * (a21 * k1)));
            const Vec k3 = rhs(t + c3 * h, Vec(y + h * (a31 * k1 + a32 * k2)));
            const Vec k4 = rhs(t + c4 * h, Vec(y + h * (a41 * k1 + a42 * k2 + a43 * k3)));
            const Vec k5 = rhs(t + c5 * h, Vec(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4)));
            const Vec k6 = rhs(t + h, Vec(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5)));
            const double t_new = last ? t_end : t + h;
            const Vec y_new = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
            const Vec k7 = rhs(t_new, y_new);
            st.rhs_evals += 6;

            const Vec err_vec = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
            double err = norm(err_vec, y, y_new);
            if (!std::isfinite(err)) err = 1e10;

            if (err <= 1.0) {
                ++st.accepted;
                // Continuous extension for grid points in (t, t_new].
                while (next < grid.size() && grid[next] <= t_new) {
                    if (grid[next] == t_new) {
                        out.push_back(y_new);
                    } else {
                        const double theta = (grid[next] - t) / h;
                        const double theta1 = 1.0 - theta;
                        const Vec r2 = y_new - y;
                        const Vec r3 = h * k1 - r2;
                        const Vec r4 = r2 - h * k7 - r3;
                        const Vec r5 = h * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
                        out.push_back(y + theta * (r2 + theta1 * (r3 + theta * (r4 + theta1 * r5))));
                    }
                    ++next;
                }
                t = t_new;
                y = y_new;
                k1 = k7;
                double fac = 0.9 * std::pow(std::max(err, 1e-10), -0.2);
                fac = std::clamp(fac, 0.2, reject_last ? 1.0 : 5.0);
                if (!last) h *= fac;
                reject_last = false;
            } else {
                ++st.rejected;
                h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
                reject_last = true;
            }
        }
    }
    if (out.size() != grid.size()) throw NumericalError("dopri5: dense output missed grid points", t);
    return out;
}

/// Fixed-step RK4; every interval between consecutive grid points and
/// breakpoints is split into equal steps no longer than dt_max.
template <class Vec, class Rhs>
std::vector<Vec> rk4(Rhs&& rhs, const Vec& y0, std::span<const double> grid, std::span<const double> breakpoints,
                     double dt_max, Stats* stats = nullptr) {
    detail::check_grid(grid);
    if (!(dt_max > 0.0)) throw ValidationError("rk4: dt_max must be > 0");
    Stats local;
    Stats& st = stats ? *stats : local;

    std::vector<double> stops(grid.begin(), grid.end());
    for (double b : breakpoints)
        if (b > grid.front() && b < grid.back()) stops.push_back(b);
    std::sort(stops.begin(), stops.end());
    stops.erase(std::unique(stops.begin(), stops.end()), stops.end());

    std::vector<Vec> out;
    out.reserve(grid.size());
    out.push_back(y0);
    std::size_t next = 1;
    Vec y = y0;
    for (std::size_t i = 1; i < stops.size(); ++i) {
        const double t0 = stops[i - 1];
        const double span = stops[i] - t0;
        const auto n = static_cast<std::size_t>(std::ceil(span / dt_max - 1e-12));
        const double dt = span / static_cast<double>(std::max<std::size_t>(n, 1));
        for (std::size_t k = 0; k < std::max<std::size_t>(n, 1); ++k) {
            const double t = t0 + static_cast<double>(k) * dt;
            const Vec k1 = rhs(t, y);
            const Vec k2 = rhs(t + 0.5 * dt, Vec(y + (0.5 * dt) * k1));
            const Vec k3 = rhs(t + 0.5 * dt, Vec(y + (0.5 * dt) * k2));
            const Vec k4 = rhs(t + dt, Vec(y + dt * k3));
            y += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            st.rhs_evals += 4;
            ++st.accepted;
        }
        if (next < grid.size() && stops[i] == grid[next]) {
            out.push_back(y);
            ++next;
        }
    }
    return out;
}

}  // namespace tlsdyn::ode
