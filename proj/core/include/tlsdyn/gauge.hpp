#pragma once

// Non-autonomous solution of the two-level master equation by the
// time-dependent gauge transformation U_g(t) = exp(a+(t) J+) exp(a-(t) J-).
//
// a+ obeys a Riccati equation and stays bounded; a- diverges as the state
// relaxes. The integrated variables are therefore
//
//   a+,  y = a- F11,  log F11,  Phi = int w0,  D = (1/2) int g (2n + 1),
//
// with F11 = exp(-int g (n+1)(a+ + 1)) equal to the population factor f_{1,1}.
// Every coefficient of rho(t) is a bounded combination of these:
//
//   rho_pp(t) = (F11 + a+ y) p_pp + f_mm a+ p_mm,  F11 + a+ y = 1 - y
//   rho_mm(t) = y p_pp + f_mm p_mm
//   rho_pm(t) = exp(-i Phi - D) p_pm,  rho_mp(t) = exp(+i Phi - D) p_mp
//
// where f_mm = f_{-1,-1} = exp(-log F11 - 2 D) = 1 / (1 + a+). The coherence channel rho_mp
// is the Hermitian partner of rho_pm and decays onto |-1><+1|.

#include <complex>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "tlsdyn/ode.hpp"
#include "tlsdyn/schedule.hpp"
#include "tlsdyn/superalgebra.hpp"

namespace tlsdyn {

struct GaugeState {
    complex alpha_plus{0.0, 0.0};
    complex y{0.0, 0.0};
    double log_F11 = 0.0;
    double phase = 0.0;
    double decay_half = 0.0;
    double t = 0.0;

    using Packed = Eigen::Matrix<double, 7, 1>;
    Packed pack() const;
    static GaugeState unpack(double t, const Packed& v);

    /// a- reconstructed as y / F11; overflows once F11 underflows.
    complex alpha_minus() const;
    /// f_{-1,-1} = exp(int g [(n+1) a+ - n]).
    double f_mm() const;
};

/// Time derivative of every GaugeState component; t is unused.
GaugeState riccati_rhs(const GaugeState& g, const Params& p);
GaugeState riccati_rhs(const GaugeState& g, const ParamSchedule& p);

enum class GaugeMethod { dopri5, rk4 };

struct GaugeOptions {
    double tol = 1e-10;
    GaugeMethod method = GaugeMethod::dopri5;
    double rk4_dt = 1e-3;  ///< step for the fixed-step diagnostic mode
};

/// Integrates from a+(0) = a-(0) = 0 and samples at every grid time.
/// grid must start at 0 and increase. Throws ValidationError / DomainError for
/// bad inputs and NumericalError on step-size underflow.
std::vector<GaugeState> integrate_gauge(const ParamSchedule& p, std::span<const double> grid,
                                        const GaugeOptions& opt, ode::Stats* stats = nullptr);
std::vector<GaugeState> integrate_gauge(const ParamSchedule& p, std::span<const double> grid, double tol);

/// Single-atom propagator rho(0) -> rho(t) as a superoperator.
SuperOp propagator(const GaugeState& g);

/// Applies the gauge solution to an arbitrary (not necessarily physical) rho0.
DensityMatrix evolve(const GaugeState& g, const DensityMatrix& rho0);

struct Observables {
    double sigma_z = 0.0;
    complex sigma_plus{0.0, 0.0};
    complex sigma_minus{0.0, 0.0};
};

/// Tr(sigma rho) for sigma_z and sigma_+-.
Observables observables(const DensityMatrix& rho);

double purity(const DensityMatrix& rho);

struct Trajectory {
    struct Sample {
        double t = 0.0;
        DensityMatrix rho;
        GaugeState gauge;
        Observables obs;
    };
    std::vector<Sample> samples;
    ode::Stats stats;
};

/// Throws ValidationError if rho0 is not a state within 1e-9.
Trajectory propagate(const ParamSchedule& p, const DensityMatrix& rho0, std::span<const double> grid,
                     const GaugeOptions& opt);
Trajectory propagate(const ParamSchedule& p, const DensityMatrix& rho0, std::span<const double> grid, double tol);

struct AlphaPair {
    double alpha_plus = 0.0;
    double alpha_minus = 0.0;
};

/// Closed-form a+-(t) for constant gamma and nbar; nbar = 0 gives (0, e^{g t} - 1).
AlphaPair autonomous_alpha(double gamma, double nbar, double t);

struct FFactors {
    double f_pp = 1.0;  ///< f_{1,1}
    double f_mm = 1.0;  ///< f_{-1,-1}
    complex f_pm{1.0, 0.0};  ///< f_{1,-1}
    complex f_mp{1.0, 0.0};  ///< f_{-1,1}
};

FFactors autonomous_f(double gamma, double nbar, double omega0, double t);

/// f-factors reconstructed from an integrated gauge state.
FFactors f_factors(const GaugeState& g);

struct AsymptoticReport {
    double horizon = 0.0;
    double nbar_final = 0.0;
    double alpha_plus_final = 0.0;
    double alpha_plus_target = 0.0;  ///< n / (n + 1) with n = nbar(horizon)
    double alpha_plus_residual = 0.0;
    complex y_final{0.0, 0.0};
    double y_relative_drift = 0.0;   ///< |y(T) - y(0.9 T)| / |y(T)|
    double f_mm_final = 0.0;
    double f_mm_target = 0.0;        ///< (n + 1) / (2n + 1)
    double f_mm_residual = 0.0;
    double relaxation_integral = 0.0;  ///< int_0^T g (2n + 1) = 2 D(T)
    bool relaxed = false;              ///< exp(-relaxation_integral) < 1e-6
    bool schedule_converged = false;   ///< parameters stationary over the last 10%
    bool converged = false;
};

AsymptoticReport asymptotic_report(const ParamSchedule& p, double horizon, double tol = 1e-12);

}  // namespace tlsdyn
