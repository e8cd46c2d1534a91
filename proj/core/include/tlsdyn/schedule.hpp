#pragma once

// Time-dependent parameter schedules for the damping rate gamma(t), the bath
// occupation nbar(t) (or the bath temperature T(t)), and the transition
// frequency omega0(t). Units: hbar = k_B = 1.

#include <span>
#include <utility>
#include <variant>
#include <vector>

namespace tlsdyn {

struct Constant {
    double value = 0.0;
    friend bool operator==(const Constant&, const Constant&) = default;
};

/// Piecewise-linear interpolation through (times[i], values[i]).
struct TableLinear {
    std::vector<double> times;
    std::vector<double> values;
    friend bool operator==(const TableLinear&, const TableLinear&) = default;
};

/// v(t) = end + (start - end) exp(-rate t).
struct ExponentialApproach {
    double start = 0.0;
    double end = 0.0;
    double rate = 0.0;
    friend bool operator==(const ExponentialApproach&, const ExponentialApproach&) = default;
};

class Schedule {
public:
    using Kind = std::variant<Constant, TableLinear, ExponentialApproach>;

    Schedule() : kind_(Constant{0.0}) {}
    /// Throws ValidationError for malformed tables or non-finite values.
    Schedule(Kind kind);  // NOLINT(google-explicit-constructor)
    static Schedule constant(double v) { return Schedule(Constant{v}); }

    /// Throws DomainError outside [domain_begin(), domain_end()].
    double operator()(double t) const;

    double domain_begin() const;
    double domain_end() const;  ///< +inf for analytic kinds
    bool covers(double t0, double t1) const;

    /// Smallest and largest value on [t0, t1].
    std::pair<double, double> range(double t0, double t1) const;

    /// Points inside (t0, t1) where the schedule is not smooth.
    std::vector<double> breakpoints(double t0, double t1) const;

    const Kind& kind() const { return kind_; }
    bool is_constant() const { return std::holds_alternative<Constant>(kind_); }

    friend bool operator==(const Schedule&, const Schedule&) = default;

private:
    Kind kind_;
};

/// Instantaneous parameters.
struct Params {
    double gamma = 0.0;
    double nbar = 0.0;
    double omega0 = 0.0;
};

/// Mean photon number 1 / (exp(omega0 / T) - 1); 0 at T = 0.
/// Throws DomainError if omega0 <= 0 or T < 0.
double thermal_occupation(double omega0, double temperature);

/// 2 pi sum_k g_k^2 delta_w(omega0 - omega_k), with delta_w a normalized
/// Gaussian of standard deviation `width`.
double gamma_from_couplings(std::span<const double> couplings, std::span<const double> mode_freqs,
                            double omega0, double width);

class ParamSchedule {
public:
    enum class Occupation { nbar, temperature };

    ParamSchedule() = default;
    static ParamSchedule with_nbar(Schedule gamma, Schedule nbar, Schedule omega0);
    static ParamSchedule with_temperature(Schedule gamma, Schedule temperature, Schedule omega0);
    static ParamSchedule constant(double gamma, double nbar, double omega0);

    /// nbar is evaluated lazily from omega0(t) and T(t) in temperature mode.
    Params at(double t) const;

    /// Checks coverage of [0, t_max] and non-negativity of gamma, nbar / T.
    /// Throws ValidationError / DomainError.
    void validate(double t_max) const;

    /// Union of the component breakpoints inside (t0, t1), sorted, unique.
    std::vector<double> breakpoints(double t0, double t1) const;

    bool is_constant() const;

    const Schedule& gamma() const { return gamma_; }
    const Schedule& occupation() const { return occupation_; }
    const Schedule& omega0() const { return omega0_; }
    Occupation occupation_kind() const { return kind_; }

    void set_gamma(Schedule s) { gamma_ = std::move(s); }
    void set_omega0(Schedule s) { omega0_ = std::move(s); }
    void set_nbar(Schedule s) { occupation_ = std::move(s); kind_ = Occupation::nbar; }
    void set_temperature(Schedule s) { occupation_ = std::move(s); kind_ = Occupation::temperature; }

    friend bool operator==(const ParamSchedule&, const ParamSchedule&) = default;

private:
    Schedule gamma_;
    Schedule occupation_;
    Schedule omega0_;
    Occupation kind_ = Occupation::nbar;
};

}  // namespace tlsdyn
