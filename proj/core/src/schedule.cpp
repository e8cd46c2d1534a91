#include "tlsdyn/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "tlsdyn/errors.hpp"

namespace tlsdyn {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

// Queries this close to a table end are clamped onto it.
double edge_slack(double t) { return 1e-12 * std::max(1.0, std::abs(t)); }

void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw ValidationError(std::string("schedule: non-finite ") + what);
}

}  // namespace

Schedule::Schedule(Kind kind) : kind_(std::move(kind)) {
    std::visit(overloaded{
                   [](const Constant& c) { require_finite(c.value, "constant value"); },
                   [](const TableLinear& tab) {
                       if (tab.times.size() != tab.values.size())
                           throw ValidationError("schedule: table times and values differ in length");
                       if (tab.times.empty()) throw ValidationError("schedule: empty table");
                       for (std::size_t i = 0; i < tab.times.size(); ++i) {
                           require_finite(tab.times[i], "table time");
                           require_finite(tab.values[i], "table value");
                           if (i > 0 && !(tab.times[i] > tab.times[i - 1]))
                               throw ValidationError("schedule: table times must be strictly increasing");
                       }
                   },
                   [](const ExponentialApproach& e) {
                       require_finite(e.start, "exp start");
                       require_finite(e.end, "exp end");
                       require_finite(e.rate, "exp rate");
                       if (e.rate < 0.0) throw ValidationError("schedule: exp rate must be >= 0");
                   }},
               kind_);
}

double Schedule::domain_begin() const {
    if (const auto* tab = std::get_if<TableLinear>(&kind_)) return tab->times.front();
    return 0.0;
}

double Schedule::domain_end() const {
    if (const auto* tab = std::get_if<TableLinear>(&kind_)) return tab->times.back();
    return std::numeric_limits<double>::infinity();
}

bool Schedule::covers(double t0, double t1) const {
    return t0 >= domain_begin() - edge_slack(domain_begin()) && t1 <= domain_end() + edge_slack(domain_end());
}

double Schedule::operator()(double t) const {
    if (!covers(t, t)) {
        std::ostringstream os;
        os << "schedule queried at t=" << t << " outside [" << domain_begin() << ", " << domain_end() << "]";
        throw DomainError(os.str());
    }
    return std::visit(overloaded{
                          [](const Constant& c) { return c.value; },
                          [t](const TableLinear& tab) {
                              const auto& ts = tab.times;
                              if (t <= ts.front()) return tab.values.front();
                              if (t >= ts.back()) return tab.values.back();
                              const auto hi = static_cast<std::size_t>(
                                  std::upper_bound(ts.begin(), ts.end(), t) - ts.begin());
                              const std::size_t lo = hi - 1;
                              const double w = (t - ts[lo]) / (ts[hi] - ts[lo]);
                              return tab.values[lo] + w * (tab.values[hi] - tab.values[lo]);
                          },
                          [t](const ExponentialApproach& e) {
                              return e.end + (e.start - e.end) * std::exp(-e.rate * t);
                          }},
                      kind_);
}

std::pair<double, double> Schedule::range(double t0, double t1) const {
    double lo = (*this)(t0);
    double hi = lo;
    auto include = [&](double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    };
    include((*this)(t1));
    // Tables attain extrema at nodes; the other kinds are monotone.
    for (double b : breakpoints(t0, t1)) include((*this)(b));
    return {lo, hi};
}

std::vector<double> Schedule::breakpoints(double t0, double t1) const {
    std::vector<double> out;
    if (const auto* tab = std::get_if<TableLinear>(&kind_)) {
        for (double t : tab->times)
            if (t > t0 && t < t1) out.push_back(t);
    }
    return out;
}

double thermal_occupation(double omega0, double temperature) {
    if (!(omega0 > 0.0)) throw DomainError("thermal_occupation: omega0 must be > 0");
    if (temperature < 0.0) throw DomainError("thermal_occupation: temperature must be >= 0");
    if (temperature == 0.0) return 0.0;
    return 1.0 / std::expm1(omega0 / temperature);
}

double gamma_from_couplings(std::span<const double> couplings, std::span<const double> mode_freqs,
                            double omega0, double width) {
    if (couplings.size() != mode_freqs.size())
        throw ValidationError("gamma_from_couplings: couplings and mode frequencies differ in length");
    if (!(width > 0.0)) throw ValidationError("gamma_from_couplings: width must be > 0");
    const double norm = 1.0 / (width * std::sqrt(2.0 * std::numbers::pi));
    double sum = 0.0;
    for (std::size_t k = 0; k < couplings.size(); ++k) {
        const double d = (omega0 - mode_freqs[k]) / width;
        sum += couplings[k] * couplings[k] * norm * std::exp(-0.5 * d * d);
    }
    return 2.0 * std::numbers::pi * sum;
}

ParamSchedule ParamSchedule::with_nbar(Schedule gamma, Schedule nbar, Schedule omega0) {
    ParamSchedule p;
    p.gamma_ = std::move(gamma);
    p.occupation_ = std::move(nbar);
    p.omega0_ = std::move(omega0);
    p.kind_ = Occupation::nbar;
    return p;
}

ParamSchedule ParamSchedule::with_temperature(Schedule gamma, Schedule temperature, Schedule omega0) {
    ParamSchedule p = with_nbar(std::move(gamma), std::move(temperature), std::move(omega0));
    p.kind_ = Occupation::temperature;
    return p;
}

ParamSchedule ParamSchedule::constant(double gamma, double nbar, double omega0) {
    return with_nbar(Schedule::constant(gamma), Schedule::constant(nbar), Schedule::constant(omega0));
}

Params ParamSchedule::at(double t) const {
    Params p;
    p.gamma = gamma_(t);
    p.omega0 = omega0_(t);
    const double occ = occupation_(t);
    p.nbar = kind_ == Occupation::nbar ? occ : thermal_occupation(p.omega0, occ);
    return p;
}

void ParamSchedule::validate(double t_max) const {
    if (!(t_max >= 0.0) || !std::isfinite(t_max)) throw ValidationError("schedule horizon must be finite and >= 0");
    const std::pair<const Schedule*, const char*> parts[] = {
        {&gamma_, "gamma"}, {&occupation_, kind_ == Occupation::nbar ? "nbar" : "temperature"}, {&omega0_, "omega0"}};
    for (const auto& [s, name] : parts) {
        if (!s->covers(0.0, t_max)) {
            std::ostringstream os;
            os << name << " schedule does not cover [0, " << t_max << "]";
            throw DomainError(os.str());
        }
    }
    if (gamma_.range(0.0, t_max).first < 0.0) throw ValidationError("gamma schedule must be >= 0 on the horizon");
    if (occupation_.range(0.0, t_max).first < 0.0)
        throw ValidationError(std::string(kind_ == Occupation::nbar ? "nbar" : "temperature") +
                              " schedule must be >= 0 on the horizon");
    if (kind_ == Occupation::temperature && !(omega0_.range(0.0, t_max).first > 0.0))
        throw ValidationError("temperature schedules need omega0 > 0 on the horizon");
}

std::vector<double> ParamSchedule::breakpoints(double t0, double t1) const {
    std::vector<double> out;
    for (const Schedule* s : {&gamma_, &occupation_, &omega0_}) {
        const auto b = s->breakpoints(t0, t1);
        out.insert(out.end(), b.begin(), b.end());
    }
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

bool ParamSchedule::is_constant() const {
    return gamma_.is_constant() && occupation_.is_constant() && omega0_.is_constant();
}

}  // namespace tlsdyn
