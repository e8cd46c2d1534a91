#pragma once

#include <stdexcept>
#include <string>

namespace tlsdyn {

/// Bad input: malformed schedules, non-physical states, inconsistent sizes.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A schedule was queried outside the interval it covers.
class DomainError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

/// Integrator or eigen-solver breakdown. Carries the time of failure when
/// one is meaningful.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double time)
        : std::runtime_error(what), time_(time) {}
    explicit NumericalError(const std::string& what)
        : std::runtime_error(what), time_(0.0) {}
    double time() const { return time_; }

private:
    double time_;
};

}  // namespace tlsdyn
