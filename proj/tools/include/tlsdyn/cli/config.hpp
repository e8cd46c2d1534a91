#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "json.hpp"

#include "tlsdyn/errors.hpp"
#include "tlsdyn/multiqubit.hpp"
#include "tlsdyn/schedule.hpp"
#include "tlsdyn/superalgebra.hpp"

namespace tlsdyn::cli {

/// Config problem, already formatted with the line (when known) and the
/// JSON pointer of the offending value.
class ConfigError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

struct PureState {
    complex mu;
    complex nu;
};

struct MatrixState {
    DensityMatrix rho;
};

struct RegisterState {
    ProductStateExpansion rho{1};
};

using InitialState = std::variant<PureState, MatrixState, RegisterState>;

struct GridConfig {
    double t_max = 1.0;
    std::size_t n_samples = 2;
    /// n_samples equally spaced times from 0 to t_max inclusive.
    std::vector<double> times() const;
};

struct OutputConfig {
    enum class Format { csv, json };
    std::string path;
    Format format = Format::csv;
};

struct RunConfig {
    /// Shared schedule; for registers, used by every qubit unless `schedules` is set.
    std::optional<ParamSchedule> schedule;
    std::vector<ParamSchedule> schedules;  ///< per-qubit schedules
    InitialState initial_state = PureState{complex(1.0), complex(0.0)};
    GridConfig grid;
    double tol = 1e-10;
    std::uint64_t seed = 0;
    double time = 0.0;  ///< query time for the frozen-parameter spectrum
    OutputConfig output;

    bool is_register() const { return std::holds_alternative<RegisterState>(initial_state); }
    std::size_t n_qubits() const;
    /// Single-atom schedule: `schedule`, or the first per-qubit schedule.
    const ParamSchedule& single_schedule() const;
    RegisterSchedule register_schedule() const;
    /// rho(0) for single-atom runs; throws ConfigError for register configs.
    DensityMatrix single_state() const;
};

/// Schedule object per the schedule file format:
/// {"gamma": S, "omega0": S, "nbar" | "temperature": S} with
/// S = {"kind":"constant","value":x} | {"kind":"table","times":[..],"values":[..]}
///   | {"kind":"exp","start":x,"end":y,"rate":r}.
ParamSchedule parse_param_schedule(const nlohmann::json& j, const std::string& pointer = "");
Schedule parse_schedule(const nlohmann::json& j, const std::string& pointer = "");

/// Parses and validates a run config. Throws ConfigError.
RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::string& path);

}  // namespace tlsdyn::cli
