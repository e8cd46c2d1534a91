#pragma once

#include <cstddef>
#include <ostream>
#include <string>
#include <vector>

#include "json.hpp"

#include "tlsdyn/cli/config.hpp"

namespace tlsdyn::cli {

enum ExitCode : int { kOk = 0, kValidationFailure = 1, kNumericalFailure = 2, kVerificationFailure = 3 };

/// 17 significant digits, round-trip exact.
std::string format_double(double v);

nlohmann::json spectrum_report(const RunConfig& cfg);

/// CSV (or JSON, per cfg.output.format) time series of the single-atom run.
void write_evolve(const RunConfig& cfg, std::ostream& out);

/// Register time series: coherence, purity and selected matrix elements,
/// followed by a "# {...}" summary line with the fitted decoherence time.
void write_evolve_n(const RunConfig& cfg, std::ostream& out);

struct VerifyTolerances {
    double trajectory = 1e-6;
    double spectrum = 1e-11;
    double oracle_dt = 2e-3;
};

nlohmann::json verify_report(const RunConfig& cfg, const VerifyTolerances& tol = {});

/// --sweep <param>=<a>:<b>:<n>
struct Sweep {
    std::string param;
    double from = 0.0;
    double to = 0.0;
    std::size_t count = 1;
    std::vector<double> values() const;
};

Sweep parse_sweep(const std::string& text);

/// Copy of cfg with `param` set to `value`. Schedule parameters become
/// constants on every schedule; "tol", "t_max" and "time" set the scalar.
RunConfig apply_sweep(const RunConfig& cfg, const std::string& param, double value);

/// path with "_<i>" inserted before the extension.
std::string indexed_path(const std::string& path, std::size_t i);

/// Entry point; args exclude the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tlsdyn::cli
