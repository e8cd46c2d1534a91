#include "tlsdyn/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace tlsdyn::cli {

namespace {

using json = nlohmann::json;

// A config error tied to a JSON pointer; parse_config turns the pointer
// into a line number.
class FieldError : public ConfigError {
public:
    FieldError(std::string pointer, const std::string& msg)
        : ConfigError(pointer + ": " + msg), pointer_(std::move(pointer)) {}
    const std::string& pointer() const { return pointer_; }

private:
    std::string pointer_;
};

[[noreturn]] void fail(const std::string& pointer, const std::string& msg) {
    throw FieldError(pointer.empty() ? "/" : pointer, msg);
}

const json& require(const json& obj, const char* key, const std::string& pointer) {
    if (!obj.is_object()) fail(pointer, "expected an object");
    const auto it = obj.find(key);
    if (it == obj.end()) fail(pointer, std::string("missing key \"") + key + "\"");
    return *it;
}

double number(const json& j, const std::string& pointer) {
    if (!j.is_number()) fail(pointer, "expected a number");
    const double v = j.get<double>();
    if (!std::isfinite(v)) fail(pointer, "expected a finite number");
    return v;
}

std::vector<double> number_array(const json& j, const std::string& pointer) {
    if (!j.is_array()) fail(pointer, "expected an array of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], pointer + "/" + std::to_string(i)));
    return out;
}

complex complex_value(const json& j, const std::string& pointer) {
    if (j.is_number()) return {number(j, pointer), 0.0};
    if (j.is_array() && j.size() == 2) return {number(j[0], pointer + "/0"), number(j[1], pointer + "/1")};
    if (j.is_object() && j.contains("re"))
        return {number(j["re"], pointer + "/re"), j.contains("im") ? number(j["im"], pointer + "/im") : 0.0};
    fail(pointer, "expected a complex number: x, [re, im] or {\"re\": x, \"im\": y}");
}

void reject_unknown(const json& obj, std::initializer_list<const char*> allowed, const std::string& pointer) {
    for (const auto& [key, _] : obj.items()) {
        if (std::none_of(allowed.begin(), allowed.end(), [&](const char* a) { return key == a; }))
            fail(pointer + "/" + key, "unknown key");
    }
}

Spin spin_value(const json& j, const std::string& pointer) {
    if (!j.is_number_integer()) fail(pointer, "expected +1 or -1");
    const int v = j.get<int>();
    if (v == 1) return Spin::up;
    if (v == -1) return Spin::down;
    fail(pointer, "expected +1 or -1");
}

std::size_t locate_line(std::string_view text, const std::string& pointer) {
    std::size_t pos = 0;
    bool found_any = false;
    std::stringstream ss(pointer);
    std::string token;
    while (std::getline(ss, token, '/')) {
        if (token.empty() || std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; }))
            continue;
        const auto at = text.find("\"" + token + "\"", pos);
        if (at == std::string_view::npos) break;
        pos = at;
        found_any = true;
    }
    if (!found_any) return 0;
    return static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(pos), '\n')) +
           1;
}

InitialState parse_initial_state(const json& j, const std::string& pointer) {
    if (!j.is_object() || j.size() != 1)
        fail(pointer, "expected exactly one of \"pure\", \"matrix\" or \"register\"");
    if (j.contains("pure")) {
        const std::string p = pointer + "/pure";
        const json& pure = j["pure"];
        reject_unknown(pure, {"mu", "nu"}, p);
        PureState s{complex_value(require(pure, "mu", p), p + "/mu"), complex_value(require(pure, "nu", p), p + "/nu")};
        if (std::abs(std::norm(s.mu) + std::norm(s.nu) - 1.0) > 1e-12) fail(p, "|mu|^2 + |nu|^2 must equal 1");
        return s;
    }
    if (j.contains("matrix")) {
        const std::string p = pointer + "/matrix";
        const json& m = j["matrix"];
        if (!m.is_array() || m.size() != 2) fail(p, "expected a 2x2 array of complex entries");
        DensityMatrix rho;
        for (int r = 0; r < 2; ++r) {
            const std::string pr = p + "/" + std::to_string(r);
            if (!m[r].is_array() || m[r].size() != 2) fail(pr, "expected a row of two complex entries");
            for (int c = 0; c < 2; ++c)
                rho.matrix()(r, c) = complex_value(m[r][c], pr + "/" + std::to_string(c));
        }
        if (!is_physical(rho, 1e-9)) fail(p, "not a density matrix (trace 1, Hermitian, positive)");
        return MatrixState{rho};
    }
    if (j.contains("register")) {
        const std::string p = pointer + "/register";
        const json& r = j["register"];
        if (!r.is_object()) fail(p, "expected an object");
        RegisterState s;
        if (r.contains("terms")) {
            reject_unknown(r, {"n_qubits", "terms"}, p);
            const json& nq = require(r, "n_qubits", p);
            if (!nq.is_number_unsigned() || nq.get<std::size_t>() == 0) fail(p + "/n_qubits", "expected a positive integer");
            const std::size_t n = nq.get<std::size_t>();
            s.rho = ProductStateExpansion(n);
            const json& terms = r["terms"];
            if (!terms.is_array() || terms.empty()) fail(p + "/terms", "expected a non-empty array");
            for (std::size_t i = 0; i < terms.size(); ++i) {
                const std::string pt = p + "/terms/" + std::to_string(i);
                reject_unknown(terms[i], {"coefficient", "factors"}, pt);
                const complex c = complex_value(require(terms[i], "coefficient", pt), pt + "/coefficient");
                const json& fs = require(terms[i], "factors", pt);
                if (!fs.is_array() || fs.size() != n) fail(pt + "/factors", "expected one [s, s'] pair per qubit");
                std::vector<Label> labels;
                for (std::size_t k = 0; k < n; ++k) {
                    const std::string pf = pt + "/factors/" + std::to_string(k);
                    if (!fs[k].is_array() || fs[k].size() != 2) fail(pf, "expected [s, s']");
                    labels.push_back({spin_value(fs[k][0], pf + "/0"), spin_value(fs[k][1], pf + "/1")});
                }
                s.rho.add(c, labels);
            }
        } else {
            reject_unknown(r, {"alpha", "beta"}, p);
            const complex a = complex_value(require(r, "alpha", p), p + "/alpha");
            const complex b = complex_value(require(r, "beta", p), p + "/beta");
            if (std::abs(std::norm(a) + std::norm(b) - 1.0) > 1e-12) fail(p, "|alpha|^2 + |beta|^2 must equal 1");
            s.rho = entangled_pair(a, b);
        }
        if (!is_physical(s.rho, 1e-9)) fail(p, "register state is not a density matrix");
        return s;
    }
    fail(pointer, "expected exactly one of \"pure\", \"matrix\" or \"register\"");
}

}  // namespace

std::vector<double> GridConfig::times() const {
    std::vector<double> ts(n_samples);
    for (std::size_t i = 0; i < n_samples; ++i)
        ts[i] = t_max * static_cast<double>(i) / static_cast<double>(n_samples - 1);
    ts.back() = t_max;
    return ts;
}

std::size_t RunConfig::n_qubits() const {
    if (const auto* r = std::get_if<RegisterState>(&initial_state)) return r->rho.n_qubits();
    return 1;
}

const ParamSchedule& RunConfig::single_schedule() const {
    if (schedule) return *schedule;
    if (schedules.empty()) throw ConfigError("config: no schedule");
    return schedules.front();
}

RegisterSchedule RunConfig::register_schedule() const {
    if (!schedules.empty()) return RegisterSchedule::per_qubit(schedules);
    return RegisterSchedule::shared(single_schedule(), n_qubits());
}

DensityMatrix RunConfig::single_state() const {
    if (const auto* p = std::get_if<PureState>(&initial_state)) return DensityMatrix::pure(p->mu, p->nu);
    if (const auto* m = std::get_if<MatrixState>(&initial_state)) return m->rho;
    throw ConfigError("config: /initial_state: a single-atom state (pure or matrix) is required");
}

Schedule parse_schedule(const json& j, const std::string& pointer) {
    const json& kind = require(j, "kind", pointer);
    if (!kind.is_string()) fail(pointer + "/kind", "expected \"constant\", \"table\" or \"exp\"");
    const auto k = kind.get<std::string>();
    try {
        if (k == "constant") {
            reject_unknown(j, {"kind", "value"}, pointer);
            return Schedule(Constant{number(require(j, "value", pointer), pointer + "/value")});
        }
        if (k == "table") {
            reject_unknown(j, {"kind", "times", "values"}, pointer);
            return Schedule(TableLinear{number_array(require(j, "times", pointer), pointer + "/times"),
                                        number_array(require(j, "values", pointer), pointer + "/values")});
        }
        if (k == "exp") {
            reject_unknown(j, {"kind", "start", "end", "rate"}, pointer);
            return Schedule(ExponentialApproach{number(require(j, "start", pointer), pointer + "/start"),
                                                number(require(j, "end", pointer), pointer + "/end"),
                                                number(require(j, "rate", pointer), pointer + "/rate")});
        }
    } catch (const FieldError&) {
        throw;
    } catch (const ValidationError& e) {
        fail(pointer, e.what());
    }
    fail(pointer + "/kind", "expected \"constant\", \"table\" or \"exp\"");
}

ParamSchedule parse_param_schedule(const json& j, const std::string& pointer) {
    if (!j.is_object()) fail(pointer, "expected a schedule object");
    reject_unknown(j, {"gamma", "omega0", "nbar", "temperature"}, pointer);
    const bool has_nbar = j.contains("nbar");
    const bool has_temp = j.contains("temperature");
    if (has_nbar == has_temp) fail(pointer, "exactly one of \"nbar\" or \"temperature\" is required");
    Schedule gamma = parse_schedule(require(j, "gamma", pointer), pointer + "/gamma");
    Schedule omega0 = parse_schedule(require(j, "omega0", pointer), pointer + "/omega0");
    if (has_nbar) return ParamSchedule::with_nbar(gamma, parse_schedule(j["nbar"], pointer + "/nbar"), omega0);
    return ParamSchedule::with_temperature(gamma, parse_schedule(j["temperature"], pointer + "/temperature"), omega0);
}

RunConfig parse_config(std::string_view text) {
    json root;
    try {
        root = json::parse(text.begin(), text.end());
    } catch (const json::parse_error& e) {
        const auto upto = std::min<std::size_t>(e.byte, text.size());
        const auto line = std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(upto), '\n') + 1;
        std::ostringstream os;
        os << "config: line " << line << ": malformed JSON: " << e.what();
        throw ConfigError(os.str());
    }

    try {
        if (!root.is_object()) fail("", "top level must be an object");
        reject_unknown(root, {"schedule", "schedules", "initial_state", "grid", "tol", "seed", "time", "output"}, "");

        RunConfig cfg;
        if (root.contains("grid")) {
            const json& g = root["grid"];
            reject_unknown(g, {"t_max", "n_samples"}, "/grid");
            cfg.grid.t_max = number(require(g, "t_max", "/grid"), "/grid/t_max");
            const json& ns = require(g, "n_samples", "/grid");
            if (!ns.is_number_unsigned()) fail("/grid/n_samples", "expected an integer >= 2");
            cfg.grid.n_samples = ns.get<std::size_t>();
        } else {
            fail("", "missing key \"grid\"");
        }
        if (!(cfg.grid.t_max > 0.0)) fail("/grid/t_max", "must be > 0");
        if (cfg.grid.n_samples < 2) fail("/grid/n_samples", "must be >= 2");

        if (root.contains("tol")) cfg.tol = number(root["tol"], "/tol");
        if (!(cfg.tol > 0.0 && cfg.tol <= 1e-2)) fail("/tol", "must lie in (0, 1e-2]");
        if (root.contains("seed")) {
            if (!root["seed"].is_number_unsigned()) fail("/seed", "expected a non-negative integer");
            cfg.seed = root["seed"].get<std::uint64_t>();
        }
        if (root.contains("time")) {
            cfg.time = number(root["time"], "/time");
            if (cfg.time < 0.0) fail("/time", "must be >= 0");
        }
        if (root.contains("output")) {
            const json& o = root["output"];
            reject_unknown(o, {"path", "format"}, "/output");
            if (o.contains("path")) {
                if (!o["path"].is_string()) fail("/output/path", "expected a string");
                cfg.output.path = o["path"].get<std::string>();
            }
            if (o.contains("format")) {
                const auto f = o["format"].is_string() ? o["format"].get<std::string>() : std::string();
                if (f == "csv") cfg.output.format = OutputConfig::Format::csv;
                else if (f == "json") cfg.output.format = OutputConfig::Format::json;
                else fail("/output/format", "expected \"csv\" or \"json\"");
            }
        }

        cfg.initial_state = parse_initial_state(require(root, "initial_state", ""), "/initial_state");

        const double horizon = std::max(cfg.grid.t_max, cfg.time);
        auto checked = [&](const json& j, const std::string& p) {
            ParamSchedule s = parse_param_schedule(j, p);
            try {
                s.validate(horizon);
            } catch (const ValidationError& e) {
                fail(p, e.what());
            }
            return s;
        };
        if (root.contains("schedule")) cfg.schedule = checked(root["schedule"], "/schedule");
        if (root.contains("schedules")) {
            const json& ss = root["schedules"];
            if (!ss.is_array()) fail("/schedules", "expected an array of schedules");
            for (std::size_t i = 0; i < ss.size(); ++i)
                cfg.schedules.push_back(checked(ss[i], "/schedules/" + std::to_string(i)));
            if (cfg.schedules.size() != cfg.n_qubits())
                fail("/schedules", "expected one schedule per qubit (" + std::to_string(cfg.n_qubits()) + ")");
        }
        if (!cfg.schedule && cfg.schedules.empty()) fail("", "missing key \"schedule\"");
        return cfg;
    } catch (const FieldError& e) {
        std::ostringstream os;
        os << "config: ";
        if (const auto line = locate_line(text, e.pointer()); line > 0) os << "line " << line << ": ";
        os << e.what();
        throw ConfigError(os.str());
    }
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("config: cannot open " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

}  // namespace tlsdyn::cli
