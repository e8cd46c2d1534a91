#include "tlsdyn/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "tlsdyn/errors.hpp"
#include "tlsdyn/gauge.hpp"
#include "tlsdyn/multiqubit.hpp"
#include "tlsdyn/oracle.hpp"
#include "tlsdyn/rate_operator.hpp"
#include "tlsdyn/spectral.hpp"

namespace tlsdyn::cli {

namespace {

using json = nlohmann::json;

json cjson(complex z) { return json::array({z.real(), z.imag()}); }

json matrix_json(const DensityMatrix& rho) {
    json m = json::array();
    for (Spin r : {Spin::up, Spin::down}) {
        json row = json::array();
        for (Spin c : {Spin::up, Spin::down}) row.push_back(cjson(rho(r, c)));
        m.push_back(row);
    }
    return m;
}

json params_json(const Params& p) { return {{"gamma", p.gamma}, {"nbar", p.nbar}, {"omega0", p.omega0}}; }

// Largest distance from a closed-form eigenvalue to the nearest dense one.
double eigenvalue_gap(const SpectralSet& s, const oracle::EigenDecomposition& d) {
    double worst = 0.0;
    for (const auto& e : s.entries) {
        double best = INFINITY;
        for (complex v : d.values) best = std::min(best, std::abs(e.beta - v));
        worst = std::max(worst, best);
    }
    return worst;
}

// max_j |Gamma rho_j - beta_j rho_j| / |rho_j| using the direct Lindblad form.
double eigenvector_residual(const SpectralSet& s, const SuperOp& gamma) {
    double worst = 0.0;
    for (const auto& e : s.entries) {
        const Eigen::Vector4cd v = e.rho.vectorize();
        const double r = (gamma.matrix() * v - e.beta * v).cwiseAbs().maxCoeff() / v.cwiseAbs().maxCoeff();
        worst = std::max(worst, r);
    }
    return worst;
}

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;
};

void write_table(const Table& t, OutputConfig::Format format, std::ostream& out, const json* summary = nullptr) {
    if (format == OutputConfig::Format::json) {
        json doc = {{"columns", t.columns}, {"rows", t.rows}};
        if (summary) doc["summary"] = *summary;
        out << doc.dump(1) << '\n';
        return;
    }
    for (std::size_t i = 0; i < t.columns.size(); ++i) out << (i ? "," : "") << t.columns[i];
    out << '\n';
    for (const auto& row : t.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
        out << '\n';
    }
    if (summary) out << "# " << summary->dump() << '\n';
}

std::string level_string(std::size_t index, std::size_t n_qubits) {
    std::string s;
    for (std::size_t q = 0; q < n_qubits; ++q) s += ((index >> (n_qubits - 1 - q)) & 1U) ? 'm' : 'p';
    return s;
}

ProductStateExpansion register_state(const RunConfig& cfg) {
    if (const auto* r = std::get_if<RegisterState>(&cfg.initial_state)) return r->rho;
    const DensityMatrix rho = cfg.single_state();
    return ProductStateExpansion::product(std::span<const DensityMatrix>(&rho, 1));
}

enum class Command { spectrum, evolve, evolve_n, verify };

int execute(Command cmd, const RunConfig& cfg, std::ostream& out) {
    switch (cmd) {
        case Command::spectrum:
            out << spectrum_report(cfg).dump(1) << '\n';
            return kOk;
        case Command::evolve:
            write_evolve(cfg, out);
            return kOk;
        case Command::evolve_n:
            write_evolve_n(cfg, out);
            return kOk;
        case Command::verify: {
            const json v = verify_report(cfg);
            out << v.dump(1) << '\n';
            return v.at("pass").get<bool>() ? kOk : kVerificationFailure;
        }
    }
    return kOk;
}

// Runs one command, writing to `path` (or `out` when empty). Errors go to err.
int run_one(Command cmd, const RunConfig& cfg, const std::string& path, std::ostream& out, std::ostream& err) {
    try {
        if (path.empty()) return execute(cmd, cfg, out);
        std::ostringstream buf;
        const int code = execute(cmd, cfg, buf);
        std::ofstream f(path, std::ios::binary);
        if (!f) {
            err << "error: cannot write " << path << '\n';
            return kValidationFailure;
        }
        f << buf.str();
        return code;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kValidationFailure;
    }
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

json spectrum_report(const RunConfig& cfg) {
    const Params p = cfg.single_schedule().at(cfg.time);
    json r;
    r["time"] = cfg.time;
    r["params"] = params_json(p);

    const BranchPair br = diagonalization_branches(p.nbar);
    json branches = json::array();
    for (const auto& [name, b] : {std::pair{"a", br.a}, std::pair{"b", br.b}}) {
        const auto res = diagonalization_residuals(b, p.nbar);
        branches.push_back({{"name", name},
                            {"alpha_plus", cjson(b.alpha_plus)},
                            {"alpha_minus", cjson(b.alpha_minus)},
                            {"residuals", {std::abs(res[0]), std::abs(res[1])}}});
    }
    r["branches"] = branches;

    const SpectralSet s = adjoint_eigensolutions(p.gamma, p.nbar, p.omega0);
    json eig = json::array();
    for (const auto& e : s.entries) {
        eig.push_back({{"label", {value(e.label.ket), value(e.label.bra)}},
                       {"beta", cjson(e.beta)},
                       {"rho", matrix_json(e.rho)},
                       {"rho_tilde", matrix_json(e.rho_tilde)}});
    }
    r["eigen"] = eig;
    r["degenerate"] = s.degenerate;
    r["biorthogonality_defect"] = biorthogonality_defect(s);
    r["branch_residual"] = s.branch_residual;

    const SuperOp direct = lindblad_superop_direct(p);
    const auto dense = oracle::dense_eigensolve(direct);
    r["dense_check"] = {{"converged", dense.converged},
                        {"max_eigenvalue_gap", eigenvalue_gap(s, dense)},
                        {"max_eigenvector_residual", eigenvector_residual(s, direct)}};
    return r;
}

void write_evolve(const RunConfig& cfg, std::ostream& out) {
    if (cfg.is_register()) throw ConfigError("config: /initial_state: evolve needs a single-atom state; use evolve-n");
    const auto grid = cfg.grid.times();
    const Trajectory traj = propagate(cfg.single_schedule(), cfg.single_state(), grid, cfg.tol);

    Table t;
    t.columns = {"t",         "rho_pp_re",  "rho_pp_im",     "rho_pm_re",     "rho_pm_im",  "rho_mp_re",
                 "rho_mp_im", "rho_mm_re",  "rho_mm_im",     "sigma_z",       "sigma_plus_re",
                 "sigma_plus_im", "alpha_plus", "y_re", "y_im", "log_F11", "purity"};
    for (const auto& s : traj.samples) {
        const complex pp = s.rho(Spin::up, Spin::up), pm = s.rho(Spin::up, Spin::down);
        const complex mp = s.rho(Spin::down, Spin::up), mm = s.rho(Spin::down, Spin::down);
        t.rows.push_back({s.t, pp.real(), pp.imag(), pm.real(), pm.imag(), mp.real(), mp.imag(), mm.real(),
                          mm.imag(), s.obs.sigma_z, s.obs.sigma_plus.real(), s.obs.sigma_plus.imag(),
                          s.gauge.alpha_plus.real(), s.gauge.y.real(), s.gauge.y.imag(), s.gauge.log_F11,
                          purity(s.rho)});
    }
    write_table(t, cfg.output.format, out);
}

void write_evolve_n(const RunConfig& cfg, std::ostream& out) {
    const ProductStateExpansion rho0 = register_state(cfg);
    const std::size_t n = rho0.n_qubits();
    const RegisterSchedule rs = cfg.is_register() ? cfg.register_schedule()
                                                  : RegisterSchedule::shared(cfg.single_schedule(), 1);
    const auto grid = cfg.grid.times();
    const RegisterTrajectory traj = propagate_register(rs, rho0, grid, cfg.tol);
    const DecoherenceMetrics m = decoherence_metrics(traj);

    constexpr std::size_t kMaxOffDiagonal = 16;
    std::vector<std::pair<std::size_t, std::size_t>> offdiag;
    Table t;
    t.columns = {"t", "coherence_l1", "purity"};
    if (n <= kMaxDenseQubits) {
        const std::size_t d = std::size_t{1} << n;
        for (std::size_t i = 0; i < d; ++i) t.columns.push_back("rho_" + level_string(i, n) + level_string(i, n) + "_re");
        for (std::size_t i = 0; i < d && offdiag.size() < kMaxOffDiagonal; ++i)
            for (std::size_t j = i + 1; j < d && offdiag.size() < kMaxOffDiagonal; ++j)
                if (std::abs(rho0.element(i, j)) > 0.0) offdiag.emplace_back(i, j);
        for (auto [i, j] : offdiag) {
            const std::string name = "rho_" + level_string(i, n) + level_string(j, n);
            t.columns.push_back(name + "_re");
            t.columns.push_back(name + "_im");
        }
    }
    for (std::size_t k = 0; k < traj.t.size(); ++k) {
        std::vector<double> row = {traj.t[k], m.coherence_l1[k], m.purity[k]};
        if (n <= kMaxDenseQubits) {
            const std::size_t d = std::size_t{1} << n;
            for (std::size_t i = 0; i < d; ++i) row.push_back(traj.states[k].element(i, i).real());
            for (auto [i, j] : offdiag) {
                const complex z = traj.states[k].element(i, j);
                row.push_back(z.real());
                row.push_back(z.imag());
            }
        }
        t.rows.push_back(std::move(row));
    }
    const json summary = {{"tau_decoh", m.tau_decoh},
                          {"fit_degenerate", m.fit_degenerate},
                          {"fit_points", m.fit_points},
                          {"n_qubits", n}};
    write_table(t, cfg.output.format, out, &summary);
}

json verify_report(const RunConfig& cfg, const VerifyTolerances& tol) {
    const auto grid = cfg.grid.times();
    json r;
    bool pass = true;

    // Frozen-parameter spectra of every distinct schedule at a handful of times.
    std::vector<ParamSchedule> schedules;
    if (cfg.is_register()) schedules = cfg.register_schedule().distinct();
    else schedules.push_back(cfg.single_schedule());
    std::vector<double> times;
    for (int k = 0; k <= 4; ++k) times.push_back(grid[static_cast<std::size_t>(std::lround(k * (grid.size() - 1) / 4.0))]);
    times.push_back(cfg.time);

    double spec_gap = 0.0, spec_residual = 0.0;
    bool dense_ok = true;
    for (const auto& ps : schedules) {
        for (double t : times) {
            const Params p = ps.at(t);
            const SpectralSet s = physical_eigensolutions(p.gamma, p.nbar, p.omega0);
            const SuperOp direct = lindblad_superop_direct(p);
            const double scale = std::max(1.0, max_abs(direct));
            const auto dense = oracle::dense_eigensolve(direct);
            dense_ok = dense_ok && (dense.converged || s.degenerate);
            spec_gap = std::max(spec_gap, eigenvalue_gap(s, dense) / scale);
            spec_residual = std::max(spec_residual, eigenvector_residual(s, direct) / scale);
        }
    }
    const bool spec_pass = dense_ok && spec_gap < tol.spectrum && spec_residual < tol.spectrum;
    r["spectrum"] = {{"max_eigenvalue_gap", spec_gap},
                     {"max_eigenvector_residual", spec_residual},
                     {"tolerance", tol.spectrum},
                     {"pass", spec_pass}};
    pass = pass && spec_pass;

    if (!cfg.is_register()) {
        const ParamSchedule& ps = cfg.single_schedule();
        const DensityMatrix rho0 = cfg.single_state();
        const Trajectory traj = propagate(ps, rho0, grid, cfg.tol);
        const auto ref = oracle::integrate_direct(ps, rho0, grid, tol.oracle_dt);
        double gap = 0.0, phys = 0.0;
        for (std::size_t i = 0; i < grid.size(); ++i) {
            gap = std::max(gap, max_abs_diff(traj.samples[i].rho, ref.rho[i]));
            const auto d = physicality_defects(traj.samples[i].rho);
            phys = std::max({phys, d.trace_error, d.hermiticity_defect, -d.min_eigenvalue});
        }
        const bool tp = gap < tol.trajectory;
        r["trajectory"] = {{"max_deviation", gap},
                           {"tolerance", tol.trajectory},
                           {"oracle_dt", ref.dt},
                           {"oracle_steps", ref.steps},
                           {"gauge_steps", traj.stats.accepted},
                           {"max_physicality_defect", phys},
                           {"pass", tp}};
        pass = pass && tp;
    } else {
        const auto& reg = std::get<RegisterState>(cfg.initial_state).rho;
        const RegisterSchedule rs = cfg.register_schedule();
        if (reg.n_qubits() <= kMaxDenseQubits) {
            const RegisterTrajectory traj = propagate_register(rs, reg, grid, cfg.tol);
            const auto per_qubit = rs.expanded();
            const auto ref = oracle::integrate_register(per_qubit, reg.to_dense(), grid,
                                                        tol.oracle_dt / static_cast<double>(reg.n_qubits()));
            double gap = 0.0;
            for (std::size_t i = 0; i < grid.size(); ++i)
                gap = std::max(gap, (traj.states[i].to_dense() - ref[i]).cwiseAbs().maxCoeff());
            const bool rp = gap < tol.trajectory;
            r["register"] = {{"max_deviation", gap}, {"tolerance", tol.trajectory}, {"pass", rp}};
            pass = pass && rp;
        } else {
            r["register"] = {{"skipped", "dense oracle limited to " + std::to_string(kMaxDenseQubits) + " qubits"}};
        }
    }
    r["pass"] = pass;
    return r;
}

std::vector<double> Sweep::values() const {
    std::vector<double> v(count);
    for (std::size_t i = 0; i < count; ++i)
        v[i] = count == 1 ? from : from + (to - from) * static_cast<double>(i) / static_cast<double>(count - 1);
    return v;
}

Sweep parse_sweep(const std::string& text) {
    const auto eq = text.find('=');
    const auto c1 = text.find(':', eq == std::string::npos ? 0 : eq);
    const auto c2 = c1 == std::string::npos ? std::string::npos : text.find(':', c1 + 1);
    if (eq == std::string::npos || c1 == std::string::npos || c2 == std::string::npos || eq == 0)
        throw ValidationError("--sweep: expected <param>=<a>:<b>:<n>");
    Sweep s;
    s.param = text.substr(0, eq);
    try {
        std::size_t used = 0;
        const std::string a = text.substr(eq + 1, c1 - eq - 1), b = text.substr(c1 + 1, c2 - c1 - 1),
                          n = text.substr(c2 + 1);
        s.from = std::stod(a, &used);
        if (used != a.size()) throw std::invalid_argument(a);
        s.to = std::stod(b, &used);
        if (used != b.size()) throw std::invalid_argument(b);
        const long long cnt = std::stoll(n, &used);
        if (used != n.size() || cnt < 1) throw std::invalid_argument(n);
        s.count = static_cast<std::size_t>(cnt);
    } catch (const std::logic_error&) {
        throw ValidationError("--sweep: expected <param>=<a>:<b>:<n> with numbers a, b and a count n >= 1");
    }
    static const std::vector<std::string> known = {"gamma", "nbar", "temperature", "omega0", "tol", "t_max", "time"};
    if (std::find(known.begin(), known.end(), s.param) == known.end())
        throw ValidationError("--sweep: unknown parameter \"" + s.param +
                              "\" (gamma, nbar, temperature, omega0, tol, t_max, time)");
    return s;
}

RunConfig apply_sweep(const RunConfig& cfg, const std::string& param, double value) {
    RunConfig c = cfg;
    auto edit = [&](ParamSchedule& ps) {
        const Schedule v = Schedule::constant(value);
        if (param == "gamma") ps.set_gamma(v);
        else if (param == "nbar") ps.set_nbar(v);
        else if (param == "temperature") ps.set_temperature(v);
        else if (param == "omega0") ps.set_omega0(v);
    };
    if (param == "tol") {
        if (!(value > 0.0 && value <= 1e-2)) throw ValidationError("--sweep: tol must lie in (0, 1e-2]");
        c.tol = value;
    } else if (param == "t_max") {
        if (!(value > 0.0)) throw ValidationError("--sweep: t_max must be > 0");
        c.grid.t_max = value;
    } else if (param == "time") {
        if (value < 0.0) throw ValidationError("--sweep: time must be >= 0");
        c.time = value;
    } else {
        if (c.schedule) edit(*c.schedule);
        for (auto& ps : c.schedules) edit(ps);
    }
    const double horizon = std::max(c.grid.t_max, c.time);
    if (c.schedule) c.schedule->validate(horizon);
    for (const auto& ps : c.schedules) ps.validate(horizon);
    return c;
}

std::string indexed_path(const std::string& path, std::size_t i) {
    const std::filesystem::path p(path);
    std::filesystem::path out = p.parent_path() / (p.stem().string() + "_" + std::to_string(i) + p.extension().string());
    return out.string();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"tlsdyn: dissipative two-level atom dynamics"};
    app.require_subcommand(1);
    struct Options {
        std::string config, out, sweep;
    } opt;
    const std::vector<std::pair<std::string, Command>> commands = {
        {"spectrum", Command::spectrum},
        {"evolve", Command::evolve},
        {"evolve-n", Command::evolve_n},
        {"verify", Command::verify}};
    const std::vector<std::string> help = {
        "Frozen-parameter spectrum and damping basis (JSON)",
        "Single-atom time series (CSV or JSON)",
        "Register decoherence time series with fitted decoherence time",
        "Compare against the brute-force reference integrator (JSON verdict)"};
    std::vector<CLI::App*> subs;
    for (std::size_t i = 0; i < commands.size(); ++i) {
        CLI::App* sub = app.add_subcommand(commands[i].first, help[i]);
        sub->add_option("--config", opt.config, "Run config (JSON)")->required();
        sub->add_option("--out", opt.out, "Output file (default: config output.path, else stdout)");
        sub->add_option("--sweep", opt.sweep, "Parameter sweep <param>=<a>:<b>:<n>");
        subs.push_back(sub);
    }

    std::vector<std::string> rev(args.rbegin(), args.rend());
    try {
        app.parse(rev);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kValidationFailure;
    }

    Command cmd = Command::spectrum;
    for (std::size_t i = 0; i < subs.size(); ++i)
        if (subs[i]->parsed()) cmd = commands[i].second;

    RunConfig cfg;
    std::optional<Sweep> sweep;
    try {
        cfg = load_config(opt.config);
        if (!opt.sweep.empty()) sweep = parse_sweep(opt.sweep);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kValidationFailure;
    }
    const std::string path = opt.out.empty() ? cfg.output.path : opt.out;

    if (!sweep) return run_one(cmd, cfg, path, out, err);

    if (path.empty()) {
        err << "error: --sweep needs an output path (--out or output.path)\n";
        return kValidationFailure;
    }
    const auto values = sweep->values();
    std::vector<int> codes(values.size(), kOk);
    std::vector<std::string> messages(values.size());
    std::size_t next = 0;
    std::mutex mu;
    auto worker = [&] {
        for (;;) {
            std::size_t i;
            {
                std::lock_guard lock(mu);
                if (next >= values.size()) return;
                i = next++;
            }
            std::ostringstream e, o;
            try {
                const RunConfig c = apply_sweep(cfg, sweep->param, values[i]);
                codes[i] = run_one(cmd, c, indexed_path(path, i), o, e);
            } catch (const ValidationError& ex) {
                e << "error: " << ex.what() << '\n';
                codes[i] = kValidationFailure;
            }
            messages[i] = e.str();
        }
    };
    const std::size_t n_threads =
        std::min<std::size_t>(values.size(), std::max(1U, std::thread::hardware_concurrency()));
    std::vector<std::thread> pool;
    for (std::size_t k = 0; k < n_threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();

    int code = kOk;
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (!messages[i].empty()) err << "run " << i << " (" << sweep->param << "=" << format_double(values[i]) << "): " << messages[i];
        code = std::max(code, codes[i]);
    }
    return code;
}

}  // namespace tlsdyn::cli
