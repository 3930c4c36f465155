#include "flexbeam/commands.hpp"

#include "flexbeam/control_cert.hpp"
#include "flexbeam/error.hpp"
#include "flexbeam/modal_dynamics.hpp"
#include "flexbeam/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>

namespace flexbeam {

namespace {

class Formatter {
public:
    explicit Formatter(int precision) : precision_(precision) {}
    std::string operator()(double v) const {
        if (std::isnan(v)) return "nan";
        if (v == 0.0) v = 0.0;  // no "-0"
        char buf[40];
        std::snprintf(buf, sizeof buf, "%.*g", precision_, v);
        return buf;
    }

private:
    int precision_;
};

// key = value lines; insertion order is preserved.
class Summary {
public:
    void add(const std::string& key, const std::string& value) { text_ += key + " = " + value + "\n"; }
    void add(const std::string& key, long long value) { add(key, std::to_string(value)); }
    void add(const std::string& key, std::size_t value) { add(key, std::to_string(value)); }
    void add(const std::string& key, int value) { add(key, std::to_string(value)); }
    void add_list(const std::string& key, const std::vector<std::string>& items) {
        for (std::size_t i = 0; i < items.size(); ++i) add(key + "." + std::to_string(i + 1), items[i]);
    }
    const std::string& text() const { return text_; }

private:
    std::string text_;
};

std::string join(const std::vector<std::string>& items, const char* sep = ",") {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) out += (i ? sep : "") + items[i];
    return out;
}

class Context {
public:
    Context(std::string command, const RunConfig& cfg)
        : command_(std::move(command)), cfg_(cfg), fmt_(cfg.output.precision), hash_(config_hash(cfg)) {}

    const RunConfig& cfg() const { return cfg_; }
    const Formatter& fmt() const { return fmt_; }
    const std::string& hash() const { return hash_; }
    const std::string& command() const { return command_; }

    std::string header(const std::string& what, const std::vector<std::string>& notes = {}) const {
        std::string h = "# flexbeam " + command_ + ": " + what + "\n";
        h += std::string("# version = ") + kVersion + "\n";
        h += "# config_hash = " + hash_ + "\n";
        for (const auto& n : notes) h += "# " + n + "\n";
        return h;
    }

    void write(const std::string& name, const std::string& contents) {
        namespace fs = std::filesystem;
        const fs::path dir(cfg_.output.directory);
        std::error_code ec;
        fs::create_directories(dir, ec);
        require(!ec, ErrorCode::Io, "cannot create output directory '" + dir.string() + "': " + ec.message());
        const fs::path path = dir / name;
        std::ofstream out(path, std::ios::binary | std::ios::trunc);
        require(static_cast<bool>(out), ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
        out << contents;
        out.close();
        require(!out.fail(), ErrorCode::Io, "write to '" + path.string() + "' failed");
        files_.push_back(path.string());
    }

    CommandResult finish(Summary& s, int exit_code) {
        CommandResult r;
        r.exit_code = exit_code;
        s.add("exit_code", exit_code);
        r.summary = header("summary") + s.text();
        write(command_ + "_summary.txt", r.summary);
        r.files = files_;
        return r;
    }

private:
    std::string command_;
    const RunConfig& cfg_;
    Formatter fmt_;
    std::string hash_;
    std::vector<std::string> files_;
};

BasisOptions basis_options(const RunConfig& cfg, int n_modes) {
    BasisOptions o;
    o.mu_max = cfg.spectral.mu_max;
    o.grid_step = cfg.spectral.grid_step;
    o.n_modes = n_modes;
    o.root_tol = cfg.spectral.root_tol;
    o.quad_order = cfg.spectral.quad_order;
    return o;
}

ModalBasis basis_for(const RunConfig& cfg) {
    return build_basis(cfg.system, basis_options(cfg, cfg.spectral.n_modes));
}

void add_warnings(Summary& s, const std::vector<std::string>& warnings) { s.add_list("warning", warnings); }

// Returns the number of retained modes, warning if the basis came up short.
int usable_modes(const RunConfig& cfg, const ModalBasis& basis, Summary& s) {
    const int n = std::min<int>(cfg.spectral.n_modes, static_cast<int>(basis.size()));
    s.add("n_modes_requested", cfg.spectral.n_modes);
    s.add("n_modes", n);
    require(n >= 1, ErrorCode::Numerical, "no usable modes below mu_max");
    return n;
}

// ---------------------------------------------------------------------------

CommandResult cmd_validate(Context& ctx, const ValidationReport& rep) {
    Summary s;
    s.add("command", ctx.command());
    s.add("config_hash", ctx.hash());
    s.add("valid", std::string(rep.valid() ? "true" : "false"));
    s.add("violations", rep.violations.size());
    std::vector<std::string> items;
    for (const auto& v : rep.violations) items.push_back(v.key + ": " + v.message);
    s.add_list("violation", items);
    return ctx.finish(s, rep.valid() ? ExitOk : ExitConstraint);
}

CommandResult cmd_spectrum(Context& ctx) {
    const RunConfig& cfg = ctx.cfg();
    const BeamSystem& sys = cfg.system;
    const Formatter& f = ctx.fmt();
    Summary s;
    s.add("command", std::string("spectrum"));
    s.add("config_hash", ctx.hash());

    const ModalBasis basis = basis_for(cfg);
    const double pi = std::numbers::pi;
    const double mu_lo = 1e-3 * pi / sys.l;
    const double mu_hi = basis.mu_max;
    const double step = cfg.spectral.grid_step > 0.0 ? cfg.spectral.grid_step : pi / (10.0 * sys.l);
    RootScanOptions ro;
    ro.multiple_root_tol = cfg.spectral.root_tol;

    RootScan truncated, full;
    if (mu_hi > mu_lo) {
        truncated = find_roots([&](double mu) { return phi0(mu, sys.l, sys.l0); }, mu_lo, mu_hi, step, ro);
        full = find_roots([&](double mu) { return phi_full(mu, sys); }, mu_lo, mu_hi, step, ro);
    }
    const auto& p0 = truncated.roots;
    const auto& pf = full.roots;

    std::string csv = ctx.header("roots of the truncated (phi0) and full frequency equations",
                                 {"gap = |mu_full - nearest mu_phi0|", "scan = [" + f(mu_lo) + ", " + f(mu_hi) +
                                                                           "], grid_step = " + f(step)});
    csv += "j,mu_phi0,mu_full,gap\n";
    const std::size_t rows = std::max(p0.size(), pf.size());
    for (std::size_t j = 0; j < rows; ++j) {
        csv += std::to_string(j + 1) + ",";
        csv += (j < p0.size() ? f(p0[j]) : "") + ",";
        csv += (j < pf.size() ? f(pf[j]) : "") + ",";
        if (j < pf.size() && !p0.empty()) {
            const auto it = std::lower_bound(p0.begin(), p0.end(), pf[j]);
            double gap = std::numeric_limits<double>::infinity();
            if (it != p0.end()) gap = *it - pf[j];
            if (it != p0.begin()) gap = std::min(gap, pf[j] - *(it - 1));
            csv += f(gap);
        }
        csv += "\n";
    }
    ctx.write("spectrum.csv", csv);

    s.add("mu_min", f(mu_lo));
    s.add("mu_max", f(mu_hi));
    s.add("phi0_roots", p0.size());
    s.add("full_roots", pf.size());
    if (rows == 0) s.add("notice", std::string("no roots below mu_max; table is empty"));
    if (pf.size() >= 10) {
        const GrowthFit g = fit_linear_growth(pf);
        s.add("growth_fit.slope", f(g.slope));
        s.add("growth_fit.intercept", f(g.intercept));
        s.add("growth_fit.relative_residual", f(g.relative_residual));
        s.add("growth_fit.count", g.count);
    } else {
        s.add("growth_fit", std::string("skipped (fewer than 10 full roots)"));
    }
    if (cfg.spectral.p1 > 0 && cfg.spectral.p2 > 0) {
        try {
            const double P = period_phi0(sys.l, sys.l0, cfg.spectral.p1, cfg.spectral.p2);
            // count over one full period, offset away from the structural root at 0
            const double a = 0.5 * P + 0.0123 * P;
            const RootScan one = find_roots([&](double mu) { return phi0(mu, sys.l, sys.l0); }, a, a + P,
                                            std::min(step, P / 200.0), ro);
            s.add("period", f(P));
            s.add("roots_per_period", one.roots.size());
        } catch (const Error& e) {
            s.add("period", std::string("unavailable: ") + e.what());
        }
    }
    std::vector<std::string> warnings = truncated.warnings;
    for (auto& w : warnings) w = "phi0: " + w;
    for (const auto& w : full.warnings) warnings.push_back("full: " + w);
    add_warnings(s, warnings);
    return ctx.finish(s, ExitOk);
}

CommandResult cmd_modes(Context& ctx) {
    const RunConfig& cfg = ctx.cfg();
    const Formatter& f = ctx.fmt();
    Summary s;
    s.add("command", std::string("modes"));
    s.add("config_hash", ctx.hash());
    const ModalBasis basis = basis_for(cfg);
    const int n = usable_modes(cfg, basis, s);

    std::string csv = ctx.header("mass-normalized mode shapes",
                                 {"u(x) = a1 sin(mu x) + a2 sinh(mu x) on [0,l0]",
                                  "u(x) = a3 sin(mu (l-x)) + a4 sinh(mu (l-x)) on [l0,l]"});
    csv += "j,mu,omega,phi_l0,a1,a2,a3,a4\n";
    for (int j = 0; j < n; ++j) {
        const ModeShape& m = basis.modes[static_cast<std::size_t>(j)];
        const auto a = m.coeffs();
        csv += std::to_string(j + 1) + "," + f(m.mu()) + "," + f(m.omega()) + "," + f(m.at_l0()) + "," + f(a[0]) +
               "," + f(a[1]) + "," + f(a[2]) + "," + f(a[3]) + "\n";
    }
    ctx.write("modes.csv", csv);
    s.add("mu_max", f(basis.mu_max));
    s.add("orthogonality_error", f(orthogonality_error(basis, static_cast<std::size_t>(n))));
    std::vector<std::string> excluded;
    for (double r : basis.excluded_roots) excluded.push_back(f(r));
    s.add("excluded_roots", join(excluded));
    add_warnings(s, basis.warnings);
    return ctx.finish(s, ExitOk);
}

CommandResult cmd_certify(Context& ctx) {
    const RunConfig& cfg = ctx.cfg();
    const Formatter& f = ctx.fmt();
    Summary s;
    s.add("command", std::string("certify"));
    s.add("config_hash", ctx.hash());
    const ModalBasis basis = basis_for(cfg);
    const int n = usable_modes(cfg, basis, s);
    const ClosedLoopSystem sys = assemble(basis, cfg.actuators, cfg.system.alpha0, n);
    const CertificationReport rep = certify_placement(sys, basis);
    const SpectrumReport spec = spectral_abscissa(sys);

    std::string csv = ctx.header("per-mode coupling", {"controllable = 1 if some channel with positive gain couples"});
    csv += "j,omega,c_j";
    for (int a = 0; a < sys.k; ++a) csv += ",B_j" + std::to_string(a + 1);
    csv += ",controllable\n";
    for (const ModeCoupling& m : rep.modes) {
        csv += std::to_string(m.j) + "," + f(m.omega) + "," + f(m.c);
        for (double b : m.B) csv += "," + f(b);
        csv += std::string(",") + (m.controllable ? "1" : "0") + "\n";
    }
    ctx.write("certify.csv", csv);

    std::string eig = ctx.header("closed-loop eigenvalues of the truncated model");
    eig += "re,im\n";
    for (const auto& z : spec.eigenvalues) eig += f(z.real()) + "," + f(z.imag()) + "\n";
    ctx.write("eigenvalues.csv", eig);

    s.add("verdict", std::string(to_string(rep.verdict)));
    s.add("abscissa", f(spec.abscissa));
    std::vector<std::string> unc;
    for (int j : rep.uncoupled) unc.push_back(std::to_string(j));
    s.add("uncoupled_modes", join(unc));
    s.add("tol_c", f(rep.tol_c));
    s.add("tol_b", f(rep.tol_b));
    s.add("frequency_tol", f(rep.frequency_tol));
    s.add("scope", "first " + std::to_string(n) + " modes only");
    s.add_list("indeterminate_reason", rep.indeterminate_reasons);
    add_warnings(s, basis.warnings);
    const int code = rep.verdict == Verdict::Certified        ? ExitOk
                     : rep.verdict == Verdict::Uncontrollable ? ExitUncontrollable
                                                              : ExitIndeterminate;
    return ctx.finish(s, code);
}

CommandResult cmd_simulate(Context& ctx) {
    const RunConfig& cfg = ctx.cfg();
    const Formatter& f = ctx.fmt();
    Summary s;
    s.add("command", std::string("simulate"));
    s.add("config_hash", ctx.hash());
    const ModalBasis basis = basis_for(cfg);
    const int n = usable_modes(cfg, basis, s);
    const ClosedLoopSystem sys = assemble(basis, cfg.actuators, cfg.system.alpha0, n);

    ModalState x0 = ModalState::zero(n);
    if (cfg.sim.initial_profile == "first_mode_displacement") {
        x0.q(0) = 1.0;
    } else {
        for (std::size_t i = 0; i < cfg.sim.q0.size() && i < static_cast<std::size_t>(n); ++i)
            x0.q(static_cast<Eigen::Index>(i)) = cfg.sim.q0[i];
    }
    for (std::size_t i = 0; i < cfg.sim.qdot0.size() && i < static_cast<std::size_t>(n); ++i)
        x0.qdot(static_cast<Eigen::Index>(i)) = cfg.sim.qdot0[i];

    const Trajectory tr = simulate(sys, x0, cfg.sim.t_end, cfg.sim.dt, cfg.sim.sample_every);

    std::string csv = ctx.header("modal trajectory", {"dt = " + f(tr.dt), "controls: M_j = actuator moments, F = shaker force"});
    csv += "t,V,w_l0,v_l0";
    for (int i = 0; i < n; ++i) csv += ",q_" + std::to_string(i + 1);
    for (int i = 0; i < n; ++i) csv += ",qdot_" + std::to_string(i + 1);
    for (int a = 0; a < sys.k; ++a) csv += ",M_" + std::to_string(a + 1);
    csv += ",F\n";
    for (std::size_t r = 0; r < tr.size(); ++r) {
        csv += f(tr.t[r]) + "," + f(tr.V[r]) + "," + f(tr.w_l0[r]) + "," + f(tr.v_l0[r]);
        const ModalState& st = tr.states[r];
        for (int i = 0; i < n; ++i) csv += "," + f(st.q(i));
        for (int i = 0; i < n; ++i) csv += "," + f(st.qdot(i));
        for (Eigen::Index a = 0; a < tr.controls[r].size(); ++a) csv += "," + f(tr.controls[r](a));
        csv += "\n";
    }
    ctx.write("trajectory.csv", csv);

    const double v0 = tr.V.front(), v1 = tr.V.back();
    const double tol = 1e-10 * v0;
    s.add("V0", f(v0));
    s.add("V_end", f(v1));
    s.add("V_end_over_V0_minus_1", v0 > 0.0 ? f(v1 / v0 - 1.0) : std::string("nan"));
    if (v0 > 0.0) {
        const DecayFit fit = decay_rate_estimate(tr);
        s.add("sigma_hat", f(fit.sigma));
        s.add("sigma_hat.conservative", std::string(fit.conservative ? "true" : "false"));
        s.add("sigma_hat.residual", f(fit.residual));
    } else {
        s.add("sigma_hat", std::string("nan"));
        s.add("notice", std::string("zero initial state; trajectory is identically zero"));
    }
    s.add("abscissa", f(spectral_abscissa(sys).abscissa));
    s.add("max_step_increase", f(tr.max_step_increase));
    s.add("roundoff_tolerance", f(tol));
    const bool ok = tr.max_step_increase <= tol;
    s.add("energy_law", std::string(ok ? "ok" : "violated"));
    s.add("samples", tr.size());
    return ctx.finish(s, ok ? ExitOk : ExitFailure);
}

CommandResult cmd_sweep(Context& ctx, const SweepSpec& sweep) {
    const RunConfig& cfg = ctx.cfg();
    const Formatter& f = ctx.fmt();
    require(sweep.steps >= 0, ErrorCode::InvalidArgument, "sweep: --steps must be >= 0");
    {
        RunConfig probe = cfg;
        set_parameter(probe, sweep.param, sweep.from);  // rejects unknown names before any work
    }
    Summary s;
    s.add("command", std::string("sweep"));
    s.add("config_hash", ctx.hash());
    s.add("param", sweep.param);
    s.add("from", f(sweep.from));
    s.add("to", f(sweep.to));
    s.add("steps", static_cast<long long>(sweep.steps));

    std::string csv = ctx.header("certification sweep over " + sweep.param,
                                 {"n_modes = " + std::to_string(cfg.spectral.n_modes)});
    csv += "param,abscissa,verdict\n";
    std::size_t counts[5] = {0, 0, 0, 0, 0};
    const char* names[5] = {"certified", "uncontrollable", "indeterminate", "invalid", "error"};
    for (long i = 0; i < sweep.steps; ++i) {
        const double t = sweep.steps == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(sweep.steps - 1);
        const double value = (i == sweep.steps - 1 && sweep.steps > 1) ? sweep.to : sweep.from + t * (sweep.to - sweep.from);
        RunConfig point = cfg;
        set_parameter(point, sweep.param, value);
        std::string abscissa = "nan";
        int kind;
        if (!validate_system(point.system, point.actuators).valid()) {
            kind = 3;
        } else {
            try {
                const ModalBasis basis = basis_for(point);
                const int n = std::min<int>(point.spectral.n_modes, static_cast<int>(basis.size()));
                require(n >= 1, ErrorCode::Numerical, "no usable modes");
                const ClosedLoopSystem sys = assemble(basis, point.actuators, point.system.alpha0, n);
                const CertificationReport rep = certify_placement(sys, basis);
                abscissa = f(spectral_abscissa(sys).abscissa);
                kind = static_cast<int>(rep.verdict);
            } catch (const Error&) {
                kind = 4;
            }
        }
        ++counts[kind];
        csv += f(value) + "," + abscissa + "," + names[kind] + "\n";
    }
    ctx.write("sweep.csv", csv);
    for (int k = 0; k < 5; ++k) s.add(std::string("count.") + names[k], counts[k]);
    if (sweep.steps == 0) s.add("notice", std::string("empty range; table is empty"));
    return ctx.finish(s, ExitOk);
}

double* actuator_field(RunConfig& cfg, std::string_view name) {
    // actuator[<j>].<field>, 1-based
    if (name.substr(0, 9) != "actuator[") return nullptr;
    const auto close = name.find("].");
    if (close == std::string_view::npos) return nullptr;
    const std::string idx(name.substr(9, close - 9));
    if (idx.empty() || idx.find_first_not_of("0123456789") != std::string::npos) return nullptr;
    const unsigned long j = std::stoul(idx);
    if (j < 1 || j > cfg.actuators.size()) return nullptr;
    Actuator& a = cfg.actuators[j - 1];
    const std::string_view field = name.substr(close + 2);
    if (field == "center") return &a.center;
    if (field == "width") return &a.width;
    if (field == "height") return &a.height;
    if (field == "alpha") return &a.alpha;
    return nullptr;
}

}  // namespace

void set_parameter(RunConfig& cfg, std::string_view name, double value) {
    BeamSystem& s = cfg.system;
    const std::pair<const char*, double*> table[] = {
        {"beam.E", &s.E},         {"beam.I", &s.I},           {"beam.rho", &s.rho},   {"beam.l", &s.l},
        {"shaker.m", &s.m},       {"shaker.kappa", &s.kappa}, {"shaker.l0", &s.l0},   {"shaker.alpha0", &s.alpha0},
    };
    for (const auto& [key, ptr] : table) {
        const std::string_view k(key);
        if (name == k || name == k.substr(k.find('.') + 1)) {
            *ptr = value;
            return;
        }
    }
    if (double* p = actuator_field(cfg, name)) {
        *p = value;
        return;
    }
    fail(ErrorCode::InvalidArgument,
         "unknown sweep parameter '" + std::string(name) +
             "' (expected beam.E|I|rho|l, shaker.m|kappa|l0|alpha0 or actuator[j].center|width|height|alpha)");
}

CommandResult run_command(std::string_view command, const RunConfig& cfg, const SweepSpec& sweep) {
    static const char* known[] = {"validate", "spectrum", "modes", "certify", "simulate", "sweep"};
    require(std::find(std::begin(known), std::end(known), command) != std::end(known), ErrorCode::InvalidArgument,
            "unknown command '" + std::string(command) + "'");
    Context ctx(std::string(command), cfg);
    const ValidationReport rep = validate_config(cfg);
    if (command == "validate") return cmd_validate(ctx, rep);
    if (!rep.valid()) {
        if (command == "sweep") {
            RunConfig probe = cfg;
            set_parameter(probe, sweep.param, sweep.from);
        }
        return cmd_validate(ctx, rep);
    }
    if (command == "spectrum") return cmd_spectrum(ctx);
    if (command == "modes") return cmd_modes(ctx);
    if (command == "certify") return cmd_certify(ctx);
    if (command == "simulate") return cmd_simulate(ctx);
    return cmd_sweep(ctx, sweep);
}

}  // namespace flexbeam
