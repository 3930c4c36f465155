#include "flexbeam/control_cert.hpp"

#include "flexbeam/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace flexbeam {

double lyapunov_V(const ClosedLoopSystem& sys, const ModalState& state) { return modal_energy(sys, state); }

double lyapunov_V(const BeamSystem& sys, const PhysicalState& state, const QuadratureRule& rule) {
    const double field = rule.integrate([&](double x) {
        const double v = state.velocity(x);
        const double k = state.curvature(x);
        return sys.rho * v * v + sys.EI() * k * k;
    });
    return 0.5 * (field + sys.m * state.q * state.q + sys.kappa * state.p * state.p);
}

double lyapunov_V_physical(const ModalBasis& basis, const ModalState& state) {
    const auto n = static_cast<std::size_t>(state.q.size());
    require(n >= 1 && n <= basis.size() && state.qdot.size() == state.q.size(), ErrorCode::InvalidArgument,
            "lyapunov_V_physical: state dimension does not match basis");
    const auto sum = [&](const Eigen::VectorXd& amp, double x, int k) {
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += amp(static_cast<Eigen::Index>(i)) * basis.modes[i].eval(x, k);
        return s;
    };
    PhysicalState ps;
    ps.curvature = [&](double x) { return sum(state.q, x, 2); };
    ps.velocity = [&](double x) { return sum(state.qdot, x, 0); };
    ps.p = sum(state.q, basis.system.l0, 0);
    ps.q = sum(state.qdot, basis.system.l0, 0);
    return lyapunov_V(basis.system, ps, basis.quadrature({}, n));
}

// ---------------------------------------------------------------------------

const char* to_string(Verdict v) {
    switch (v) {
        case Verdict::Certified: return "certified";
        case Verdict::Uncontrollable: return "uncontrollable";
        case Verdict::Indeterminate: return "indeterminate";
    }
    return "?";
}

CertificationReport certify_placement(const ClosedLoopSystem& sys, const ModalBasis& basis,
                                      const CertifyOptions& opts) {
    CertificationReport rep;
    rep.n = sys.n;
    rep.tol_c = opts.tol_c;
    rep.tol_b = opts.tol_b;
    rep.frequency_tol = opts.frequency_tol;
    rep.alpha0 = sys.alpha0;
    rep.alphas.assign(sys.alphas.data(), sys.alphas.data() + sys.alphas.size());

    for (int i = 0; i < sys.n; ++i) {
        ModeCoupling mc;
        mc.j = i + 1;
        mc.omega = sys.omega(i);
        mc.c = sys.c(i);
        mc.shaker_coupled = sys.alpha0 > 0.0 && std::abs(mc.c) > opts.tol_c;
        mc.controllable = mc.shaker_coupled;
        for (int a = 0; a < sys.k; ++a) {
            mc.B.push_back(sys.B(i, a));
            const bool coupled = sys.alphas(a) > 0.0 && std::abs(sys.B(i, a)) > opts.tol_b;
            mc.actuator_coupled.push_back(coupled);
            mc.controllable = mc.controllable || coupled;
        }
        if (!mc.controllable) rep.uncoupled.push_back(mc.j);
        rep.modes.push_back(std::move(mc));
    }

    for (int i = 0; i < sys.n; ++i)
        for (int j = i + 1; j < sys.n; ++j)
            if (std::abs(sys.omega(i) - sys.omega(j)) < opts.frequency_tol * sys.omega(i)) {
                std::ostringstream msg;
                msg << "near-multiple frequencies: modes " << i + 1 << " and " << j + 1;
                rep.indeterminate_reasons.push_back(msg.str());
            }
    if (sys.n >= 1 && static_cast<std::size_t>(sys.n) <= basis.size()) {
        const double mu_top = basis.modes[static_cast<std::size_t>(sys.n) - 1].mu();
        for (double r : basis.excluded_roots)
            if (r <= mu_top * (1.0 + opts.frequency_tol)) {
                std::ostringstream msg;
                msg.precision(17);
                msg << "multiple or near-multiple root excluded from basis at mu=" << r;
                rep.indeterminate_reasons.push_back(msg.str());
            }
    }

    if (!rep.indeterminate_reasons.empty())
        rep.verdict = Verdict::Indeterminate;
    else if (!rep.uncoupled.empty())
        rep.verdict = Verdict::Uncontrollable;
    else
        rep.verdict = Verdict::Certified;
    return rep;
}

CertificationReport certify_placement(const ModalBasis& basis, std::span<const Actuator> actuators, double alpha0,
                                      int n, const CertifyOptions& opts) {
    return certify_placement(assemble(basis, actuators, alpha0, n), basis, opts);
}

// ---------------------------------------------------------------------------

std::array<std::array<double, 4>, 4> k_matrix(const BeamSystem& sys) {
    const double l0 = sys.l0, r = sys.l - sys.l0, ei = sys.EI(), kap = sys.kappa;
    return {{
        {l0, l0 * l0 * l0, r, r * r * r},
        {1.0, 3.0 * l0 * l0, -1.0, -3.0 * r * r},
        {0.0, 1.0, 0.0, r},
        {-kap * l0, 6.0 * ei - kap * l0 * l0 * l0, 0.0, -6.0 * ei},
    }};
}

DetKCheck det_K_check(const BeamSystem& sys) {
    require(validate_system(sys, {}).valid(), ErrorCode::Constraint, "det_K_check: invalid beam system");
    const auto k = k_matrix(sys);
    Eigen::Matrix4d m;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = k[i][j];
    DetKCheck out;
    out.numeric = m.fullPivLu().determinant();
    const double l = sys.l, l0 = sys.l0, r = l - l0;
    out.closed_form = -sys.EI() * l * (r + 1.0) - sys.kappa / 3.0 * l0 * r * r * (r + l0 * l0);
    out.ratio = out.numeric / out.closed_form;
    return out;
}

PoincareCheck poincare_check(std::span<const double> sine_coeffs, double l, int quad_order) {
    require(sine_coeffs.size() <= 20, ErrorCode::Precondition, "poincare_check: at most 20 sine modes");
    require(std::isfinite(l) && l > 0.0, ErrorCode::InvalidArgument, "poincare_check: l must be > 0");
    const std::size_t modes = std::max<std::size_t>(sine_coeffs.size(), 1);
    const QuadratureRule rule(l, {}, quad_order, l / static_cast<double>(modes));
    const double pi = std::numbers::pi;
    const auto slope = [&](double x) {
        double s = 0.0;
        for (std::size_t n = 1; n <= sine_coeffs.size(); ++n) {
            const double kn = n * pi / l;
            s += sine_coeffs[n - 1] * kn * std::cos(kn * x);
        }
        return s;
    };
    const auto curvature = [&](double x) {
        double s = 0.0;
        for (std::size_t n = 1; n <= sine_coeffs.size(); ++n) {
            const double kn = n * pi / l;
            s -= sine_coeffs[n - 1] * kn * kn * std::sin(kn * x);
        }
        return s;
    };
    PoincareCheck out;
    out.lhs = rule.integrate([&](double x) { return slope(x) * slope(x); });
    out.rhs = 0.5 * l * l * rule.integrate([&](double x) { return curvature(x) * curvature(x); });
    out.holds = out.lhs <= out.rhs;
    return out;
}

Lemma3Check lemma3_bound_check(std::span<const double> mus, double y, double z, double period,
                               std::size_t roots_per_period) {
    require(period > 0.0, ErrorCode::InvalidArgument, "lemma3_bound_check: period must be > 0");
    Lemma3Check out;
    out.count = window_count(mus, y, z);
    out.bound = window_count_bound(y, z, period, roots_per_period);
    out.holds = static_cast<double>(out.count) <= out.bound;
    return out;
}

// ---------------------------------------------------------------------------

DecayFit decay_rate_estimate(std::span<const double> t, std::span<const double> V) {
    require(t.size() == V.size() && t.size() >= 2, ErrorCode::Precondition,
            "decay_rate_estimate: need at least two samples");
    const double v0 = V[0];
    require(std::isfinite(v0) && v0 > 0.0, ErrorCode::Precondition, "decay_rate_estimate: V(0) must be > 0");

    DecayFit fit;
    const auto [lo, hi] = std::minmax_element(V.begin(), V.end());
    if (*hi - *lo <= 1e-9 * v0) {
        fit.conservative = true;
        fit.samples = V.size();
        return fit;
    }

    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < V.size(); ++i) {
        if (!(V[i] > 1e-12 * v0)) continue;
        const double y = std::log(V[i]);
        sx += t[i];
        sy += y;
        sxx += t[i] * t[i];
        sxy += t[i] * y;
        ++n;
    }
    require(n >= 2, ErrorCode::Precondition, "decay_rate_estimate: fewer than two samples above 1e-12 V(0)");
    const double dn = static_cast<double>(n);
    const double denom = dn * sxx - sx * sx;
    require(denom > 0.0, ErrorCode::Precondition, "decay_rate_estimate: degenerate sample times");
    const double slope = (dn * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / dn;

    double r2 = 0.0;
    for (std::size_t i = 0; i < V.size(); ++i) {
        if (!(V[i] > 1e-12 * v0)) continue;
        const double r = std::log(V[i]) - (intercept + slope * t[i]);
        r2 += r * r;
    }
    fit.samples = n;
    fit.residual = std::sqrt(r2 / dn);
    fit.sigma = std::min(0.0, 0.5 * slope);
    return fit;
}

DecayFit decay_rate_estimate(const Trajectory& traj) { return decay_rate_estimate(traj.t, traj.V); }

}  // namespace flexbeam
