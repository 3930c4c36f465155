#include "flexbeam/spectral.hpp"

#include "flexbeam/error.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

namespace flexbeam {

double phi0(double mu, double l, double l0) {
    return 2.0 * std::sin(mu * (l - l0)) * std::sin(mu * l0) - std::sin(mu * l);
}

std::array<std::array<double, 4>, 4> frequency_matrix(double mu, const BeamSystem& sys) {
    require(std::isfinite(mu) && mu > 0.0, ErrorCode::InvalidArgument, "phi_full: mu must be > 0");
    const double left = sys.l0, right = sys.l - sys.l0;
    const double sL = std::sin(mu * left), cL = std::cos(mu * left);
    const double sR = std::sin(mu * right), cR = std::cos(mu * right);
    const double eL = std::exp(-2.0 * mu * left), eR = std::exp(-2.0 * mu * right);
    const double shL = 0.5 * (1.0 - eL), chL = 0.5 * (1.0 + eL);
    const double shR = 0.5 * (1.0 - eR), chR = 0.5 * (1.0 + eR);
    // (kappa - m omega^2) / (EI mu^3)
    const double beta = sys.kappa / (sys.EI() * mu * mu * mu) - sys.m * mu / sys.rho;

    std::array<std::array<double, 4>, 4> g{{
        {sL, shL, -sR, -shR},
        {cL, chL, cR, chR},
        {-sL, shL, sR, -shR},
        {-cL - beta * sL, chL - beta * shL, -cR, chR},
    }};
    for (auto& row : g) {
        double n2 = 0.0;
        for (double v : row) n2 += v * v;
        const double inv = 1.0 / std::sqrt(n2);
        for (double& v : row) v *= inv;
    }
    return g;
}

double phi_full(double mu, const BeamSystem& sys) {
    const auto g = frequency_matrix(mu, sys);
    Eigen::Matrix4d m;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = g[i][j];
    return m.determinant();
}

// ---------------------------------------------------------------------------
// root scanning

namespace {

int sgn(double v) { return (v > 0.0) - (v < 0.0); }

double bisect(const std::function<double(double)>& f, double a, double b, double fa, double tol) {
    for (int it = 0; it < 200 && (b - a) > tol; ++it) {
        const double mid = 0.5 * (a + b);
        if (mid <= a || mid >= b) break;
        const double fm = f(mid);
        if (fm == 0.0) return mid;
        if (sgn(fm) == sgn(fa)) {
            a = mid;
            fa = fm;
        } else {
            b = mid;
        }
    }
    return 0.5 * (a + b);
}

// Minimizes g on [a, b] by golden-section search; returns the abscissa.
template <class G>
double golden_min(G&& g, double a, double b, double tol) {
    const double r = 0.5 * (std::sqrt(5.0) - 1.0);
    double c = b - r * (b - a), d = a + r * (b - a);
    double gc = g(c), gd = g(d);
    for (int it = 0; it < 200 && (b - a) > tol; ++it) {
        if (gc < gd) {
            b = d;
            d = c;
            gd = gc;
            c = b - r * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + r * (b - a);
            gd = g(d);
        }
    }
    return gc < gd ? c : d;
}

}  // namespace

RootScan find_roots(const std::function<double(double)>& f, double mu_lo, double mu_hi, double grid_step,
                    const RootScanOptions& opts) {
    require(grid_step > 0.0, ErrorCode::InvalidArgument, "find_roots: grid_step must be > 0");
    require(mu_lo < mu_hi, ErrorCode::InvalidArgument, "find_roots: need mu_lo < mu_hi");

    const auto cells = static_cast<std::size_t>(std::ceil((mu_hi - mu_lo) / grid_step));
    std::vector<double> xs(cells + 1), fs(cells + 1);
    for (std::size_t i = 0; i <= cells; ++i) {
        xs[i] = (i == cells) ? mu_hi : mu_lo + (mu_hi - mu_lo) * static_cast<double>(i) / cells;
        fs[i] = f(xs[i]);
    }

    RootScan out;
    for (std::size_t i = 0; i <= cells; ++i) {
        if (fs[i] == 0.0) {
            out.roots.push_back(xs[i]);
            // a second root may share the cell with an exact grid zero
            for (const std::size_t j : {i - 1, i + 1}) {
                if (j > cells || fs[j] == 0.0) continue;
                const int s = sgn(fs[j]);
                const auto g = [&](double x) { return s * f(x); };
                const double xm = golden_min(g, std::min(xs[i], xs[j]), std::max(xs[i], xs[j]), opts.tolerance);
                const double fm = f(xm);
                if (sgn(fm) == -s) out.roots.push_back(bisect(f, std::min(xm, xs[j]), std::max(xm, xs[j]),
                                                               xm < xs[j] ? fm : fs[j], opts.tolerance));
            }
            continue;
        }
        if (i < cells && fs[i + 1] != 0.0 && sgn(fs[i]) != sgn(fs[i + 1]))
            out.roots.push_back(bisect(f, xs[i], xs[i + 1], fs[i], opts.tolerance));
    }

    if (opts.refine_local_minima) {
        for (std::size_t i = 1; i < cells; ++i) {
            const int s = sgn(fs[i]);
            if (s == 0 || sgn(fs[i - 1]) != s || sgn(fs[i + 1]) != s) continue;
            if (!(std::abs(fs[i]) < std::abs(fs[i - 1]) && std::abs(fs[i]) <= std::abs(fs[i + 1]))) continue;
            const auto g = [&](double x) { return s * f(x); };
            const double xm = golden_min(g, xs[i - 1], xs[i + 1], opts.tolerance);
            const double fm = f(xm);
            if (sgn(fm) == -s) {
                // two sign changes hidden inside one pair of cells
                out.roots.push_back(bisect(f, xs[i - 1], xm, fs[i - 1], opts.tolerance));
                out.roots.push_back(bisect(f, xm, xs[i + 1], fm, opts.tolerance));
            } else if (std::abs(fm) < opts.tangential_tol) {
                out.tangential.push_back(xm);
                std::ostringstream msg;
                msg.precision(17);
                msg << "suspected multiple (tangential) root near mu=" << xm << " (|f|=" << std::abs(fm) << ")";
                out.warnings.push_back(msg.str());
            }
        }
    }

    std::sort(out.roots.begin(), out.roots.end());
    out.roots.erase(std::unique(out.roots.begin(), out.roots.end(),
                                [&](double a, double b) { return b - a <= opts.tolerance; }),
                    out.roots.end());

    const double close = opts.multiple_root_tol * (mu_hi - mu_lo);
    for (std::size_t i = 1; i < out.roots.size(); ++i) {
        if (out.roots[i] - out.roots[i - 1] < close) {
            if (out.close_pairs.empty() || out.close_pairs.back() != i - 1) out.close_pairs.push_back(i - 1);
            out.close_pairs.push_back(i);
            std::ostringstream msg;
            msg.precision(17);
            msg << "roots closer than multiple-root tolerance: " << out.roots[i - 1] << ", " << out.roots[i];
            out.warnings.push_back(msg.str());
        }
    }
    return out;
}

double period_phi0(double l, double l0, long p1, long p2) {
    require(p1 > 0 && p2 > 0, ErrorCode::InvalidArgument, "period_phi0: p1, p2 must be positive");
    require(std::gcd(p1, p2) == 1, ErrorCode::InvalidArgument, "period_phi0: p1/p2 must be in lowest terms");
    require(std::abs(l0 / l - static_cast<double>(p1) / static_cast<double>(p2)) <= 1e-12,
            ErrorCode::InvalidArgument, "period_phi0: l0/l != p1/p2");
    require(2 * p1 != p2, ErrorCode::InvalidArgument, "period_phi0: degenerate (2 p1 = p2, |2 l0 - l| = 0)");
    const long q = std::abs(2 * p1 - p2);
    return 2.0 * std::numbers::pi / std::abs(2.0 * l0 - l) * static_cast<double>(q) /
           static_cast<double>(std::gcd(p2, q));
}

// ---------------------------------------------------------------------------
// mode shapes

ModeShape::ModeShape(const BeamSystem& sys, double mu, std::array<double, 4> scaled)
    : mu_(mu), omega_(sys.wave_speed() * mu * mu), l_(sys.l), l0_(sys.l0), b_(scaled) {}

std::array<double, 4> ModeShape::coeffs() const {
    return {b_[0], b_[1] * std::exp(-mu_ * l0_), b_[2], b_[3] * std::exp(-mu_ * (l_ - l0_))};
}

void ModeShape::scale(double s) {
    for (double& v : b_) v *= s;
}

namespace {

// d^k/dy^k sin(mu y) / mu^k
double sin_deriv(double arg, int k) {
    switch (k & 3) {
        case 0: return std::sin(arg);
        case 1: return std::cos(arg);
        case 2: return -std::sin(arg);
        default: return -std::cos(arg);
    }
}

// d^k/dy^k [sinh(mu y) e^{-mu span}] / mu^k, stable for large mu.
double sinh_scaled_deriv(double mu, double y, double span, int k) {
    const double grow = std::exp(mu * (y - span));
    const double decay = std::exp(-mu * (y + span));
    return (k % 2 == 0) ? 0.5 * (grow - decay) : 0.5 * (grow + decay);
}

}  // namespace

double ModeShape::eval(double x, int k, bool from_right) const {
    const double muk = std::pow(mu_, k);
    if (x < l0_ || (x == l0_ && !from_right)) {
        return muk * (b_[0] * sin_deriv(mu_ * x, k) + b_[1] * sinh_scaled_deriv(mu_, x, l0_, k));
    }
    const double s = l_ - x;
    const double span = l_ - l0_;
    const double sign = (k % 2 == 0) ? 1.0 : -1.0;
    return sign * muk * (b_[2] * sin_deriv(mu_ * s, k) + b_[3] * sinh_scaled_deriv(mu_, s, span, k));
}

ModeShape::Residuals ModeShape::residuals(const BeamSystem& sys) const {
    double bmax = 0.0;
    for (double v : b_) bmax = std::max(bmax, std::abs(v));
    const auto jump = [&](int k) {
        return std::abs(eval(l0_, k, false) - eval(l0_, k, true)) / (std::pow(mu_, k) * bmax);
    };
    Residuals r{};
    r.continuity_u = jump(0);
    r.continuity_du = jump(1);
    r.continuity_ddu = jump(2);
    const double u0 = eval(l0_, 0);
    const double lhs = (sys.kappa - sys.m * omega_ * omega_) * u0;
    const double rhs = sys.EI() * (eval(l0_, 3, false) - eval(l0_, 3, true));
    const double scale = sys.EI() * mu_ * mu_ * mu_ * bmax *
                         (1.0 + std::abs(sys.kappa / (sys.EI() * mu_ * mu_ * mu_) - sys.m * mu_ / sys.rho));
    r.interface_jump = std::abs(lhs - rhs) / scale;
    return r;
}

double mass_inner_product(const BeamSystem& sys, const ModeShape& a, const ModeShape& b,
                          const QuadratureRule& rule) {
    return sys.rho * rule.integrate([&](double x) { return a(x) * b(x); }) + sys.m * a.at_l0() * b.at_l0();
}

ModeShape mode_shape(double mu_root, const BeamSystem& sys, int quad_order) {
    const auto g = frequency_matrix(mu_root, sys);
    Eigen::Matrix4d m;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = g[i][j];
    Eigen::JacobiSVD<Eigen::Matrix4d> svd(m, Eigen::ComputeFullV);
    const Eigen::Vector4d sv = svd.singularValues();
    if (sv(2) < 1e-7 * sv(0)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "mode_shape: interface matrix has rank <= 2 at mu=" << mu_root << " (suspected multiple root)";
        fail(ErrorCode::MultipleRoot, msg.str());
    }
    const Eigen::Vector4d v = svd.matrixV().col(3);
    ModeShape shape(sys, mu_root, {v(0), v(1), v(2), v(3)});

    const double width = std::min(sys.l, 2.0 * std::numbers::pi / mu_root);
    const QuadratureRule rule(sys.l, {sys.l0}, quad_order, width);
    const double norm2 = mass_inner_product(sys, shape, shape, rule);
    require(std::isfinite(norm2) && norm2 > 0.0, ErrorCode::Numerical, "mode_shape: degenerate normalization");

    // orientation: positive slope at the left support, or at the right one if the left is flat
    double slope = shape.eval(0.0, 1);
    if (std::abs(slope) < 1e-8 * mu_root * std::sqrt(norm2)) slope = -shape.eval(sys.l, 1, true);
    shape.scale((slope < 0.0 ? -1.0 : 1.0) / std::sqrt(norm2));
    return shape;
}

// ---------------------------------------------------------------------------
// basis

QuadratureRule ModalBasis::quadrature(std::span<const Actuator> actuators, std::size_t n, int order) const {
    if (n == 0 || n > modes.size()) n = modes.size();
    double mu_top = 0.0;
    for (std::size_t i = 0; i < n; ++i) mu_top = std::max(mu_top, modes[i].mu());
    const double width = mu_top > 0.0 ? std::min(system.l, 2.0 * std::numbers::pi / mu_top) : system.l;
    return QuadratureRule::for_system(system, actuators, order, width);
}

ModalBasis build_basis(const BeamSystem& sys, const BasisOptions& opts) {
    require(validate_system(sys, {}).valid(), ErrorCode::Constraint, "build_basis: invalid beam system");
    require(opts.n_modes >= 0, ErrorCode::InvalidArgument, "build_basis: n_modes must be >= 0");
    require(opts.n_modes > 0 || opts.mu_max > 0.0, ErrorCode::InvalidArgument,
            "build_basis: need n_modes > 0 or mu_max > 0");

    const double pi = std::numbers::pi;
    const double mu_min = opts.mu_min > 0.0 ? opts.mu_min : 1e-3 * pi / sys.l;
    const double step = opts.grid_step > 0.0 ? opts.grid_step : pi / (10.0 * sys.l);
    const bool grow = opts.mu_max <= 0.0;
    double mu_max = grow ? (opts.n_modes + 2) * pi / sys.l : opts.mu_max;

    RootScanOptions ro;
    ro.multiple_root_tol = opts.root_tol;
    const auto f = [&sys](double mu) { return phi_full(mu, sys); };

    RootScan scan;
    std::vector<bool> excluded;
    for (int attempt = 0;; ++attempt) {
        if (mu_max <= mu_min) {
            scan = {};
            break;
        }
        scan = find_roots(f, mu_min, mu_max, step, ro);
        excluded.assign(scan.roots.size(), false);
        for (std::size_t i : scan.close_pairs) excluded[i] = true;
        const auto usable = std::count(excluded.begin(), excluded.end(), false);
        if (!grow || usable >= opts.n_modes || attempt >= 30) break;
        mu_max *= 1.5;
    }

    ModalBasis basis;
    basis.system = sys;
    basis.mu_max = mu_max;
    basis.warnings = scan.warnings;
    basis.excluded_roots = scan.tangential;
    for (std::size_t i = 0; i < scan.roots.size(); ++i) {
        if (excluded[i]) {
            basis.excluded_roots.push_back(scan.roots[i]);
            continue;
        }
        if (opts.n_modes > 0 && basis.modes.size() >= static_cast<std::size_t>(opts.n_modes)) continue;
        try {
            basis.modes.push_back(mode_shape(scan.roots[i], sys, opts.quad_order));
        } catch (const Error& e) {
            if (e.code() != ErrorCode::MultipleRoot) throw;
            basis.excluded_roots.push_back(scan.roots[i]);
            basis.warnings.push_back(e.what());
        }
    }
    std::sort(basis.excluded_roots.begin(), basis.excluded_roots.end());
    if (opts.n_modes > 0 && basis.modes.size() < static_cast<std::size_t>(opts.n_modes)) {
        basis.warnings.push_back("only " + std::to_string(basis.modes.size()) + " of " +
                                 std::to_string(opts.n_modes) + " requested modes below mu_max");
    }
    return basis;
}

double orthogonality_error(const ModalBasis& basis, std::size_t n) {
    if (n == 0 || n > basis.size()) n = basis.size();
    const QuadratureRule rule = basis.quadrature({}, n);
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i; j < n; ++j) {
            const double g = mass_inner_product(basis.system, basis.modes[i], basis.modes[j], rule);
            worst = std::max(worst, std::abs(g - (i == j ? 1.0 : 0.0)));
        }
    return worst;
}

// ---------------------------------------------------------------------------
// growth and counting

GrowthFit fit_linear_growth(std::span<const double> mus) {
    require(mus.size() >= 10, ErrorCode::Precondition, "eigenvalue growth check needs at least 10 roots");
    const auto n = static_cast<double>(mus.size());
    double sj = 0.0, sjj = 0.0, sm = 0.0, sjm = 0.0;
    for (std::size_t i = 0; i < mus.size(); ++i) {
        const double j = static_cast<double>(i + 1);
        sj += j;
        sjj += j * j;
        sm += mus[i];
        sjm += j * mus[i];
    }
    GrowthFit fit;
    fit.count = mus.size();
    fit.slope = (n * sjm - sj * sm) / (n * sjj - sj * sj);
    fit.intercept = (sm - fit.slope * sj) / n;
    double res2 = 0.0, norm2 = 0.0;
    for (std::size_t i = 0; i < mus.size(); ++i) {
        const double r = mus[i] - (fit.slope * static_cast<double>(i + 1) + fit.intercept);
        res2 += r * r;
        norm2 += mus[i] * mus[i];
    }
    fit.relative_residual = std::sqrt(res2 / norm2);
    return fit;
}

GrowthFit eigenvalue_growth_check(const ModalBasis& basis) {
    std::vector<double> mus;
    mus.reserve(basis.size());
    for (const auto& m : basis.modes) mus.push_back(m.mu());
    return fit_linear_growth(mus);
}

std::size_t counting_function(std::span<const double> mus, double x) {
    return static_cast<std::size_t>(std::count_if(mus.begin(), mus.end(), [x](double mu) { return mu * mu < x; }));
}

std::size_t window_count(std::span<const double> mus, double y, double z) {
    return counting_function(mus, y + z) - counting_function(mus, y);
}

double window_count_bound(double y, double z, double period, std::size_t roots_per_period) {
    const double k = static_cast<double>(roots_per_period);
    return k / period * (std::sqrt(y + z) - std::sqrt(y) + period) + 2.0;
}

}  // namespace flexbeam
