#include "flexbeam/core_model.hpp"

#include "flexbeam/error.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>

namespace flexbeam {

double BeamSystem::wave_speed() const { return std::sqrt(EI() / rho); }

namespace {

bool positive(double v) { return std::isfinite(v) && v > 0.0; }

std::string actuator_key(std::size_t j, const char* field) {
    return "actuator[" + std::to_string(j + 1) + "]." + field;
}

}  // namespace

ValidationReport validate_system(const BeamSystem& sys, std::span<const Actuator> actuators) {
    ValidationReport rep;
    auto add = [&rep](std::string key, std::string msg) {
        rep.violations.push_back({std::move(key), std::move(msg)});
    };

    if (!positive(sys.E)) add("beam.E", "E must be > 0");
    if (!positive(sys.I)) add("beam.I", "I must be > 0");
    if (!positive(sys.rho)) add("beam.rho", "rho must be > 0");
    if (!positive(sys.l)) add("beam.l", "l must be > 0");
    if (!positive(sys.m)) add("shaker.m", "m must be > 0");
    if (!positive(sys.kappa)) add("shaker.kappa", "kappa must be > 0");
    if (!std::isfinite(sys.alpha0) || sys.alpha0 < 0.0) add("shaker.alpha0", "alpha0 must be >= 0");
    if (!std::isfinite(sys.l0) || !(sys.l0 > 0.0 && sys.l0 < sys.l))
        add("shaker.l0", "l0 outside (0,l)");

    for (std::size_t j = 0; j < actuators.size(); ++j) {
        const Actuator& a = actuators[j];
        if (!positive(a.width)) {
            add(actuator_key(j, "width"), "width must be > 0");
            continue;
        }
        if (!positive(a.height)) add(actuator_key(j, "height"), "height must be > 0");
        if (!std::isfinite(a.alpha) || a.alpha < 0.0) add(actuator_key(j, "alpha"), "alpha must be >= 0");
        if (!std::isfinite(a.center)) {
            add(actuator_key(j, "center"), "center must be finite");
            continue;
        }
        if (!(a.support_lo() > 0.0 && a.support_hi() < sys.l))
            add(actuator_key(j, "center"), "support not inside (0,l)");
        if (a.support_lo() <= sys.l0 && sys.l0 <= a.support_hi())
            add(actuator_key(j, "center"), "support contains l0");
    }
    return rep;
}

double actuator_profile(const Actuator& a, double x) {
    const double d = x - a.center;
    if (std::abs(d) > 0.5 * a.width) return 0.0;
    return a.height * 0.5 * (1.0 + std::cos(2.0 * std::numbers::pi * d / a.width));
}

void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights) {
    require(order >= 1, ErrorCode::InvalidArgument, "quadrature order must be >= 1");
    const int n = order;
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    if (n == 1) {
        weights[0] = 2.0;
        return;
    }
    // P_n(x) and P_n'(x) by the three-term recurrence
    auto legendre = [n](double x, double& dp) {
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n * (x * p1 - p0) / (x * x - 1.0);
        return p1;
    };
    for (int i = 0; i < n / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            const double dx = legendre(x, dp) / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        legendre(x, dp);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes[i] = -x;
        nodes[n - 1 - i] = x;
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    if (n % 2 == 1) {
        double dp = 0.0;
        legendre(0.0, dp);
        weights[n / 2] = 2.0 / (dp * dp);
    }
}

namespace {

struct GlTable {
    std::vector<double> x, w;
};

const GlTable& cached_gauss_legendre(int order) {
    static std::mutex mu;
    static std::map<int, GlTable> cache;
    std::lock_guard<std::mutex> lock(mu);
    auto it = cache.find(order);
    if (it == cache.end()) {
        GlTable t;
        gauss_legendre(order, t.x, t.w);
        it = cache.emplace(order, std::move(t)).first;
    }
    return it->second;
}

}  // namespace

QuadratureRule::QuadratureRule(double l, std::vector<double> breakpoints, int order,
                               double max_panel_width)
    : l_(l), order_(order) {
    require(std::isfinite(l) && l > 0.0, ErrorCode::InvalidArgument, "quadrature length must be > 0");
    require(order >= 1, ErrorCode::InvalidArgument, "quadrature order must be >= 1");

    breakpoints.push_back(0.0);
    breakpoints.push_back(l);
    std::erase_if(breakpoints, [l](double b) { return !(b >= 0.0 && b <= l); });
    std::sort(breakpoints.begin(), breakpoints.end());
    const double merge_tol = 1e-14 * l;
    for (double b : breakpoints)
        if (breakpoints_.empty() || b - breakpoints_.back() > merge_tol) breakpoints_.push_back(b);
    breakpoints_.back() = l;

    edges_.push_back(0.0);
    for (std::size_t p = 1; p < breakpoints_.size(); ++p) {
        const double a = breakpoints_[p - 1], b = breakpoints_[p];
        int pieces = 1;
        if (max_panel_width > 0.0) pieces = std::max(1, static_cast<int>(std::ceil((b - a) / max_panel_width)));
        for (int s = 1; s < pieces; ++s) edges_.push_back(a + (b - a) * s / pieces);
        edges_.push_back(b);
    }

    const GlTable& gl = cached_gauss_legendre(order);
    nodes_.reserve((edges_.size() - 1) * order);
    weights_.reserve(nodes_.capacity());
    for (std::size_t p = 1; p < edges_.size(); ++p) {
        const double a = edges_[p - 1], b = edges_[p];
        const double half = 0.5 * (b - a), mid = 0.5 * (a + b);
        for (int i = 0; i < order; ++i) {
            nodes_.push_back(mid + half * gl.x[i]);
            weights_.push_back(half * gl.w[i]);
        }
    }
}

QuadratureRule QuadratureRule::for_system(const BeamSystem& sys, std::span<const Actuator> actuators,
                                          int order, double max_panel_width) {
    std::vector<double> bp{0.0, sys.l0, sys.l};
    for (const Actuator& a : actuators) {
        bp.push_back(a.support_lo());
        bp.push_back(a.support_hi());
    }
    return QuadratureRule(sys.l, std::move(bp), order, max_panel_width);
}

}  // namespace flexbeam
