#pragma once

#include "flexbeam/core_model.hpp"

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace flexbeam {

/// Truncated frequency function 2 sin(mu(l-l0)) sin(mu l0) - sin(mu l).
double phi0(double mu, double l, double l0);

/// Row-normalized, column-scaled 4x4 interface matrix G(mu) for the
/// piecewise ansatz
///   u_L(x) = b1 sin(mu x) + b2 sinh(mu x) e^{-mu l0}           on [0, l0]
///   u_R(x) = b3 sin(mu(l-x)) + b4 sinh(mu(l-x)) e^{-mu(l-l0)}  on [l0, l]
/// Rows: continuity of u, u', u'' at l0 and the shear jump
/// (kappa - m omega^2) u(l0) = EI (u_L''' - u_R''')(l0), omega^2 = (EI/rho) mu^4.
std::array<std::array<double, 4>, 4> frequency_matrix(double mu, const BeamSystem& sys);

/// det G(mu). Same roots and sign pattern as the unscaled determinant.
double phi_full(double mu, const BeamSystem& sys);

struct RootScanOptions {
    double tolerance = 1e-12;          // bisection width, absolute in mu
    double multiple_root_tol = 1e-6;   // relative to (mu_hi - mu_lo)
    double tangential_tol = 1e-10;     // |f| below this at a local minimum without sign change
    bool refine_local_minima = true;
};

struct RootScan {
    std::vector<double> roots;
    /// Indices into roots that sit closer than the multiple-root tolerance to a neighbour.
    std::vector<std::size_t> close_pairs;
    /// Suspected even-multiplicity roots (|f| touches zero without changing sign).
    std::vector<double> tangential;
    std::vector<std::string> warnings;
};

RootScan find_roots(const std::function<double(double)>& f, double mu_lo, double mu_hi, double grid_step,
                    const RootScanOptions& opts = {});

/// Period of phi0 for l0/l = p1/p2 in lowest terms. Throws for 2 p1 == p2.
double period_phi0(double l, double l0, long p1, long p2);

class ModeShape {
public:
    ModeShape() = default;
    /// `scaled` are (b1..b4) of frequency_matrix's ansatz.
    ModeShape(const BeamSystem& sys, double mu, std::array<double, 4> scaled);

    double mu() const { return mu_; }
    double omega() const { return omega_; }
    /// Physical coefficients (a1..a4) of sin/sinh on each side. a2, a4
    /// underflow to zero for very large mu*l; evaluation does not use them.
    std::array<double, 4> coeffs() const;
    const std::array<double, 4>& scaled_coeffs() const { return b_; }

    /// k-th derivative (0..3). At x == l0 the left branch is used unless from_right.
    double eval(double x, int k = 0, bool from_right = false) const;
    double operator()(double x) const { return eval(x, 0); }
    double at_l0() const { return eval(l0_, 0); }

    void scale(double s);

    struct Residuals {
        double continuity_u, continuity_du, continuity_ddu;  // relative to max |b|
        double interface_jump;                                // relative to EI mu^3 max |b|
    };
    Residuals residuals(const BeamSystem& sys) const;

private:
    double mu_ = 0.0, omega_ = 0.0, l_ = 0.0, l0_ = 0.0;
    std::array<double, 4> b_{};
};

/// Mass-normalized mode shape at a root of phi_full. Throws MultipleRoot when
/// G(mu) has rank <= 2.
ModeShape mode_shape(double mu_root, const BeamSystem& sys, int quad_order = 16);

/// rho * int phi_i phi_j + m phi_i(l0) phi_j(l0)
double mass_inner_product(const BeamSystem& sys, const ModeShape& a, const ModeShape& b,
                          const QuadratureRule& rule);

struct BasisOptions {
    double mu_max = 0.0;     // <= 0: grow the scan until n_modes are found
    double mu_min = 0.0;     // <= 0: 1e-3 * pi / l
    double grid_step = 0.0;  // <= 0: pi / (10 l)
    int n_modes = 10;        // 0: every root up to mu_max
    double root_tol = 1e-6;  // multiple-root tolerance, relative to the scan range
    int quad_order = 16;
};

struct ModalBasis {
    BeamSystem system;
    std::vector<ModeShape> modes;
    double mu_max = 0.0;
    /// Roots flagged as (near-)multiple and therefore left out of modes.
    std::vector<double> excluded_roots;
    std::vector<std::string> warnings;

    std::size_t size() const { return modes.size(); }
    /// Quadrature suited to products of the first n modes (all if n == 0).
    QuadratureRule quadrature(std::span<const Actuator> actuators = {}, std::size_t n = 0,
                              int order = 16) const;
};

ModalBasis build_basis(const BeamSystem& sys, const BasisOptions& opts = {});

/// max_ij |<phi_i, phi_j>_M - delta_ij| over the first n modes.
double orthogonality_error(const ModalBasis& basis, std::size_t n = 0);

struct GrowthFit {
    double slope = 0.0;
    double intercept = 0.0;
    double relative_residual = 0.0;  // ||mu - fit||_2 / ||mu||_2
    std::size_t count = 0;
};

/// Least-squares fit mu_j ~ slope * j + intercept, j = 1..N. Needs N >= 10.
GrowthFit fit_linear_growth(std::span<const double> mus);
GrowthFit eigenvalue_growth_check(const ModalBasis& basis);

/// Q'(x): number of roots with mu^2 < x.
std::size_t counting_function(std::span<const double> mus, double x);
/// Q[y, y+z) = Q'(y+z) - Q'(y).
std::size_t window_count(std::span<const double> mus, double y, double z);
/// (k/P)(sqrt(y+z) - sqrt(y) + P) + 2
double window_count_bound(double y, double z, double period, std::size_t roots_per_period);

}  // namespace flexbeam
