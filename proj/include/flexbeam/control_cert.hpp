#pragma once

#include "flexbeam/core_model.hpp"
#include "flexbeam/modal_dynamics.hpp"
#include "flexbeam/spectral.hpp"

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

namespace flexbeam {

// ---------------------------------------------------------------------------
// Lyapunov functional  2V = int(rho v^2 + EI u''^2) dx + m q^2 + kappa p^2

double lyapunov_V(const ClosedLoopSystem& sys, const ModalState& state);

/// Physical state: curvature u'' and velocity v as functions of x, plus the
/// shaker displacement p = u(l0) and velocity q = v(l0).
struct PhysicalState {
    std::function<double(double)> curvature;
    std::function<double(double)> velocity;
    double p = 0.0;
    double q = 0.0;
};

double lyapunov_V(const BeamSystem& sys, const PhysicalState& state, const QuadratureRule& rule);

/// Reconstructs u'' and v from modal amplitudes and integrates the physical
/// functional directly.
double lyapunov_V_physical(const ModalBasis& basis, const ModalState& state);

// ---------------------------------------------------------------------------
// placement certification

enum class Verdict { Certified, Uncontrollable, Indeterminate };

const char* to_string(Verdict v);

struct ModeCoupling {
    int j = 0;  // 1-based mode index
    double omega = 0.0;
    double c = 0.0;              // phi_j(l0)
    std::vector<double> B;       // int chi_i phi_j, per actuator
    bool shaker_coupled = false; // |c| > tol_c and alpha0 > 0
    std::vector<bool> actuator_coupled;
    bool controllable = false;
};

struct CertificationReport {
    int n = 0;
    double tol_c = 0.0;
    double tol_b = 0.0;
    double frequency_tol = 0.0;
    double alpha0 = 0.0;
    std::vector<double> alphas;
    std::vector<ModeCoupling> modes;
    std::vector<int> uncoupled;  // 1-based
    std::vector<std::string> indeterminate_reasons;
    Verdict verdict = Verdict::Certified;

    bool all_controllable() const { return uncoupled.empty(); }
};

struct CertifyOptions {
    double tol_c = 1e-8;
    double tol_b = 1e-8;
    double frequency_tol = 1e-6;  // |omega_i - omega_j| < tol * omega_i is indeterminate
};

CertificationReport certify_placement(const ModalBasis& basis, std::span<const Actuator> actuators, double alpha0,
                                      int n, const CertifyOptions& opts = {});

/// Same decision from an already assembled system (no new quadrature).
CertificationReport certify_placement(const ClosedLoopSystem& sys, const ModalBasis& basis,
                                      const CertifyOptions& opts = {});

// ---------------------------------------------------------------------------
// analytic oracles

/// The 4x4 interface matrix K of the static inverse problem, built entry by
/// entry as printed, with EI = E I.
std::array<std::array<double, 4>, 4> k_matrix(const BeamSystem& sys);

struct DetKCheck {
    double numeric = 0.0;
    double closed_form = 0.0;  // -EI l (l - l0 + 1) - kappa/3 l0 (l-l0)^2 (l - l0 + l0^2)
    double ratio = 0.0;        // numeric / closed_form
};

DetKCheck det_K_check(const BeamSystem& sys);

struct PoincareCheck {
    double lhs = 0.0;  // int u'^2
    double rhs = 0.0;  // l^2/2 int u''^2
    bool holds = true;
};

/// u(x) = sum_n b_n sin(n pi x / l), n = 1..coeffs.size() (at most 20).
PoincareCheck poincare_check(std::span<const double> sine_coeffs, double l, int quad_order = 16);

struct Lemma3Check {
    std::size_t count = 0;
    double bound = 0.0;
    bool holds = true;
};

Lemma3Check lemma3_bound_check(std::span<const double> mus, double y, double z, double period,
                               std::size_t roots_per_period);

struct DecayFit {
    double sigma = 0.0;     // fitted rate, V ~ exp(2 sigma t); <= 0
    double residual = 0.0;  // RMS of the log V fit
    std::size_t samples = 0;
    bool conservative = false;  // V constant, sigma pinned to 0
};

DecayFit decay_rate_estimate(const Trajectory& traj);
DecayFit decay_rate_estimate(std::span<const double> t, std::span<const double> V);

}  // namespace flexbeam
