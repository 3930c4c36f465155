#pragma once

#include "flexbeam/core_model.hpp"
#include "flexbeam/spectral.hpp"

#include <Eigen/Dense>

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace flexbeam {

/// Modal image of the closed loop:  q'' = -Omega^2 q - D q'.
struct ClosedLoopSystem {
    int n = 0;                    // retained modes
    int k = 0;                    // actuators
    Eigen::VectorXd omega;        // omega_i
    Eigen::VectorXd omega2;       // omega_i^2 (diagonal of Omega^2)
    Eigen::MatrixXd B;            // n x k, B(i,j) = int chi_j phi_i dx
    Eigen::VectorXd c;            // c(i) = phi_i(l0)
    Eigen::VectorXd alphas;       // actuator gains
    double alpha0 = 0.0;          // shaker gain
    Eigen::MatrixXd D;            // B diag(alpha) B^T + alpha0 c c^T
};

struct ModalState {
    Eigen::VectorXd q;
    Eigen::VectorXd qdot;
    double t = 0.0;

    static ModalState zero(int n) { return {Eigen::VectorXd::Zero(n), Eigen::VectorXd::Zero(n), 0.0}; }
};

struct AssemblyOptions {
    double orthogonality_tol = 1e-6;
    double stiffness_tol = 1e-6;  // relative, on EI int phi_i'' phi_j'' + kappa phi_i(l0) phi_j(l0)
    int quad_order = 16;
};

/// Builds the closed loop from modal data; D = B diag(alphas) B^T + alpha0 c c^T.
ClosedLoopSystem make_closed_loop(const Eigen::VectorXd& omega, const Eigen::MatrixXd& B, const Eigen::VectorXd& c,
                                  const Eigen::VectorXd& alphas, double alpha0);

/// Projects the beam/shaker dynamics onto the first n modes. Throws if the
/// basis fails the mass-orthogonality or stiffness self-test.
ClosedLoopSystem assemble(const ModalBasis& basis, std::span<const Actuator> actuators, double alpha0, int n,
                          const AssemblyOptions& opts = {});

/// Feedback y = (M_1..M_k, F): M_j = -alpha_j (B^T qdot)_j, F = -alpha0 c^T qdot.
Eigen::VectorXd feedback(const ClosedLoopSystem& sys, const ModalState& state);

/// First-order matrix A_cl = [[0, I], [-Omega^2, -D]] acting on x = (q, qdot).
Eigen::MatrixXd first_order_matrix(const ClosedLoopSystem& sys);

/// Implicit midpoint map for a fixed step, x+ = (I - h/2 A)^{-1} (I + h/2 A) x.
class MidpointStepper {
public:
    MidpointStepper(const ClosedLoopSystem& sys, double dt);
    ModalState step(const ModalState& s) const;
    double dt() const { return dt_; }

private:
    using MatrixXl = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
    using VectorXl = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

    int n_;
    double dt_;
    VectorXl omega_;
    MatrixXl propagator_;  // acts on energy coordinates (Omega q, qdot)
};

ModalState step(const ClosedLoopSystem& sys, const ModalState& state, double dt);

struct Trajectory {
    std::vector<double> t;
    std::vector<ModalState> states;
    std::vector<double> V;
    std::vector<Eigen::VectorXd> controls;  // (M_1..M_k, F) per sample
    std::vector<double> w_l0;
    std::vector<double> v_l0;
    double dt = 0.0;
    double max_step_increase = 0.0;  // max over steps of V(t+dt) - V(t), sampled or not

    std::size_t size() const { return t.size(); }
};

/// Integrates to t_end with a step no larger than dt (t_end / ceil(t_end/dt)).
/// Every sample_every-th step is recorded, plus the final one.
Trajectory simulate(const ClosedLoopSystem& sys, const ModalState& x0, double t_end, double dt,
                    int sample_every = 1);

struct SpectrumReport {
    double abscissa = 0.0;
    std::vector<std::complex<double>> eigenvalues;  // sorted by imaginary, then real part
};

/// Eigenvalues of the closed-loop generator, computed in energy coordinates
/// (Omega q, qdot), which is similar to A_cl.
SpectrumReport spectral_abscissa(const ClosedLoopSystem& sys);

/// Modal energy 1/2 (qdot^T qdot + q^T Omega^2 q).
double modal_energy(const ClosedLoopSystem& sys, const ModalState& s);

struct ProjectedState {
    ModalState state;
    double displacement_residual = 0.0;  // relative, in the mass norm
    double velocity_residual = 0.0;
};

/// Projects sampled displacement and velocity profiles onto the first n modes
/// with the mass inner product rho int f phi + m f(l0) phi(l0).
ProjectedState project_profile(const ModalBasis& basis, int n, const std::function<double(double)>& displacement,
                               const std::function<double(double)>& velocity);

}  // namespace flexbeam
