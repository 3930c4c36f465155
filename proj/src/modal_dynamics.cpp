#include "flexbeam/modal_dynamics.hpp"

#include "flexbeam/error.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace flexbeam {

namespace {

// values of each mode (rows) at each quadrature node (columns)
Eigen::MatrixXd tabulate(const ModalBasis& basis, int n, const QuadratureRule& rule, int deriv) {
    const auto& xs = rule.nodes();
    Eigen::MatrixXd t(n, static_cast<Eigen::Index>(xs.size()));
    for (int i = 0; i < n; ++i)
        for (std::size_t p = 0; p < xs.size(); ++p) t(i, static_cast<Eigen::Index>(p)) = basis.modes[i].eval(xs[p], deriv);
    return t;
}

Eigen::Map<const Eigen::VectorXd> weights_of(const QuadratureRule& rule) {
    return {rule.weights().data(), static_cast<Eigen::Index>(rule.weights().size())};
}

}  // namespace

ClosedLoopSystem make_closed_loop(const Eigen::VectorXd& omega, const Eigen::MatrixXd& B, const Eigen::VectorXd& c,
                                  const Eigen::VectorXd& alphas, double alpha0) {
    const auto n = omega.size();
    require(n >= 1 && B.rows() == n && c.size() == n && B.cols() == alphas.size(), ErrorCode::InvalidArgument,
            "make_closed_loop: dimension mismatch");
    require((omega.array() > 0.0).all() && omega.allFinite(), ErrorCode::InvalidArgument,
            "make_closed_loop: frequencies must be positive");
    require((alphas.array() >= 0.0).all() && alpha0 >= 0.0, ErrorCode::InvalidArgument,
            "make_closed_loop: gains must be >= 0");
    ClosedLoopSystem sys;
    sys.n = static_cast<int>(n);
    sys.k = static_cast<int>(alphas.size());
    sys.omega = omega;
    sys.omega2 = omega.array().square();
    sys.B = B;
    sys.c = c;
    sys.alphas = alphas;
    sys.alpha0 = alpha0;
    sys.D = B * alphas.asDiagonal() * B.transpose() + alpha0 * c * c.transpose();
    sys.D = (0.5 * (sys.D + sys.D.transpose())).eval();
    return sys;
}

ClosedLoopSystem assemble(const ModalBasis& basis, std::span<const Actuator> actuators, double alpha0, int n,
                          const AssemblyOptions& opts) {
    require(n >= 1 && static_cast<std::size_t>(n) <= basis.size(), ErrorCode::Precondition,
            "assemble: n must be in [1, basis size]");
    const BeamSystem& bs = basis.system;
    BeamSystem with_gain = bs;
    with_gain.alpha0 = alpha0;
    const ValidationReport rep = validate_system(with_gain, actuators);
    require(rep.valid(), ErrorCode::Constraint,
            "assemble: invalid configuration: " + (rep.valid() ? std::string() : rep.violations.front().message));

    const QuadratureRule rule = basis.quadrature(actuators, static_cast<std::size_t>(n), opts.quad_order);
    const auto w = weights_of(rule);
    const Eigen::MatrixXd phi = tabulate(basis, n, rule, 0);
    const Eigen::MatrixXd curv = tabulate(basis, n, rule, 2);

    const int k = static_cast<int>(actuators.size());
    Eigen::VectorXd omega(n), c(n);
    for (int i = 0; i < n; ++i) {
        omega(i) = basis.modes[i].omega();
        c(i) = basis.modes[i].at_l0();
    }

    // mass and stiffness self-test: the modal reduction is only exact for an
    // orthonormal basis satisfying the stiffness identity
    const Eigen::MatrixXd mass = bs.rho * phi * w.asDiagonal() * phi.transpose() + bs.m * c * c.transpose();
    const Eigen::MatrixXd stiff = bs.EI() * curv * w.asDiagonal() * curv.transpose() + bs.kappa * c * c.transpose();
    double mass_err = 0.0, stiff_err = 0.0;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            mass_err = std::max(mass_err, std::abs(mass(i, j) - (i == j ? 1.0 : 0.0)));
            const double target = i == j ? omega(i) * omega(i) : 0.0;
            stiff_err = std::max(stiff_err, std::abs(stiff(i, j) - target) / (omega(i) * omega(j)));
        }
    if (mass_err > opts.orthogonality_tol || stiff_err > opts.stiffness_tol) {
        std::ostringstream msg;
        msg << "assemble: basis self-test failed (orthogonality error " << mass_err << ", stiffness error "
            << stiff_err << ")";
        fail(ErrorCode::Numerical, msg.str());
    }

    Eigen::MatrixXd B(n, k);
    Eigen::VectorXd alphas(k);
    for (int j = 0; j < k; ++j) {
        const Actuator& a = actuators[static_cast<std::size_t>(j)];
        alphas(j) = a.alpha;
        Eigen::VectorXd chi(rule.nodes().size());
        for (std::size_t p = 0; p < rule.nodes().size(); ++p)
            chi(static_cast<Eigen::Index>(p)) = actuator_profile(a, rule.nodes()[p]);
        B.col(j) = phi * (w.array() * chi.array()).matrix();
    }
    return make_closed_loop(omega, B, c, alphas, alpha0);
}

Eigen::VectorXd feedback(const ClosedLoopSystem& sys, const ModalState& state) {
    require(state.qdot.size() == sys.n, ErrorCode::InvalidArgument, "feedback: state dimension mismatch");
    Eigen::VectorXd y(sys.k + 1);
    y.head(sys.k) = -(sys.alphas.array() * (sys.B.transpose() * state.qdot).array()).matrix();
    y(sys.k) = -sys.alpha0 * sys.c.dot(state.qdot);
    return y;
}

Eigen::MatrixXd first_order_matrix(const ClosedLoopSystem& sys) {
    const int n = sys.n;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    a.topRightCorner(n, n).setIdentity();
    a.bottomLeftCorner(n, n) = -sys.omega2.asDiagonal().toDenseMatrix();
    a.bottomRightCorner(n, n) = -sys.D;
    return a;
}

namespace {

// generator in energy coordinates z = (Omega q, qdot)
Eigen::MatrixXd energy_generator(const ClosedLoopSystem& sys) {
    const int n = sys.n;
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(2 * n, 2 * n);
    a.topRightCorner(n, n) = sys.omega.asDiagonal().toDenseMatrix();
    a.bottomLeftCorner(n, n) = -sys.omega.asDiagonal().toDenseMatrix();
    a.bottomRightCorner(n, n) = -sys.D;
    return a;
}

}  // namespace

MidpointStepper::MidpointStepper(const ClosedLoopSystem& sys, double dt) : n_(sys.n), dt_(dt) {
    require(std::isfinite(dt) && dt > 0.0, ErrorCode::InvalidArgument, "step: dt must be > 0");
    // Extended precision keeps the propagator's rounding from biasing the energy over long runs.
    const MatrixXl a = energy_generator(sys).cast<long double>();
    const MatrixXl id = MatrixXl::Identity(2 * n_, 2 * n_);
    const long double h = dt;
    Eigen::PartialPivLU<MatrixXl> lu(id - 0.5L * h * a);
    propagator_ = lu.solve(id + 0.5L * h * a);
    require(propagator_.allFinite(), ErrorCode::Numerical, "step: midpoint linear solve failed");
    omega_ = sys.omega.cast<long double>();
}

ModalState MidpointStepper::step(const ModalState& s) const {
    require(s.q.size() == n_ && s.qdot.size() == n_, ErrorCode::InvalidArgument, "step: state dimension mismatch");
    VectorXl z(2 * n_);
    z.head(n_) = omega_.cwiseProduct(s.q.cast<long double>());
    z.tail(n_) = s.qdot.cast<long double>();
    const VectorXl zn = propagator_ * z;
    ModalState out;
    out.q = zn.head(n_).cwiseQuotient(omega_).cast<double>();
    out.qdot = zn.tail(n_).cast<double>();
    out.t = s.t + dt_;
    return out;
}

ModalState step(const ClosedLoopSystem& sys, const ModalState& state, double dt) {
    return MidpointStepper(sys, dt).step(state);
}

double modal_energy(const ClosedLoopSystem& sys, const ModalState& s) {
    return 0.5 * (s.qdot.squaredNorm() + s.q.dot(sys.omega2.cwiseProduct(s.q)));
}

Trajectory simulate(const ClosedLoopSystem& sys, const ModalState& x0, double t_end, double dt, int sample_every) {
    require(std::isfinite(t_end) && t_end > 0.0, ErrorCode::InvalidArgument, "simulate: t_end must be > 0");
    require(std::isfinite(dt) && dt > 0.0, ErrorCode::InvalidArgument, "simulate: dt must be > 0");
    require(sample_every >= 1, ErrorCode::InvalidArgument, "simulate: sample_every must be >= 1");
    require(x0.q.size() == sys.n && x0.qdot.size() == sys.n, ErrorCode::InvalidArgument,
            "simulate: initial state dimension mismatch");
    require(x0.q.allFinite() && x0.qdot.allFinite(), ErrorCode::InvalidArgument, "simulate: non-finite initial state");

    const auto steps = static_cast<long>(std::ceil(t_end / dt - 1e-9));
    const double h = t_end / static_cast<double>(steps);
    const MidpointStepper stepper(sys, h);

    Trajectory tr;
    tr.dt = h;
    const auto record = [&](const ModalState& s, double v) {
        tr.t.push_back(s.t);
        tr.states.push_back(s);
        tr.V.push_back(v);
        tr.controls.push_back(feedback(sys, s));
        tr.w_l0.push_back(sys.c.dot(s.q));
        tr.v_l0.push_back(sys.c.dot(s.qdot));
    };

    ModalState s = x0;
    s.t = 0.0;
    double v = modal_energy(sys, s);
    record(s, v);
    for (long i = 1; i <= steps; ++i) {
        ModalState next = stepper.step(s);
        next.t = static_cast<double>(i) * h;
        require(next.q.allFinite() && next.qdot.allFinite(), ErrorCode::Numerical, "simulate: non-finite state");
        const double vn = modal_energy(sys, next);
        tr.max_step_increase = std::max(tr.max_step_increase, vn - v);
        s = std::move(next);
        v = vn;
        if (i % sample_every == 0 || i == steps) record(s, v);
    }
    return tr;
}

SpectrumReport spectral_abscissa(const ClosedLoopSystem& sys) {
    const Eigen::MatrixXd a = energy_generator(sys);
    Eigen::EigenSolver<Eigen::MatrixXd> es(a, false);
    require(es.info() == Eigen::Success, ErrorCode::Numerical, "spectral_abscissa: eigen-solver did not converge");
    SpectrumReport rep;
    const auto& ev = es.eigenvalues();
    rep.eigenvalues.assign(ev.data(), ev.data() + ev.size());
    std::sort(rep.eigenvalues.begin(), rep.eigenvalues.end(), [](auto x, auto y) {
        if (x.imag() != y.imag()) return x.imag() < y.imag();
        return x.real() < y.real();
    });
    rep.abscissa = -std::numeric_limits<double>::infinity();
    for (const auto& e : rep.eigenvalues) rep.abscissa = std::max(rep.abscissa, e.real());
    return rep;
}

ProjectedState project_profile(const ModalBasis& basis, int n, const std::function<double(double)>& displacement,
                               const std::function<double(double)>& velocity) {
    require(n >= 1 && static_cast<std::size_t>(n) <= basis.size(), ErrorCode::Precondition,
            "project_profile: n must be in [1, basis size]");
    const BeamSystem& bs = basis.system;
    const QuadratureRule rule = basis.quadrature({}, static_cast<std::size_t>(n));
    const auto w = weights_of(rule);
    const Eigen::MatrixXd phi = tabulate(basis, n, rule, 0);
    Eigen::VectorXd c(n);
    for (int i = 0; i < n; ++i) c(i) = basis.modes[i].at_l0();

    const auto project = [&](const std::function<double(double)>& f, Eigen::VectorXd& coef) {
        Eigen::VectorXd vals(rule.nodes().size());
        for (std::size_t p = 0; p < rule.nodes().size(); ++p) vals(static_cast<Eigen::Index>(p)) = f(rule.nodes()[p]);
        const double f0 = f(bs.l0);
        coef = bs.rho * phi * (w.array() * vals.array()).matrix() + bs.m * f0 * c;
        const double total = bs.rho * (w.array() * vals.array().square()).sum() + bs.m * f0 * f0;
        // Bessel: ||f - P f||^2 = ||f||^2 - ||coef||^2 for an orthonormal family
        const double rest = std::max(0.0, total - coef.squaredNorm());
        return total > 0.0 ? std::sqrt(rest / total) : 0.0;
    };

    ProjectedState out;
    out.state = ModalState::zero(n);
    out.displacement_residual = project(displacement, out.state.q);
    out.velocity_residual = project(velocity, out.state.qdot);
    return out;
}

}  // namespace flexbeam
