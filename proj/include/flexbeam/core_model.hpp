#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace flexbeam {

/// Physical parameters of the beam and the spring-mass shaker. SI units.
struct BeamSystem {
    double E = 0.0;      // Young modulus [Pa]
    double I = 0.0;      // second moment of area [m^4]
    double rho = 0.0;    // linear mass density [kg/m]
    double l = 0.0;      // beam length [m]
    double l0 = 0.0;     // shaker attachment coordinate [m]
    double m = 0.0;      // shaker moving mass [kg]
    double kappa = 0.0;  // shaker stiffness [N/m]
    double alpha0 = 0.0; // shaker velocity feedback gain [N s/m]

    double EI() const { return E * I; }
    /// sqrt(EI/rho); omega = wave_speed() * mu^2.
    double wave_speed() const;
};

/// Piezo actuator, stored through its curvature influence profile chi = psi''.
/// The profile is a raised-cosine bump of the given height over
/// [center - width/2, center + width/2].
struct Actuator {
    double center = 0.0;
    double width = 0.0;
    double height = 1.0;
    double alpha = 0.0;

    double support_lo() const { return center - 0.5 * width; }
    double support_hi() const { return center + 0.5 * width; }
};

struct Violation {
    std::string key;      // offending parameter, e.g. "shaker.l0" or "actuator[2].width"
    std::string message;
};

struct ValidationReport {
    std::vector<Violation> violations;
    bool valid() const { return violations.empty(); }
};

ValidationReport validate_system(const BeamSystem& sys, std::span<const Actuator> actuators);

double actuator_profile(const Actuator& a, double x);

/// Composite Gauss-Legendre rule on [0, l]. Panels are split at every
/// breakpoint and then subdivided evenly until no panel exceeds
/// max_panel_width.
class QuadratureRule {
public:
    QuadratureRule(double l, std::vector<double> breakpoints, int order = 16,
                   double max_panel_width = 0.0);

    /// Breakpoints at 0, l0, l and every actuator support edge.
    static QuadratureRule for_system(const BeamSystem& sys, std::span<const Actuator> actuators,
                                     int order = 16, double max_panel_width = 0.0);

    template <class F>
    double integrate(F&& f) const {
        double sum = 0.0;
        for (std::size_t i = 0; i < nodes_.size(); ++i) sum += weights_[i] * f(nodes_[i]);
        return sum;
    }

    double length() const { return l_; }
    int order() const { return order_; }
    const std::vector<double>& breakpoints() const { return breakpoints_; }
    const std::vector<double>& panel_edges() const { return edges_; }
    const std::vector<double>& nodes() const { return nodes_; }
    const std::vector<double>& weights() const { return weights_; }

private:
    double l_;
    int order_;
    std::vector<double> breakpoints_;
    std::vector<double> edges_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

/// Gauss-Legendre nodes and weights on [-1, 1], ascending.
void gauss_legendre(int order, std::vector<double>& nodes, std::vector<double>& weights);

}  // namespace flexbeam
