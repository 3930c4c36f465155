#pragma once

#include "flexbeam/core_model.hpp"

namespace flexbeam::testing {

// Unit-stiffness, unit-density beam of length 1 with a shaker at l0.
inline BeamSystem unit_beam(double l0 = 0.5, double m = 0.1, double kappa = 10.0, double alpha0 = 0.0) {
    BeamSystem s;
    s.E = 1.0;
    s.I = 1.0;
    s.rho = 1.0;
    s.l = 1.0;
    s.l0 = l0;
    s.m = m;
    s.kappa = kappa;
    s.alpha0 = alpha0;
    return s;
}

// Shaker so light and soft that the beam behaves as plain simply supported.
inline BeamSystem pure_beam_limit(double l0 = 0.5) { return unit_beam(l0, 1e-12, 1e-12); }

}  // namespace flexbeam::testing
