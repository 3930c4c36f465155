#pragma once

#include "flexbeam/core_model.hpp"

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace flexbeam {

struct SpectralSettings {
    double mu_max = 0.0;     // 0: grow until n_modes roots are found
    double grid_step = 0.0;  // 0: pi / (10 l)
    int n_modes = 10;
    double root_tol = 1e-6;
    long p1 = 0;  // optional l0/l = p1/p2 for the phi0 period report
    long p2 = 0;
    int quad_order = 16;
};

struct SimSettings {
    double t_end = 10.0;
    double dt = 1e-3;
    // named profile ("first_mode_displacement"), or empty when q0 lists modal amplitudes
    std::string initial_profile = "first_mode_displacement";
    std::vector<double> q0;
    std::vector<double> qdot0;  // optional initial modal velocities
    int sample_every = 1;
};

struct OutputSettings {
    std::string directory = ".";
    int precision = 17;
};

struct RunConfig {
    BeamSystem system;  // beam {E, I, rho, l} and shaker {m, kappa, l0, alpha0}
    std::vector<Actuator> actuators;
    SpectralSettings spectral;
    SimSettings sim;
    OutputSettings output;
};

/// Parses INI-style text: [beam], [shaker], repeated [actuator], [spectral],
/// [sim], [output]. Throws Error(Parse) naming source, line and key.
RunConfig parse_config(std::string_view text, std::string_view source = "<config>");
RunConfig load_config(const std::string& path);

/// Canonical text with every default materialized; parse_config(serialize(c)) == c.
std::string serialize_config(const RunConfig& cfg);

/// FNV-1a 64 of serialize_config with output.directory blanked, as 16 lowercase hex digits.
std::string config_hash(const RunConfig& cfg);

/// validate_system plus range checks on the run settings.
ValidationReport validate_config(const RunConfig& cfg);

bool operator==(const RunConfig& a, const RunConfig& b);

}  // namespace flexbeam
