#include "flexbeam/flexbeam.h"

#include "flexbeam/commands.hpp"
#include "flexbeam/control_cert.hpp"
#include "flexbeam/error.hpp"
#include "flexbeam/run_config.hpp"
#include "flexbeam/spectral.hpp"

#include <cstring>
#include <exception>
#include <new>
#include <string>

struct flexbeam_config {
    flexbeam::RunConfig cfg;
};

struct flexbeam_result {
    flexbeam::CommandResult result;
};

struct flexbeam_basis {
    flexbeam::ModalBasis basis;
};

namespace {

thread_local std::string last_error;

flexbeam_status to_status(flexbeam::ErrorCode code) {
    using flexbeam::ErrorCode;
    switch (code) {
        case ErrorCode::InvalidArgument: return FLEXBEAM_E_INVALID_ARGUMENT;
        case ErrorCode::Precondition: return FLEXBEAM_E_PRECONDITION;
        case ErrorCode::Constraint: return FLEXBEAM_E_CONSTRAINT;
        case ErrorCode::Parse: return FLEXBEAM_E_PARSE;
        case ErrorCode::Numerical: return FLEXBEAM_E_NUMERICAL;
        case ErrorCode::MultipleRoot: return FLEXBEAM_E_MULTIPLE_ROOT;
        case ErrorCode::Io: return FLEXBEAM_E_IO;
    }
    return FLEXBEAM_E_INTERNAL;
}

// Runs fn, translating exceptions into status codes and the thread-local message.
template <class F>
flexbeam_status guarded(F&& fn) {
    try {
        fn();
        last_error.clear();
        return FLEXBEAM_OK;
    } catch (const flexbeam::Error& e) {
        last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        last_error = "out of memory";
    } catch (const std::exception& e) {
        last_error = e.what();
    } catch (...) {
        last_error = "unknown exception";
    }
    return FLEXBEAM_E_INTERNAL;
}

flexbeam_status null_argument(const char* what) {
    last_error = std::string("null argument: ") + what;
    return FLEXBEAM_E_INVALID_ARGUMENT;
}

flexbeam::BeamSystem to_system(const flexbeam_beam_params& p) {
    flexbeam::BeamSystem s;
    s.E = p.E;
    s.I = p.I;
    s.rho = p.rho;
    s.l = p.l;
    s.l0 = p.l0;
    s.m = p.m;
    s.kappa = p.kappa;
    s.alpha0 = p.alpha0;
    return s;
}

}  // namespace

extern "C" {

const char* flexbeam_version(void) { return flexbeam::kVersion; }

const char* flexbeam_last_error(void) { return last_error.c_str(); }

const char* flexbeam_status_name(flexbeam_status status) {
    switch (status) {
        case FLEXBEAM_OK: return "ok";
        case FLEXBEAM_E_INVALID_ARGUMENT: return "invalid_argument";
        case FLEXBEAM_E_PRECONDITION: return "precondition";
        case FLEXBEAM_E_CONSTRAINT: return "constraint";
        case FLEXBEAM_E_PARSE: return "parse";
        case FLEXBEAM_E_NUMERICAL: return "numerical";
        case FLEXBEAM_E_MULTIPLE_ROOT: return "multiple_root";
        case FLEXBEAM_E_IO: return "io";
        case FLEXBEAM_E_INTERNAL: return "internal";
    }
    return "unknown";
}

flexbeam_status flexbeam_config_load(const char* path, flexbeam_config** out) {
    if (!path) return null_argument("path");
    if (!out) return null_argument("out");
    *out = nullptr;
    return guarded([&] { *out = new flexbeam_config{flexbeam::load_config(path)}; });
}

flexbeam_status flexbeam_config_parse(const char* text, flexbeam_config** out) {
    if (!text) return null_argument("text");
    if (!out) return null_argument("out");
    *out = nullptr;
    return guarded([&] { *out = new flexbeam_config{flexbeam::parse_config(text)}; });
}

void flexbeam_config_free(flexbeam_config* cfg) { delete cfg; }

flexbeam_status flexbeam_config_set_output_dir(flexbeam_config* cfg, const char* dir) {
    if (!cfg) return null_argument("cfg");
    if (!dir) return null_argument("dir");
    return guarded([&] { cfg->cfg.output.directory = dir; });
}

flexbeam_status flexbeam_config_set_n_modes(flexbeam_config* cfg, int n_modes) {
    if (!cfg) return null_argument("cfg");
    return guarded([&] {
        flexbeam::require(n_modes >= 1, flexbeam::ErrorCode::InvalidArgument, "n_modes must be >= 1");
        cfg->cfg.spectral.n_modes = n_modes;
    });
}

flexbeam_status flexbeam_config_set_param(flexbeam_config* cfg, const char* name, double value) {
    if (!cfg) return null_argument("cfg");
    if (!name) return null_argument("name");
    return guarded([&] { flexbeam::set_parameter(cfg->cfg, name, value); });
}

flexbeam_status flexbeam_config_get_beam(const flexbeam_config* cfg, flexbeam_beam_params* out) {
    if (!cfg) return null_argument("cfg");
    if (!out) return null_argument("out");
    const flexbeam::BeamSystem& s = cfg->cfg.system;
    *out = {s.E, s.I, s.rho, s.l, s.l0, s.m, s.kappa, s.alpha0};
    last_error.clear();
    return FLEXBEAM_OK;
}

flexbeam_status flexbeam_config_serialize(const flexbeam_config* cfg, char* buf, size_t cap, size_t* needed) {
    if (!cfg) return null_argument("cfg");
    return guarded([&] {
        const std::string text = flexbeam::serialize_config(cfg->cfg);
        if (needed) *needed = text.size() + 1;
        flexbeam::require(buf != nullptr && cap > text.size(), flexbeam::ErrorCode::InvalidArgument,
                          "buffer too small for serialized config");
        std::memcpy(buf, text.c_str(), text.size() + 1);
    });
}

flexbeam_status flexbeam_config_hash(const flexbeam_config* cfg, char out[17]) {
    if (!cfg) return null_argument("cfg");
    if (!out) return null_argument("out");
    return guarded([&] {
        const std::string h = flexbeam::config_hash(cfg->cfg);
        std::memcpy(out, h.c_str(), 17);
    });
}

flexbeam_status flexbeam_run(const flexbeam_config* cfg, const char* command, const char* sweep_param,
                             double sweep_from, double sweep_to, long sweep_steps, flexbeam_result** out) {
    if (!cfg) return null_argument("cfg");
    if (!command) return null_argument("command");
    if (!out) return null_argument("out");
    *out = nullptr;
    return guarded([&] {
        flexbeam::SweepSpec sweep;
        if (std::strcmp(command, "sweep") == 0) {
            flexbeam::require(sweep_param != nullptr && *sweep_param != '\0', flexbeam::ErrorCode::InvalidArgument,
                              "sweep needs a parameter name");
            sweep = {sweep_param, sweep_from, sweep_to, sweep_steps};
        }
        *out = new flexbeam_result{flexbeam::run_command(command, cfg->cfg, sweep)};
    });
}

int flexbeam_result_exit_code(const flexbeam_result* result) { return result ? result->result.exit_code : -1; }

const char* flexbeam_result_summary(const flexbeam_result* result) {
    return result ? result->result.summary.c_str() : "";
}

size_t flexbeam_result_file_count(const flexbeam_result* result) { return result ? result->result.files.size() : 0; }

const char* flexbeam_result_file(const flexbeam_result* result, size_t i) {
    if (!result || i >= result->result.files.size()) return nullptr;
    return result->result.files[i].c_str();
}

void flexbeam_result_free(flexbeam_result* result) { delete result; }

flexbeam_status flexbeam_phi0(double mu, double l, double l0, double* out) {
    if (!out) return null_argument("out");
    return guarded([&] { *out = flexbeam::phi0(mu, l, l0); });
}

flexbeam_status flexbeam_phi_full(double mu, const flexbeam_beam_params* p, double* out) {
    if (!p) return null_argument("p");
    if (!out) return null_argument("out");
    return guarded([&] { *out = flexbeam::phi_full(mu, to_system(*p)); });
}

flexbeam_status flexbeam_det_k(const flexbeam_beam_params* p, double* numeric, double* closed_form, double* ratio) {
    if (!p) return null_argument("p");
    return guarded([&] {
        const flexbeam::DetKCheck d = flexbeam::det_K_check(to_system(*p));
        if (numeric) *numeric = d.numeric;
        if (closed_form) *closed_form = d.closed_form;
        if (ratio) *ratio = d.ratio;
    });
}

flexbeam_status flexbeam_basis_build(const flexbeam_beam_params* p, int n_modes, flexbeam_basis** out) {
    if (!p) return null_argument("p");
    if (!out) return null_argument("out");
    *out = nullptr;
    return guarded([&] {
        flexbeam::require(n_modes >= 1, flexbeam::ErrorCode::InvalidArgument, "n_modes must be >= 1");
        flexbeam::BasisOptions opts;
        opts.n_modes = n_modes;
        *out = new flexbeam_basis{flexbeam::build_basis(to_system(*p), opts)};
    });
}

void flexbeam_basis_free(flexbeam_basis* basis) { delete basis; }

size_t flexbeam_basis_size(const flexbeam_basis* basis) { return basis ? basis->basis.size() : 0; }

flexbeam_status flexbeam_basis_mode(const flexbeam_basis* basis, size_t j, double* mu, double* omega, double* phi_l0) {
    if (!basis) return null_argument("basis");
    return guarded([&] {
        flexbeam::require(j >= 1 && j <= basis->basis.size(), flexbeam::ErrorCode::InvalidArgument,
                          "mode index out of range");
        const flexbeam::ModeShape& m = basis->basis.modes[j - 1];
        if (mu) *mu = m.mu();
        if (omega) *omega = m.omega();
        if (phi_l0) *phi_l0 = m.at_l0();
    });
}

flexbeam_status flexbeam_basis_eval(const flexbeam_basis* basis, size_t j, double x, int derivative, double* out) {
    if (!basis) return null_argument("basis");
    if (!out) return null_argument("out");
    return guarded([&] {
        flexbeam::require(j >= 1 && j <= basis->basis.size(), flexbeam::ErrorCode::InvalidArgument,
                          "mode index out of range");
        flexbeam::require(derivative >= 0 && derivative <= 3, flexbeam::ErrorCode::InvalidArgument,
                          "derivative must be 0..3");
        *out = basis->basis.modes[j - 1].eval(x, derivative);
    });
}

flexbeam_status flexbeam_basis_orthogonality_error(const flexbeam_basis* basis, double* out) {
    if (!basis) return null_argument("basis");
    if (!out) return null_argument("out");
    return guarded([&] { *out = flexbeam::orthogonality_error(basis->basis); });
}

}  // extern "C"
