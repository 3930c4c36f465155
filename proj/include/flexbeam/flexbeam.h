#ifndef FLEXBEAM_H
#define FLEXBEAM_H

#include <stddef.h>

#if defined(FLEXBEAM_BUILDING_LIBRARY)
#define FLEXBEAM_API __attribute__((visibility("default")))
#else
#define FLEXBEAM_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum flexbeam_status {
    FLEXBEAM_OK = 0,
    FLEXBEAM_E_INVALID_ARGUMENT = 1,
    FLEXBEAM_E_PRECONDITION = 2,
    FLEXBEAM_E_CONSTRAINT = 3,
    FLEXBEAM_E_PARSE = 4,
    FLEXBEAM_E_NUMERICAL = 5,
    FLEXBEAM_E_MULTIPLE_ROOT = 6,
    FLEXBEAM_E_IO = 7,
    FLEXBEAM_E_INTERNAL = 8
} flexbeam_status;

/* Beam, shaker and feedback gain, SI units. */
typedef struct flexbeam_beam_params {
    double E, I, rho, l;
    double l0, m, kappa, alpha0;
} flexbeam_beam_params;

typedef struct flexbeam_config flexbeam_config;
typedef struct flexbeam_result flexbeam_result;
typedef struct flexbeam_basis flexbeam_basis;

FLEXBEAM_API const char* flexbeam_version(void);
/* Message of the last failing call on this thread; empty after success. */
FLEXBEAM_API const char* flexbeam_last_error(void);
FLEXBEAM_API const char* flexbeam_status_name(flexbeam_status status);

/* ---- configuration ---- */
FLEXBEAM_API flexbeam_status flexbeam_config_load(const char* path, flexbeam_config** out);
FLEXBEAM_API flexbeam_status flexbeam_config_parse(const char* text, flexbeam_config** out);
FLEXBEAM_API void flexbeam_config_free(flexbeam_config* cfg);
FLEXBEAM_API flexbeam_status flexbeam_config_set_output_dir(flexbeam_config* cfg, const char* dir);
FLEXBEAM_API flexbeam_status flexbeam_config_set_n_modes(flexbeam_config* cfg, int n_modes);
/* Sets a sweepable scalar such as "shaker.alpha0" or "actuator[1].center". */
FLEXBEAM_API flexbeam_status flexbeam_config_set_param(flexbeam_config* cfg, const char* name, double value);
FLEXBEAM_API flexbeam_status flexbeam_config_get_beam(const flexbeam_config* cfg, flexbeam_beam_params* out);
/* Copies the effective config text (NUL-terminated) into buf when it fits;
   *needed receives the size including the terminator. */
FLEXBEAM_API flexbeam_status flexbeam_config_serialize(const flexbeam_config* cfg, char* buf, size_t cap,
                                                       size_t* needed);
/* 16 hex digits plus terminator. */
FLEXBEAM_API flexbeam_status flexbeam_config_hash(const flexbeam_config* cfg, char out[17]);

/* ---- commands ---- */
/* command: validate, spectrum, modes, certify, simulate or sweep. The sweep
   arguments are ignored by other commands (pass NULL, 0, 0, 0). On
   FLEXBEAM_OK the result carries the process exit code and summary text. */
FLEXBEAM_API flexbeam_status flexbeam_run(const flexbeam_config* cfg, const char* command, const char* sweep_param,
                                          double sweep_from, double sweep_to, long sweep_steps,
                                          flexbeam_result** out);
FLEXBEAM_API int flexbeam_result_exit_code(const flexbeam_result* result);
FLEXBEAM_API const char* flexbeam_result_summary(const flexbeam_result* result);
FLEXBEAM_API size_t flexbeam_result_file_count(const flexbeam_result* result);
FLEXBEAM_API const char* flexbeam_result_file(const flexbeam_result* result, size_t i);
FLEXBEAM_API void flexbeam_result_free(flexbeam_result* result);

/* ---- numerics ---- */
FLEXBEAM_API flexbeam_status flexbeam_phi0(double mu, double l, double l0, double* out);
FLEXBEAM_API flexbeam_status flexbeam_phi_full(double mu, const flexbeam_beam_params* p, double* out);
/* Numeric determinant of K, the closed form, and their ratio. */
FLEXBEAM_API flexbeam_status flexbeam_det_k(const flexbeam_beam_params* p, double* numeric, double* closed_form,
                                            double* ratio);

FLEXBEAM_API flexbeam_status flexbeam_basis_build(const flexbeam_beam_params* p, int n_modes,
                                                  flexbeam_basis** out);
FLEXBEAM_API void flexbeam_basis_free(flexbeam_basis* basis);
FLEXBEAM_API size_t flexbeam_basis_size(const flexbeam_basis* basis);
/* j is 1-based. */
FLEXBEAM_API flexbeam_status flexbeam_basis_mode(const flexbeam_basis* basis, size_t j, double* mu, double* omega,
                                                 double* phi_l0);
FLEXBEAM_API flexbeam_status flexbeam_basis_eval(const flexbeam_basis* basis, size_t j, double x, int derivative,
                                                 double* out);
FLEXBEAM_API flexbeam_status flexbeam_basis_orthogonality_error(const flexbeam_basis* basis, double* out);

#ifdef __cplusplus
}
#endif

#endif
