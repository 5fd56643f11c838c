/* C interface to the zlab core. Every call returns a zlab_status; on failure
 * zlab_last_error() describes the problem for the calling thread. Handles are
 * opaque and released with the matching *_destroy function. */
#ifndef ZLAB_H
#define ZLAB_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define ZLAB_API __declspec(dllexport)
#else
#define ZLAB_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum zlab_status {
  ZLAB_OK = 0,
  ZLAB_E_EMPTY_OR_FULL_SET,
  ZLAB_E_SCALE_RANGE_TOO_NARROW,
  ZLAB_E_EMPTY_SET,
  ZLAB_E_INVALID_RATIO,
  ZLAB_E_DIVERGENT,
  ZLAB_E_UNSUPPORTED_SPACE,
  ZLAB_E_SCALE_UNRESOLVABLE,
  ZLAB_E_SUPPORT_VIOLATION,
  ZLAB_E_UNRESOLVED_SINGULARITY,
  ZLAB_E_GRID_MISMATCH,
  ZLAB_E_NOT_STEP_FUNCTION,
  ZLAB_E_BUDGET_VIOLATION,
  ZLAB_E_NOT_CARLESON,
  ZLAB_E_NO_SINGULAR_FREQUENCY,
  ZLAB_E_CONFIG,
  ZLAB_E_AUDIT_FAILURE,
  ZLAB_E_INVALID_ARGUMENT,
  ZLAB_E_NULL_ARGUMENT,
  ZLAB_E_INTERNAL
} zlab_status;

typedef enum zlab_char_kind { ZLAB_CHAR_AP = 0, ZLAB_CHAR_A1, ZLAB_CHAR_AINF, ZLAB_CHAR_RH } zlab_char_kind;

typedef struct zlab_signal zlab_signal;
typedef struct zlab_singular_set zlab_singular_set;
typedef struct zlab_weight zlab_weight;

ZLAB_API const char* zlab_version(void);
ZLAB_API const char* zlab_last_error(void);
ZLAB_API const char* zlab_status_name(zlab_status s);
ZLAB_API zlab_status zlab_set_threads(unsigned k);

/* Sampled signal on [a,b) with n (a power of two) samples; im may be NULL. */
ZLAB_API zlab_status zlab_signal_create(const double* re, const double* im, size_t n, double a, double b,
                                        zlab_signal** out);
ZLAB_API void zlab_signal_destroy(zlab_signal* f);
ZLAB_API size_t zlab_signal_size(const zlab_signal* f);
/* Copies the samples into re/im, each of length zlab_signal_size(f); im may be NULL. */
ZLAB_API zlab_status zlab_signal_samples(const zlab_signal* f, double* re, double* im);
ZLAB_API zlab_status zlab_signal_norm2(const zlab_signal* f, double* out);

ZLAB_API zlab_status zlab_singular_set_create(const double* points, size_t n, double window_a, double window_b,
                                              zlab_singular_set** out);
ZLAB_API zlab_status zlab_singular_set_lacunary(double gamma, int tau, double theta, int depth, double window_a,
                                                double window_b, zlab_singular_set** out);
/* {"generator": ..., "points": [...], "window": [a, b]} */
ZLAB_API zlab_status zlab_singular_set_from_json(const char* text, zlab_singular_set** out);
ZLAB_API void zlab_singular_set_destroy(zlab_singular_set* xi);
ZLAB_API size_t zlab_singular_set_size(const zlab_singular_set* xi);
ZLAB_API zlab_status zlab_singular_set_points(const zlab_singular_set* xi, double* out);

/* Luxemburg average of |f| over [a,b) in the space Y_{p,s}. */
ZLAB_API zlab_status zlab_local_average(const zlab_signal* f, double a, double b, double p, double s,
                                        double* out);
/* T_m f with m given on the DFT slots of f's grid. */
ZLAB_API zlab_status zlab_apply_multiplier(const zlab_signal* f, const double* m_re, const double* m_im,
                                           zlab_signal** out);
/* (Σ_ω |T_{𝟙_ω} f|^2)^{1/2} over the components of ℝ∖Ξ. */
ZLAB_API zlab_status zlab_rough_square_function(const zlab_singular_set* xi, const zlab_signal* f,
                                                zlab_signal** out);
/* Lower bound on the Zygmund constant of the frequency set k in Y_{p,s}. */
ZLAB_API zlab_status zlab_zygmund_constant(const int64_t* k, size_t n, double p, double s, uint64_t seed,
                                           double* out);

ZLAB_API zlab_status zlab_weight_create(const double* w, size_t n, double a, double b, zlab_weight** out);
ZLAB_API void zlab_weight_destroy(zlab_weight* w);
ZLAB_API zlab_status zlab_weight_characteristic(const zlab_weight* w, zlab_char_kind kind, double param,
                                                double* out);

/* Dyadic intervals given as parallel arrays (generation, position, grid shift). */
ZLAB_API zlab_status zlab_is_sparse(const int* n, const int64_t* k, const int* shift, size_t count, double eta,
                                    int* sparse, double* packing);

ZLAB_API size_t zlab_command_count(void);
ZLAB_API const char* zlab_command_name(size_t i);
/* Runs one experiment and writes its reports to out_dir. Returns the process
 * exit code: 0 success, 1 config error, 2 audit failure. diag (may be NULL)
 * receives a NUL-terminated diagnostic truncated to diag_cap bytes. */
ZLAB_API int zlab_run(const char* command, const char* config_path, const char* out_dir, int has_seed,
                      uint64_t seed, unsigned threads, char* diag, size_t diag_cap);

#ifdef __cplusplus
}
#endif

#endif
