/* surfdk — stochastic particle dynamics and fluctuating-hydrodynamics
 * finite-volume solvers on Monge-gauge surfaces.
 *
 * C interface of the shared library. All functions return a status code;
 * results travel through out-parameters. Handles are opaque and must be
 * released with the matching _destroy call. surfdk_last_error() carries the
 * message of the most recent failure on the calling thread.
 */

#ifndef SURFDK_H
#define SURFDK_H

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define SURFDK_API __declspec(dllexport)
#else
#define SURFDK_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum surfdk_status {
    SURFDK_OK = 0,
    SURFDK_ERR_INVALID_ARGUMENT = 1,
    SURFDK_ERR_CONFIG = 2,
    SURFDK_ERR_DIMENSION = 3,
    SURFDK_ERR_SIZE_GUARD = 4,
    SURFDK_ERR_BLOWUP = 5,
    SURFDK_ERR_NO_CONVERGENCE = 6,
    SURFDK_ERR_IO = 7,
    SURFDK_ERR_INTERNAL = 8
} surfdk_status;

SURFDK_API const char* surfdk_version(void);
SURFDK_API const char* surfdk_status_name(surfdk_status status);
/* Message of the last error raised on this thread ("" if none). */
SURFDK_API const char* surfdk_last_error(void);

/* ---- surfaces and grids -------------------------------------------- */

typedef struct surfdk_surface surfdk_surface;
typedef struct surfdk_grid surfdk_grid;

/* kind: "sinusoidal_a" (H = a sin x sin y) or "four_peak_b"
 * (H = a sin^2 x sin^2 y), both periodic on [0,2pi)^2. */
SURFDK_API surfdk_status surfdk_surface_create(const char* kind, double amplitude,
                                               surfdk_surface** out);
SURFDK_API void surfdk_surface_destroy(surfdk_surface* surface);

typedef struct surfdk_metric_sample {
    double p, q;              /* height slopes */
    double s;                 /* det G = 1 + p^2 + q^2 */
    double sqrt_det;          /* sqrt(det G) */
    double g_inv[3];          /* G^{-1} upper triangle: xx, xy, yy */
    double g_inv_sqrt[3];     /* symmetric G^{-1/2}: xx, xy, yy */
    double drift[2];          /* b = (1/sqrt|G|) div(sqrt|G| G^{-1}) */
} surfdk_metric_sample;

SURFDK_API surfdk_status surfdk_surface_metric_at(const surfdk_surface* surface, double x,
                                                  double y, surfdk_metric_sample* out);

SURFDK_API surfdk_status surfdk_grid_create(const surfdk_surface* surface, int cells_x,
                                            int cells_y, surfdk_grid** out);
SURFDK_API void surfdk_grid_destroy(surfdk_grid* grid);
SURFDK_API surfdk_status surfdk_grid_surface_area(const surfdk_grid* grid, double* out);
SURFDK_API surfdk_status surfdk_grid_cell_metric(const surfdk_grid* grid, int i, int j,
                                                 surfdk_metric_sample* out);
/* Explicit-Euler stability bound of the deterministic finite-volume operator. */
SURFDK_API surfdk_status surfdk_grid_max_dt(const surfdk_grid* grid, double* out);

/* ---- finite-volume chain ------------------------------------------- */

typedef struct surfdk_fvm_chain surfdk_fvm_chain;

/* v0 selects the built-in external potential v0 sin^2 x sin^2 y (0 = none). */
SURFDK_API surfdk_status surfdk_fvm_create(const surfdk_grid* grid, long long n_particles,
                                           uint64_t seed, int noise_enabled, double v0,
                                           surfdk_fvm_chain** out);
SURFDK_API void surfdk_fvm_destroy(surfdk_fvm_chain* chain);
/* rho: cells_x * cells_y values, row index i fastest. */
SURFDK_API surfdk_status surfdk_fvm_set_density(surfdk_fvm_chain* chain, const double* rho,
                                                size_t len);
SURFDK_API surfdk_status surfdk_fvm_get_density(const surfdk_fvm_chain* chain, double* rho,
                                                size_t len);
SURFDK_API surfdk_status surfdk_fvm_step(surfdk_fvm_chain* chain, double dt, long long steps);
SURFDK_API surfdk_status surfdk_fvm_mass(const surfdk_fvm_chain* chain, double* out);
SURFDK_API surfdk_status surfdk_fvm_negativity_events(const surfdk_fvm_chain* chain,
                                                      long long* out);

/* ---- particle ensemble --------------------------------------------- */

typedef struct surfdk_ensemble surfdk_ensemble;

SURFDK_API surfdk_status surfdk_ensemble_create(const surfdk_grid* grid, int per_cell,
                                                uint64_t seed, double v0, surfdk_ensemble** out);
SURFDK_API void surfdk_ensemble_destroy(surfdk_ensemble* ensemble);
SURFDK_API surfdk_status surfdk_ensemble_size(const surfdk_ensemble* ensemble, long long* out);
SURFDK_API surfdk_status surfdk_ensemble_step(surfdk_ensemble* ensemble, double dt,
                                              long long steps);
/* xy: 2*N doubles, interleaved (x0, y0, x1, y1, ...). */
SURFDK_API surfdk_status surfdk_ensemble_positions(const surfdk_ensemble* ensemble, double* xy,
                                                   size_t len);
/* counts: cells_x * cells_y entries. */
SURFDK_API surfdk_status surfdk_ensemble_bin(const surfdk_ensemble* ensemble, long long* counts,
                                             size_t len);

/* ---- configuration and experiments --------------------------------- */

typedef struct surfdk_config surfdk_config;

/* experiment: equilibrium | transient | potential | fdr-check | particles
 *           | estimate-dt */
SURFDK_API surfdk_status surfdk_config_create(const char* experiment, surfdk_config** out);
SURFDK_API surfdk_status surfdk_config_load(const char* experiment, const char* path,
                                            surfdk_config** out);
/* Re-parses the accumulated keys; "key=value" overrides an earlier value. */
SURFDK_API surfdk_status surfdk_config_set(surfdk_config* config, const char* key,
                                           const char* value);
SURFDK_API void surfdk_config_destroy(surfdk_config* config);

typedef struct surfdk_equilibrium_result {
    long long samples;
    double dt;
    long long negativity_events;
    double fvm_median_mean_rho_err, fvm_max_mean_rho_err;
    double fvm_median_var_rho_err, fvm_max_var_rho_err;
    double fvm_median_poisson_dev, fvm_max_poisson_dev;
    int has_particle_chain;
    double part_median_mean_rho_err, part_max_mean_rho_err;
    double part_median_var_rho_err, part_max_var_rho_err;
    double part_median_poisson_dev, part_max_poisson_dev;
    int passed;
} surfdk_equilibrium_result;

typedef struct surfdk_transient_result {
    int n_snapshots;          /* entries filled in the arrays below (max 16) */
    double times[16];
    double peak_rho[16];
    double peak_count[16];
    double running_max_rho;
    double running_max_count;
    double mass_initial;
    double mass_final;
    double dt;
    long long negativity_events;
} surfdk_transient_result;

typedef struct surfdk_fdr_result {
    int assembled;
    double asymmetry;         /* max |L - L^T| */
    double factorization;     /* max |L + K K^T| */
    double lyapunov;          /* stationary-covariance residual */
    double max_var_rel_err;
    double median_var_rel_err;
    double max_cov_z;
    int cov_pairs;
    int cov_pairs_over_3;
    long long samples;
    double dt;
    int passed;
} surfdk_fdr_result;

typedef struct surfdk_particles_result {
    long long samples;
    double dt;
    double median_mean_rho_err, max_mean_rho_err;
    double median_var_rho_err, max_var_rho_err;
    double median_poisson_dev, max_poisson_dev;
    int passed;
} surfdk_particles_result;

typedef struct surfdk_dt_estimate {
    double lambda_max;
    double dt_max;
    double suggested_dt;
} surfdk_dt_estimate;

SURFDK_API surfdk_status surfdk_run_equilibrium(const surfdk_config* config,
                                                surfdk_equilibrium_result* out);
SURFDK_API surfdk_status surfdk_run_transient(const surfdk_config* config,
                                              surfdk_transient_result* out);
SURFDK_API surfdk_status surfdk_run_potential(const surfdk_config* config,
                                              surfdk_transient_result* out);
SURFDK_API surfdk_status surfdk_run_fdr_check(const surfdk_config* config,
                                              surfdk_fdr_result* out);
SURFDK_API surfdk_status surfdk_run_particles(const surfdk_config* config,
                                              surfdk_particles_result* out);
SURFDK_API surfdk_status surfdk_run_estimate_dt(const surfdk_config* config,
                                                surfdk_dt_estimate* out);

#ifdef __cplusplus
}
#endif

#endif /* SURFDK_H */
