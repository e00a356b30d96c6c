#ifndef DLSS_H
#define DLSS_H

/* C interface to the DLSS-alpha solver. Handles are opaque and owned by the caller; every
 * function returning dlss_status leaves a message for dlss_last_error() on failure (per thread), and
 * sets handle or string out-parameters to NULL. */

#include <stddef.h>

#if defined(DLSS_BUILDING_LIBRARY)
#define DLSS_API __attribute__((visibility("default")))
#else
#define DLSS_API
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum dlss_status {
    DLSS_OK = 0,
    DLSS_ERR_INVALID_ARGUMENT = 1,
    DLSS_ERR_DOMAIN = 2,
    DLSS_ERR_SOLVER = 3,
    DLSS_ERR_SHOOTING = 4,
    DLSS_ERR_QUADRATURE = 5,
    DLSS_ERR_INTERNAL = 6
} dlss_status;

typedef struct dlss_activity dlss_activity;
typedef struct dlss_state dlss_state;
typedef struct dlss_trajectory dlss_trajectory;
typedef struct dlss_profile dlss_profile;

DLSS_API const char* dlss_version(void);
DLSS_API const char* dlss_status_name(dlss_status status);
DLSS_API const char* dlss_last_error(void);
/* Frees strings returned through char** out-parameters. */
DLSS_API void dlss_string_free(char* s);

/* ---- activity ---- */

/* family: "stolarsky-power", "root-difference", "mrss" or "mass-action". */
DLSS_API dlss_status dlss_activity_create(const char* family, double alpha, double epsilon_diag, dlss_activity** out);
/* sigma = value everywhere; only meant as a negative control. */
DLSS_API dlss_status dlss_activity_constant(double value, double alpha, dlss_activity** out);
DLSS_API void dlss_activity_destroy(dlss_activity* a);
DLSS_API double dlss_activity_alpha(const dlss_activity* a);
DLSS_API const char* dlss_activity_family(const dlss_activity* a);
/* Any of sigma, jbar, mobility may be NULL. */
DLSS_API dlss_status dlss_activity_eval(const dlss_activity* a, double x, double y, double* sigma, double* jbar,
                                        double* mobility);

/* ---- states ---- */

DLSS_API dlss_status dlss_state_create(const double* values, size_t n, dlss_state** out);
DLSS_API dlss_status dlss_state_uniform(size_t n, dlss_state** out);
DLSS_API dlss_status dlss_state_bump(size_t n, double ell, int normalize, dlss_state** out);
DLSS_API dlss_status dlss_state_perturbed_uniform(size_t n, double amplitude, int mode, dlss_state** out);
DLSS_API void dlss_state_destroy(dlss_state* s);
DLSS_API size_t dlss_state_size(const dlss_state* s);
DLSS_API dlss_status dlss_state_values(const dlss_state* s, double* out, size_t n);

/* ---- functionals on the grid ---- */

DLSS_API dlss_status dlss_entropy(const dlss_state* c, double* out);
/* out has room for N values. */
DLSS_API dlss_status dlss_flux(const dlss_activity* a, const dlss_state* c, double* out, size_t n);
DLSS_API dlss_status dlss_slope(const dlss_activity* a, const dlss_state* c, double* out);
DLSS_API dlss_status dlss_primal_dissipation(const dlss_activity* a, const dlss_state* c, const double* j, size_t n,
                                             double* out);
DLSS_API dlss_status dlss_dual_dissipation(const dlss_activity* a, const dlss_state* c, const double* xi, size_t n,
                                           double* out);

/* ---- solver ---- */

typedef struct dlss_solver_config {
    double dt; /* 0 selects cfl / N^4 */
    double cfl;
    double t_end;
    double newton_tol;
    int newton_max_iter;
    double damping;
    int finite_difference_jacobian;
    int record_every;
    int max_halvings;
} dlss_solver_config;

typedef struct dlss_diagnostics {
    double t;
    double energy;
    double primal;
    double slope;
    double mass;
    double min_density;
    double cum_dissipation;
    double edb_residual;
} dlss_diagnostics;

typedef struct dlss_run_stats {
    size_t steps;
    size_t substeps;
    size_t newton_iterations;
    size_t halvings;
    double max_residual;
    double max_mass_drift;
    double min_density_positive_t;
    double max_entropy_increase;
    int right_endpoint_start;
} dlss_run_stats;

DLSS_API void dlss_solver_config_default(dlss_solver_config* config);
DLSS_API dlss_status dlss_solve(const dlss_activity* a, const dlss_solver_config* config, const dlss_state* c0,
                                dlss_trajectory** out);
DLSS_API void dlss_trajectory_destroy(dlss_trajectory* t);
DLSS_API size_t dlss_trajectory_length(const dlss_trajectory* t);
DLSS_API size_t dlss_trajectory_grid_size(const dlss_trajectory* t);
/* c and j may be NULL; otherwise they hold N values. */
DLSS_API dlss_status dlss_trajectory_snapshot(const dlss_trajectory* t, size_t index, double* time, double* c,
                                              double* j, size_t n);
DLSS_API dlss_status dlss_trajectory_diagnostics(const dlss_trajectory* t, size_t index, dlss_diagnostics* out);
DLSS_API dlss_status dlss_trajectory_stats(const dlss_trajectory* t, dlss_run_stats* out);
DLSS_API dlss_status dlss_edb_functional(const dlss_activity* a, const dlss_trajectory* t, double* out);

typedef struct dlss_edb_row {
    double dt;
    double residual;
    double order;
    size_t steps;
} dlss_edb_row;

/* rows holds halvings + 1 entries. */
DLSS_API dlss_status dlss_edb_study(const dlss_activity* a, const dlss_state* c0, double t_end, double dt0,
                                    int halvings, const dlss_solver_config* base, dlss_edb_row* rows);

/* ---- traveling fronts and similarity profiles ---- */

DLSS_API dlss_status dlss_wave_parameters(double alpha, double kappa, double* delta, double* speed);
DLSS_API dlss_status dlss_wave_eval(double alpha, double kappa, double t, double x, double* out);

typedef struct dlss_wave_row {
    double h;
    double residual;
    double relative;
    double order;
} dlss_wave_row;

/* rows holds nh entries. */
DLSS_API dlss_status dlss_wave_residual(double alpha, double kappa, double t, double margin, double width,
                                        size_t points, const double* h, size_t nh, dlss_wave_row* rows);

typedef struct dlss_shooting_options {
    double b_lo;
    double b_hi;
    double ode_tol;
    double event_threshold;
    double y_max;
    double b_tol;
    int max_bisections;
    size_t samples;
} dlss_shooting_options;

typedef struct dlss_profile_info {
    double alpha;
    double gamma;
    double b_star;
    double b_uncertainty;
    int bisections;
    double y_end;
    const char* tail; /* "none", "algebraic" or "support" */
    double tail_exponent;
    double tail_stderr;
    double tail_curvature;
    double support_radius;
    double fit_phi_lo;
    double fit_phi_hi;
    size_t fit_points;
    size_t samples;
} dlss_profile_info;

DLSS_API void dlss_shooting_options_default(dlss_shooting_options* options);
DLSS_API dlss_status dlss_shoot_profile(double alpha, const dlss_shooting_options* options, dlss_profile** out);
DLSS_API void dlss_profile_destroy(dlss_profile* p);
DLSS_API dlss_status dlss_profile_info_get(const dlss_profile* p, dlss_profile_info* out);
DLSS_API dlss_status dlss_profile_samples(const dlss_profile* p, double* y, double* phi, size_t n);
DLSS_API double dlss_similarity_gamma(double alpha);

/* ---- continuum ---- */

DLSS_API dlss_status dlss_flux_embedding_l1(const double* j, size_t n, double* l1, double* dropped_mean);
DLSS_API dlss_status dlss_commutator_defect_sine(size_t n, double* out);
DLSS_API dlss_status dlss_continuous_entropy(const dlss_state* c, double* out);

typedef struct dlss_refinement_row {
    size_t n;
    double energy_discrete;
    double energy_embedded;
    double dissipation_discrete;
    double dissipation_embedded;
    double l1_to_next;
    double order;
    size_t steps;
} dlss_refinement_row;

/* Initial data mean + amplitude sin(2 pi mode x), sampled by cell averages; rows holds count entries. */
DLSS_API dlss_status dlss_refinement_sine(const dlss_activity* a, double mean, double amplitude, int mode,
                                          double t_end, double dt, const dlss_solver_config* base,
                                          const size_t* n_list, size_t count, dlss_refinement_row* rows);

/* ---- property suite ---- */

/* options_json may be NULL or an object overriding alphas, pair_samples, state_samples,
 * polynomial_grid, flux_samples, commutator_n, seed, tolerance, edb, negative_control.
 * The report is a JSON document to be released with dlss_string_free. */
DLSS_API dlss_status dlss_run_checks(const char* options_json, char** report_json, int* all_passed);

#ifdef __cplusplus
}
#endif

#endif
