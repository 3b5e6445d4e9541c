/* C interface to the fracdiff library.
 *
 * Every call returns an fd_status; on failure fd_last_error() describes the most
 * recent error on the calling thread. Handles are opaque and owned by the caller:
 * release each with its *_destroy function (NULL is accepted). Strings returned
 * through char** are heap-allocated; release them with fd_string_free.
 */
#ifndef FRACDIFF_H
#define FRACDIFF_H

#include <stddef.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(__GNUC__)
#define FD_API __attribute__((visibility("default")))
#else
#define FD_API
#endif

typedef enum fd_status {
    FD_OK = 0,
    FD_ERR_INVALID_ARGUMENT = 1,
    FD_ERR_CANCELLATION_LOSS = 2,
    FD_ERR_QUADRATURE_FAILURE = 3,
    FD_ERR_INVALID_ORDER = 4,
    FD_ERR_GRID_TOO_COARSE = 5,
    FD_ERR_INVALID_EXPONENT = 6,
    FD_ERR_INADMISSIBLE_SCENARIO = 7,
    FD_ERR_DEGENERATE_FIT = 8,
    FD_ERR_PARSE = 9,
    FD_ERR_IO = 10,
    FD_ERR_INTERNAL = 11
} fd_status;

typedef enum fd_solve_status {
    FD_SOLVE_COMPLETED = 0,
    FD_SOLVE_BLOWUP = 1,
    FD_SOLVE_QUADRATURE_FAILURE = 2
} fd_solve_status;

/* Second Mittag-Leffler index of a solution kernel. */
typedef enum fd_beta {
    FD_BETA_ZERO = 0,
    FD_BETA_ALPHA = 1,
    FD_BETA_ONE = 2,
    FD_BETA_ONE_PLUS_ALPHA = 3,
    FD_BETA_TWO = 4
} fd_beta;

typedef struct fd_ml_table fd_ml_table;
typedef struct fd_grid fd_grid;
typedef struct fd_field fd_field;
typedef struct fd_solve_job fd_solve_job;
typedef struct fd_trajectory fd_trajectory;
typedef struct fd_manifest fd_manifest;
typedef struct fd_sweep fd_sweep;

FD_API const char* fd_version(void);
FD_API const char* fd_last_error(void);
FD_API const char* fd_status_name(fd_status status);
FD_API void fd_string_free(char* s);

/* ---- Mittag-Leffler ---------------------------------------------------- */

/* E_{a,beta}(-x), a in (1, 2], x >= 0. */
FD_API fd_status fd_ml_eval(double a, double beta, double x, double* out);
/* Power series in z (any sign); fails with CANCELLATION_LOSS when unreliable. */
FD_API fd_status fd_ml_series(double a, double beta, double z, double* out);
/* Three-part representation of E_{a,beta}(-z^a); m = 0 picks the smallest order.
 * parts[0..3] = oscillatory, algebraic, remainder, total (any may be NULL). */
FD_API fd_status fd_ml_asymptotic(double a, double beta, double z, int m, double parts[4]);

FD_API fd_status fd_ml_table_create(double a, double beta, double tol, fd_ml_table** out);
FD_API fd_status fd_ml_table_eval(const fd_ml_table* table, double x, double* out);
FD_API void fd_ml_table_destroy(fd_ml_table* table);

/* ---- fractional calculus on uniform samples f(i*h), i = 0..n-1 -------- */

FD_API fd_status fd_rl_integral(const double* f, size_t n, double h, double beta, double* out);
/* order in (0,1) or (1,2) */
FD_API fd_status fd_caputo_derivative(const double* u, size_t n, double h, double order,
                                      double* out);
FD_API fd_status fd_rl_derivative(const double* u, size_t n, double h, double order, double* out);

/* ---- grids, fields, kernels ------------------------------------------- */

FD_API fd_status fd_grid_create(int dim, int points, double half_width, fd_grid** out);
FD_API size_t fd_grid_size(const fd_grid* grid);
FD_API double fd_grid_coordinate(const fd_grid* grid, int index);
FD_API void fd_grid_destroy(fd_grid* grid);

FD_API fd_status fd_field_create(const fd_grid* grid, const double* values, fd_field** out);
/* shape: "gaussian", "bump" or "mode" */
FD_API fd_status fd_field_profile(const fd_grid* grid, const char* shape, double amplitude,
                                  double width, int mode, fd_field** out);
FD_API size_t fd_field_size(const fd_field* field);
FD_API const double* fd_field_values(const fd_field* field);
/* q = INFINITY for the max norm. */
FD_API fd_status fd_field_norm(const fd_field* field, double q, double* out);
FD_API void fd_field_destroy(fd_field* field);

/* G_{1+alpha,beta}(t, .); with gradient != 0, the component along `axis`. */
FD_API fd_status fd_kernel_build(const fd_grid* grid, double alpha, fd_beta beta, double t,
                                 double laplacian_power, int gradient, int axis, fd_field** out);
FD_API fd_status fd_kernel_decomposition_error(const fd_grid* grid, double alpha, double* out);
FD_API fd_status fd_kernel_scaling_check(const fd_grid* grid, double alpha, fd_beta beta,
                                         double p, double t1, double t2, double* out);

/* ---- analysis ----------------------------------------------------------- */

/* out[0..3] = p_bar, p_tilde, p_hat, p_memory_crit (+inf when unbounded). */
FD_API fd_status fd_critical_exponents(int n, double alpha, double out[4]);
FD_API fd_status fd_q_scaling(int n, double alpha, double p, double* out);
/* kind: hom_u0, hom_u1, forced, semilinear_thm10, semilinear_thm00, gradient */
FD_API fd_status fd_theoretical_decay(const char* kind, int n, double alpha, double q,
                                      double delta, double r, double eta, int allow_endpoint,
                                      double* out);
FD_API fd_status fd_decay_fit(const double* times, const double* norms, size_t n, double window,
                              double* exponent, double* residual);
FD_API fd_status fd_integral_bound(double a, double b, double t, double* bound,
                                   double* quadrature);

/* ---- solves ------------------------------------------------------------- */

/* Problem description in the manifest syntax (see README). */
FD_API fd_status fd_solve_job_load(const char* path, fd_solve_job** out);
FD_API fd_status fd_solve_job_parse(const char* text, fd_solve_job** out);
FD_API void fd_solve_job_destroy(fd_solve_job* job);
FD_API fd_status fd_solve_job_run(const fd_solve_job* job, fd_trajectory** out);

FD_API fd_solve_status fd_trajectory_status(const fd_trajectory* tr);
FD_API double fd_trajectory_blowup_time(const fd_trajectory* tr);
FD_API size_t fd_trajectory_count(const fd_trajectory* tr);
FD_API double fd_trajectory_time(const fd_trajectory* tr, size_t i);
/* Borrowed pointer to the snapshot values at instant i (grid order). */
FD_API const double* fd_trajectory_values(const fd_trajectory* tr, size_t i, size_t* size);
FD_API fd_status fd_trajectory_norm(const fd_trajectory* tr, size_t i, double q, double* out);
/* CSV text: norm series, or one row per grid point with every stored instant. */
FD_API fd_status fd_trajectory_norms_csv(const fd_trajectory* tr, const fd_solve_job* job,
                                         char** out);
FD_API fd_status fd_trajectory_snapshots_csv(const fd_trajectory* tr, const fd_solve_job* job,
                                             char** out);
FD_API void fd_trajectory_destroy(fd_trajectory* tr);

/* ---- sweeps and reports ------------------------------------------------- */

FD_API fd_status fd_manifest_load(const char* path, fd_manifest** out);
FD_API fd_status fd_manifest_parse(const char* text, fd_manifest** out);
FD_API const char* fd_manifest_output_dir(const fd_manifest* m);
/* Worker count after the manifest limit and the FRACDIFF_MAX_WORKERS cap. */
FD_API int fd_manifest_workers(const fd_manifest* m);
FD_API void fd_manifest_destroy(fd_manifest* m);

/* workers <= 0 uses fd_manifest_workers. */
FD_API fd_status fd_sweep_run(const fd_manifest* m, int workers, fd_sweep** out);
FD_API int fd_sweep_all_pass(const fd_sweep* s);
FD_API size_t fd_sweep_count(const fd_sweep* s);
/* Writes per-scenario CSVs, results.csv and summary.json into dir. */
FD_API fd_status fd_sweep_write(const fd_sweep* s, const char* dir);
FD_API fd_status fd_sweep_summary_json(const fd_sweep* s, char** out);
FD_API void fd_sweep_destroy(fd_sweep* s);

/* Renders a summary.json file as a text (markdown = 0) or markdown table.
 * all_pass receives 1 when every scenario passed. */
FD_API fd_status fd_report_render(const char* summary_path, int markdown, char** out,
                                  int* all_pass);

#ifdef __cplusplus
}
#endif

#endif
