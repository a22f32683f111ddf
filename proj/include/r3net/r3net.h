#ifndef R3NET_H
#define R3NET_H

/*
 * C API for the r3net shared library.
 *
 * The library realizes random-weight network blocks (z = Wq, an optional
 * sign-splitter, component-wise ReLU), computes per-pair contraction
 * constants and distance decompositions, estimates empirical
 * restricted-isometry constants, chains blocks with multiplicative
 * lower/upper distance bounds, and runs the CSV/SVG experiment harness.
 *
 * Conventions:
 *   - every fallible function returns r3net_status (R3NET_OK == 0);
 *   - r3net_last_error() returns a thread-local message for the most recent
 *     failure on the calling thread;
 *   - objects behind opaque handles are created/destroyed in matching pairs
 *     and are immutable after creation, so sharing across threads is safe;
 *   - vectors are plain double arrays with explicit lengths; matrices are
 *     row-major.
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum r3net_status {
    R3NET_OK = 0,
    R3NET_ERR_INVALID_ARGUMENT = 1,
    R3NET_ERR_DIMENSION = 2,
    R3NET_ERR_DEGENERATE_PAIR = 3,
    R3NET_ERR_LAYER_COLLAPSE = 4,
    R3NET_ERR_CONFIG = 5,
    R3NET_ERR_IO = 6,
    R3NET_ERR_INTERNAL = 7
} r3net_status;

typedef enum r3net_ensemble {
    R3NET_ENSEMBLE_GAUSSIAN = 0,
    R3NET_ENSEMBLE_RADEMACHER = 1,
    R3NET_ENSEMBLE_BERNOULLI = 2,
    R3NET_ENSEMBLE_RANDOM_ORTHONORMAL = 3,
    R3NET_ENSEMBLE_DCT = 4,
    R3NET_ENSEMBLE_WALSH_HADAMARD = 5,
    R3NET_ENSEMBLE_HAAR = 6
} r3net_ensemble;

typedef enum r3net_experiment {
    R3NET_EXPERIMENT_FIG1 = 0,
    R3NET_EXPERIMENT_RIC_SWEEP = 1,
    R3NET_EXPERIMENT_CHAIN_BOUNDS = 2,
    R3NET_EXPERIMENT_KAPPA_VS_NOISE = 3
} r3net_experiment;

/* Message for the most recent failure on this thread; empty string if none. */
const char* r3net_last_error(void);

/* ------------------------------------------------------------------ */
/* Weight matrices                                                     */
/* ------------------------------------------------------------------ */

typedef struct r3net_matrix r3net_matrix;

/* Realize a weight matrix. Deterministic in (kind, rows, cols, seed). */
r3net_status r3net_matrix_create(r3net_ensemble kind, int rows, int cols,
                                 uint64_t seed, r3net_matrix** out);
void r3net_matrix_destroy(r3net_matrix* matrix);

int r3net_matrix_rows(const r3net_matrix* matrix);
int r3net_matrix_cols(const r3net_matrix* matrix);

/* Copy entries into out (rows*cols doubles, row-major). */
r3net_status r3net_matrix_entries(const r3net_matrix* matrix, double* out,
                                  size_t capacity);

/* z = W q. q has length cols, z_out receives rows doubles. */
r3net_status r3net_matrix_apply(const r3net_matrix* matrix, const double* q,
                                int q_len, double* z_out);

/* ------------------------------------------------------------------ */
/* Block operations                                                    */
/* ------------------------------------------------------------------ */

/* Component-wise max(x, 0); out may alias v. */
r3net_status r3net_relu(const double* v, int len, double* out);

/* Sign-splitter + ReLU: out = [relu(z); relu(-z)], 2*len doubles. */
r3net_status r3net_sign_split(const double* z, int len, double* out);

/*
 * One block forward pass: y = [relu(Wq); relu(-Wq)] when splitter != 0
 * (2*rows doubles), else y = relu(Wq) (rows doubles). l0_out receives the
 * exact nonzero count of y; pass NULL to skip it.
 */
r3net_status r3net_block_forward(const r3net_matrix* matrix, int splitter,
                                 const double* q, int q_len, double* y_out,
                                 int* l0_out);

/* ------------------------------------------------------------------ */
/* Pair analysis                                                       */
/* ------------------------------------------------------------------ */

typedef struct r3net_pair_stats {
    double matched_term;      /* sum over matched signs of (|z1|-|z2|)^2    */
    double mismatched_term_z; /* sum over the complement of (|z1|+|z2|)^2   */
    double mismatched_term_y; /* sum over the complement of |z1|^2 + |z2|^2 */
    double gamma;             /* max(matched_term, mismatched_term_y)       */
    double kappa;             /* gamma / z_dist_sq, in (0, 1]               */
    double z_dist_sq;         /* |z1 - z2|^2                                */
    double ybar_dist_sq;      /* splitter output distance squared           */
    double mismatch_fraction; /* |complement| / n                           */
} r3net_pair_stats;

/* Fails with R3NET_ERR_DEGENERATE_PAIR when z1 == z2 exactly. */
r3net_status r3net_analyze_pair(const double* z1, const double* z2, int len,
                                r3net_pair_stats* out);

typedef struct r3net_bound_check {
    double lower_a;         /* kappa * (1 - delta_hat) */
    double upper_b;         /* 1 + delta_hat           */
    double kappa;
    double input_dist_sq;   /* |q1 - q2|^2             */
    double output_dist_sq;  /* splitter output distance squared */
    int pass;               /* sandwich holds with 1e-12 relative slack */
} r3net_bound_check;

/*
 * Check lower_a*|q1-q2|^2 <= |ybar1-ybar2|^2 <= upper_b*|q1-q2|^2 for one
 * splitter block. delta_hat is an externally estimated restricted-isometry
 * constant in [0, 1); pass 0 for orthonormal ensembles.
 */
r3net_status r3net_verify_block_bounds(const r3net_matrix* matrix,
                                       const double* q1, const double* q2,
                                       int q_len, double delta_hat,
                                       r3net_bound_check* out);

/* ------------------------------------------------------------------ */
/* Restricted isometry estimation                                      */
/* ------------------------------------------------------------------ */

typedef struct r3net_rip_estimate r3net_rip_estimate;

/*
 * Sample nu-sparse probes (and differences of two nu-sparse vectors) and
 * record the extremal deviation of |Wx|^2/|x|^2 from 1. Deterministic in
 * (matrix, nu, trials, seed); the estimate is a lower bound on the true
 * constant.
 */
r3net_status r3net_estimate_ric(const r3net_matrix* matrix, int nu, long trials,
                                uint64_t seed, r3net_rip_estimate** out);
void r3net_rip_destroy(r3net_rip_estimate* estimate);

double r3net_rip_delta_hat(const r3net_rip_estimate* estimate);
double r3net_rip_worst_ratio(const r3net_rip_estimate* estimate);

/* Copy the extremal probe (cols doubles). */
r3net_status r3net_rip_worst_witness(const r3net_rip_estimate* estimate,
                                     double* out, size_t capacity);

/* Number of histogram buckets (ratio range [0, 2), clamped). */
int r3net_rip_histogram_size(const r3net_rip_estimate* estimate);
r3net_status r3net_rip_histogram(const r3net_rip_estimate* estimate, long* out,
                                 size_t capacity);

/* ceil(c * nu * ln m), clamped to >= 1. Returns -1 on invalid arguments. */
long r3net_dimension_rule(int nu, int m, double c);

/* ------------------------------------------------------------------ */
/* Block chains                                                        */
/* ------------------------------------------------------------------ */

typedef struct r3net_network r3net_network;

/*
 * Build a chain of num_layers blocks. kinds and rows give one entry per
 * layer; the column schedule is input_dim for layer 1 and, for layer l >= 2,
 * twice the previous rows with the splitter or the previous rows without it.
 * Per-layer weight seeds derive from seed.
 */
r3net_status r3net_network_create(const r3net_ensemble* kinds, const int* rows,
                                  int num_layers, int input_dim, int splitter,
                                  uint64_t seed, r3net_network** out);
void r3net_network_destroy(r3net_network* network);

int r3net_network_depth(const r3net_network* network);
int r3net_network_output_dim(const r3net_network* network);

r3net_status r3net_network_forward(const r3net_network* network, const double* x,
                                   int x_len, double* y_out);

typedef struct r3net_chain_report {
    double lower;           /* prod_l kappa_l (1 - delta_l) */
    double upper;           /* prod_l (1 + delta_l)         */
    double input_dist_sq;
    double output_dist_sq;
    int verdict;            /* sandwich holds on the actual distances */
    int collapse_layer;     /* 0-based layer of an exact collapse, else -1 */
} r3net_chain_report;

/*
 * Per-layer contraction constants and the multiplicative sandwich for one
 * input pair. deltas has one entry per layer (NULL means all zeros);
 * kappas_out, if non-NULL, receives depth doubles. On an exact mid-chain
 * collapse the function returns R3NET_ERR_LAYER_COLLAPSE and sets
 * out->collapse_layer.
 */
r3net_status r3net_network_analyze_pair(const r3net_network* network,
                                        const double* x1, const double* x2,
                                        int x_len, const double* deltas,
                                        double* kappas_out,
                                        r3net_chain_report* out);

/* ------------------------------------------------------------------ */
/* Experiment harness                                                  */
/* ------------------------------------------------------------------ */

/*
 * Run one experiment from a flat key=value configuration (newline-separated
 * "key=value" lines; '#' starts a comment line; unknown keys are errors).
 * Writes the configured CSV (and SVG for fig1). summary_out, if non-NULL,
 * receives a human-readable summary to free with r3net_string_free.
 * violations_out, if non-NULL, receives the number of records that violated
 * the experiment's checked bound (fig1: output above input; chain: failed
 * sandwich verdicts; other experiments report 0).
 */
r3net_status r3net_run_experiment(r3net_experiment experiment,
                                  const char* config_text, char** summary_out,
                                  long* violations_out);

void r3net_string_free(char* text);

#ifdef __cplusplus
}
#endif

#endif /* R3NET_H */
