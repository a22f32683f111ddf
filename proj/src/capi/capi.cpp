#include "r3net/r3net.h"

#include <cstring>
#include <exception>
#include <memory>
#include <new>
#include <sstream>
#include <string>

#include "core/analysis.hpp"
#include "core/block.hpp"
#include "core/ensembles.hpp"
#include "core/errors.hpp"
#include "core/experiments.hpp"
#include "core/network.hpp"
#include "core/rip.hpp"
#include "core/rng.hpp"

struct r3net_matrix {
    r3net::WeightMatrix w;
};

struct r3net_rip_estimate {
    r3net::RipEstimate est;
};

struct r3net_network {
    r3net::Network net;
};

namespace {

thread_local std::string g_last_error;

r3net_status status_from(r3net::Errc code) {
    switch (code) {
        case r3net::Errc::invalid_argument: return R3NET_ERR_INVALID_ARGUMENT;
        case r3net::Errc::dimension_mismatch: return R3NET_ERR_DIMENSION;
        case r3net::Errc::degenerate_pair: return R3NET_ERR_DEGENERATE_PAIR;
        case r3net::Errc::layer_collapse: return R3NET_ERR_LAYER_COLLAPSE;
        case r3net::Errc::config: return R3NET_ERR_CONFIG;
        case r3net::Errc::io: return R3NET_ERR_IO;
    }
    return R3NET_ERR_INTERNAL;
}

r3net_status fail(r3net_status status, const char* message) {
    g_last_error = message;
    return status;
}

template <typename Fn>
r3net_status guarded(Fn&& fn) {
    try {
        fn();
        g_last_error.clear();
        return R3NET_OK;
    } catch (const r3net::Error& err) {
        g_last_error = err.what();
        return status_from(err.code());
    } catch (const std::exception& err) {
        g_last_error = err.what();
        return R3NET_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return R3NET_ERR_INTERNAL;
    }
}

bool valid_kind(int kind) {
    return kind >= R3NET_ENSEMBLE_GAUSSIAN && kind <= R3NET_ENSEMBLE_HAAR;
}

r3net::EnsembleKind to_kind(r3net_ensemble kind) {
    return static_cast<r3net::EnsembleKind>(kind);
}

char* copy_string(const std::string& text) {
    char* out = new char[text.size() + 1];
    std::memcpy(out, text.c_str(), text.size() + 1);
    return out;
}

}  // namespace

extern "C" {

const char* r3net_last_error(void) {
    return g_last_error.c_str();
}

/* ------------------------------------------------------------------ */
/* Weight matrices                                                     */
/* ------------------------------------------------------------------ */

r3net_status r3net_matrix_create(r3net_ensemble kind, int rows, int cols,
                                 uint64_t seed, r3net_matrix** out) {
    if (out == nullptr) {
        return fail(R3NET_ERR_INVALID_ARGUMENT, "matrix_create: out is NULL");
    }
    *out = nullptr;
    if (!valid_kind(kind)) {
        return fail(R3NET_ERR_INVALID_ARGUMENT, "matrix_create: unknown ensemble kind");
    }
    return guarded([&] {
        auto handle = std::make_unique<r3net_matrix>();
        handle->w = r3net::build(r3net::EnsembleSpec{to_kind(kind), rows, cols, seed});
        *out = handle.release();
    });
}

void r3net_matrix_destroy(r3net_matrix* matrix) {
    delete matrix;
}

int r3net_matrix_rows(const r3net_matrix* matrix) {
    return matrix == nullptr ? -1 : matrix->w.rows();
}

int r3net_matrix_cols(const r3net_matrix* matrix) {
    return matrix == nullptr ? -1 : matrix->w.cols();
}

r3net_status r3net_matrix_entries(const r3net_matrix* matrix, double* out,
                                  size_t capacity) {
    if (matrix == nullptr || out == nullptr) {
        return fail(R3NET_ERR_INVALID_ARGUMENT, "matrix_entries: NULL argument");
    }
    const size_t needed = static_cast<size_t>(matrix->w.rows()) * matrix->w.cols();
    if (capacity < needed) {
        return fail(R3NET_ERR_INVALID_ARGUMENT, "matrix_entries: capacity too small");
    }
    for (int i = 0; i < matrix->w.rows(); ++i) {
        for (int j = 0; j < matrix->w.cols(); ++j) {
            out[static_cast<size_t>(i) * matrix->w.cols() + j] = matrix->w.entries(i, j);
        }
    }
    g_last_error.clear();
    return R3NET_OK;
}

r3net_status r3net_matrix_apply(const r3net_matrix* matrix, const double* q,
                                int q_len, double* z_out) {
    if (matrix == nullptr || q == nullptr || z_out == nullptr || q_len < 0) {
        return fail(R3NET_ERR_INVALID_ARGUMENT, "matrix_apply: bad argument");
    }
    return guarded([&] {
        const Eigen::VectorXd z =
            r3net::apply(matrix->w, Eigen::Map<const Eigen::VectorXd>(q, q_len));
        Eigen::Map<Eigen::VectorXd>(z_out, z.size()) = z;
    });
}

/* ------------------------------------------------------------------ */
/* Block operations                                                    */
/* ------------------------------------------------------------------ */

r3net_status r3net_relu(const double* v, int len, double* out) {
    if (v == nullptr || out == nullptr || len < 0) {
        return fail(R3NET_ERR_INVALID_ARGUMENT, "relu: bad argument");
    }
    for (int i = 0; i < len; ++i) {
        out[i] = v[i] > 0.0 ? v[i] : 0.0;
    }
    g_last_error.clear();
    return R3NET_OK;
}

r3net_status r3net_sign_split(const double* z, int len, double* out) {
    if (z == nullptr || out == nullptr || len < 0) {
        return fail(R3NET_ERR_INVALID_ARGUMENT, "sign_split: bad argument");
    }
    for (int i = 0; i < len; ++i) {
        const double x = z[i];
        out[i] = x > 0.0 ? x : 0.0;
        out[len + i] = x < 0.0 ? -x : 0.0;
    }
    g_last_error.clear();
    return R3NET_OK;
}

r3net_status r3net_block_forward(const r3net_matrix* matrix, int splitter,
                                 const double* q, int q_len, double* y_out,
                                 int* l0_out) {
    if (matrix == nullptr || q == nullptr || y_out == nullptr || q_len < 0) {
        return fail(R3NET_ERR_INVALID_ARGUMENT, "block_forward: bad argument");
    }
    return guarded([&] {
        const r3net::Block block{matrix->w, splitter != 0};
        const r3net::BlockOutput out =
            r3net::forward(block, Eigen::Map<const Eigen::VectorXd>(q, q_len));
        Eigen::Map<Eigen::VectorXd>(y_out, out.y.size()) = out.y;
        if (l0_out != nullptr) {
            *l0_out = out.l0;
        }
    });
}

/* ------------------------------------------------------------------ */
/* Pair analysis                                                       */
/* ------------------------------------------------------------------ */

r3net_status r3net_analyze_pair(const double* z1, const double* z2, int len,
                                r3net_pair_stats* out) {
    if (z1 == nullptr || z2 == nullptr || out == nullptr || len < 0) {
        return fail(R3NET_ERR_INVALID_ARGUMENT, "analyze_pair: bad argument");
    }
    return guarded([&] {
        const r3net::PairAnalysis pair =
            r3net::analyze_pair(Eigen::Map<const Eigen::VectorXd>(z1, len),
                                Eigen::Map<const Eigen::VectorXd>(z2, len));
        out->matched_term = pair.matched_term;
        out->mismatched_term_z = pair.mismatched_term_z;
        out->mismatched_term_y = pair.mismatched_term_y;
        out->gamma = pair.gamma;
        out->kappa = pair.kappa;
        out->z_dist_sq = pair.z_dist_sq;
        out->ybar_dist_sq = pair.ybar_dist_sq;
        out->mismatch_fraction = pair.mismatch_fraction();
    });
}

r3net_status r3net_verify_block_bounds(const r3net_matrix* matrix,
                                       const double* q1, const double* q2,
                                       int q_len, double delta_hat,
                                       r3net_bound_check* out) {
    if (matrix == nullptr || q1 == nullptr || q2 == nullptr || out == nullptr || q_len < 0) {
        return fail(R3NET_ERR_INVALID_ARGUMENT, "verify_block_bounds: bad argument");
    }
    return guarded([&] {
        const r3net::BoundCheck check = r3net::verify_block_bounds(
            matrix->w, Eigen::Map<const Eigen::VectorXd>(q1, q_len),
            Eigen::Map<const Eigen::VectorXd>(q2, q_len), delta_hat);
        out->lower_a = check.bound.lower_A;
        out->upper_b = check.bound.upper_B;
        out->kappa = check.pair.kappa;
        out->input_dist_sq = check.input_dist_sq;
        out->output_dist_sq = check.output_dist_sq;
        out->pass = check.pass ? 1 : 0;
    });
}

/* ------------------------------------------------------------------ */
/* Restricted isometry estimation                                      */
/* ------------------------------------------------------------------ */

r3net_status r3net_estimate_ric(const r3net_matrix* matrix, int nu, long trials,
                                uint64_t seed, r3net_rip_estimate** out) {
    if (matrix == nullptr || out == nullptr) {
        return fail(R3NET_ERR_INVALID_ARGUMENT, "estimate_ric: NULL argument");
    }
    *out = nullptr;
    return guarded([&] {
        auto handle = std::make_unique<r3net_rip_estimate>();
        handle->est = r3net::estimate_ric(matrix->w, nu, trials, seed);
        *out = handle.release();
    });
}

void r3net_rip_destroy(r3net_rip_estimate* estimate) {
    delete estimate;
}

double r3net_rip_delta_hat(const r3net_rip_estimate* estimate) {
    return estimate == nullptr ? -1.0 : estimate->est.delta_hat;
}

double r3net_rip_worst_ratio(const r3net_rip_estimate* estimate) {
    return estimate == nullptr ? -1.0 : estimate->est.worst_ratio;
}

r3net_status r3net_rip_worst_witness(const r3net_rip_estimate* estimate,
                                     double* out, size_t capacity) {
    if (estimate == nullptr || out == nullptr) {
        return fail(R3NET_ERR_INVALID_ARGUMENT, "rip_worst_witness: NULL argument");
    }
    const size_t needed = static_cast<size_t>(estimate->est.worst_witness.size());
    if (capacity < needed) {
        return fail(R3NET_ERR_INVALID_ARGUMENT, "rip_worst_witness: capacity too small");
    }
    Eigen::Map<Eigen::VectorXd>(out, estimate->est.worst_witness.size()) =
        estimate->est.worst_witness;
    g_last_error.clear();
    return R3NET_OK;
}

int r3net_rip_histogram_size(const r3net_rip_estimate* estimate) {
    return estimate == nullptr ? -1 : static_cast<int>(estimate->est.ratio_histogram.size());
}

r3net_status r3net_rip_histogram(const r3net_rip_estimate* estimate, long* out,
                                 size_t capacity) {
    if (estimate == nullptr || out == nullptr) {
        return fail(R3NET_ERR_INVALID_ARGUMENT, "rip_histogram: NULL argument");
    }
    if (capacity < estimate->est.ratio_histogram.size()) {
        return fail(R3NET_ERR_INVALID_ARGUMENT, "rip_histogram: capacity too small");
    }
    for (size_t i = 0; i < estimate->est.ratio_histogram.size(); ++i) {
        out[i] = estimate->est.ratio_histogram[i];
    }
    g_last_error.clear();
    return R3NET_OK;
}

long r3net_dimension_rule(int nu, int m, double c) {
    try {
        return r3net::dimension_rule(nu, m, c);
    } catch (const std::exception& err) {
        g_last_error = err.what();
        return -1;
    }
}

/* ------------------------------------------------------------------ */
/* Block chains                                                        */
/* ------------------------------------------------------------------ */

r3net_status r3net_network_create(const r3net_ensemble* kinds, const int* rows,
                                  int num_layers, int input_dim, int splitter,
                                  uint64_t seed, r3net_network** out) {
    if (kinds == nullptr || rows == nullptr || out == nullptr || num_layers < 1) {
        return fail(R3NET_ERR_INVALID_ARGUMENT, "network_create: bad argument");
    }
    *out = nullptr;
    for (int l = 0; l < num_layers; ++l) {
        if (!valid_kind(kinds[l])) {
            return fail(R3NET_ERR_INVALID_ARGUMENT, "network_create: unknown ensemble kind");
        }
    }
    return guarded([&] {
        r3net::NetworkSpec spec;
        spec.splitter = splitter != 0;
        spec.input_dim = input_dim;
        int cols = input_dim;
        for (int l = 0; l < num_layers; ++l) {
            spec.layers.push_back(r3net::EnsembleSpec{
                to_kind(kinds[l]), rows[l], cols,
                r3net::derive_seed(seed, {static_cast<uint64_t>(l)})});
            cols = spec.splitter ? 2 * rows[l] : rows[l];
        }
        auto handle = std::make_unique<r3net_network>();
        handle->net = r3net::build_network(spec);
        *out = handle.release();
    });
}

void r3net_network_destroy(r3net_network* network) {
    delete network;
}

int r3net_network_depth(const r3net_network* network) {
    return network == nullptr ? -1 : network->net.depth();
}

int r3net_network_output_dim(const r3net_network* network) {
    return network == nullptr ? -1 : network->net.output_dim();
}

r3net_status r3net_network_forward(const r3net_network* network, const double* x,
                                   int x_len, double* y_out) {
    if (network == nullptr || x == nullptr || y_out == nullptr || x_len < 0) {
        return fail(R3NET_ERR_INVALID_ARGUMENT, "network_forward: bad argument");
    }
    return guarded([&] {
        const r3net::LayerTrace trace =
            r3net::forward_chain(network->net, Eigen::Map<const Eigen::VectorXd>(x, x_len));
        Eigen::Map<Eigen::VectorXd>(y_out, trace.output().size()) = trace.output();
    });
}

r3net_status r3net_network_analyze_pair(const r3net_network* network,
                                        const double* x1, const double* x2,
                                        int x_len, const double* deltas,
                                        double* kappas_out,
                                        r3net_chain_report* out) {
    if (network == nullptr || x1 == nullptr || x2 == nullptr || out == nullptr || x_len < 0) {
        return fail(R3NET_ERR_INVALID_ARGUMENT, "network_analyze_pair: bad argument");
    }
    out->collapse_layer = -1;
    std::vector<double> delta_vec;
    if (deltas == nullptr) {
        delta_vec.assign(network->net.depth(), 0.0);
    } else {
        delta_vec.assign(deltas, deltas + network->net.depth());
    }
    try {
        const r3net::ChainBoundReport report = r3net::analyze_chain(
            network->net, Eigen::Map<const Eigen::VectorXd>(x1, x_len),
            Eigen::Map<const Eigen::VectorXd>(x2, x_len), delta_vec);
        out->lower = report.lower;
        out->upper = report.upper;
        out->input_dist_sq = report.input_dist_sq;
        out->output_dist_sq = report.output_dist_sq;
        out->verdict = report.verdict ? 1 : 0;
        if (kappas_out != nullptr) {
            for (std::size_t l = 0; l < report.kappas.size(); ++l) {
                kappas_out[l] = report.kappas[l];
            }
        }
        g_last_error.clear();
        return R3NET_OK;
    } catch (const r3net::LayerCollapseError& err) {
        out->collapse_layer = err.layer();
        g_last_error = err.what();
        return R3NET_ERR_LAYER_COLLAPSE;
    } catch (const r3net::Error& err) {
        g_last_error = err.what();
        return status_from(err.code());
    } catch (const std::exception& err) {
        g_last_error = err.what();
        return R3NET_ERR_INTERNAL;
    }
}

/* ------------------------------------------------------------------ */
/* Experiment harness                                                  */
/* ------------------------------------------------------------------ */

namespace {

std::string run_experiment_impl(r3net_experiment experiment, const char* config_text,
                                long& violations) {
    const r3net::KvMap kv = r3net::parse_kv_text(config_text == nullptr ? "" : config_text);
    std::ostringstream oss;
    violations = 0;
    switch (experiment) {
        case R3NET_EXPERIMENT_FIG1: {
            const r3net::Fig1Config cfg = r3net::parse_fig1_config(kv);
            const r3net::Fig1Summary summary = r3net::run_fig1(cfg);
            oss << "fig1: samples=" << cfg.samples << " splitter=" << (cfg.splitter ? 1 : 0)
                << " fixed_weights=" << (cfg.fixed_weights ? 1 : 0) << "\n";
            for (const auto& shape : summary.shapes) {
                oss << shape.tag << ": count=" << shape.count
                    << " violations=" << shape.violations
                    << " slope=" << r3net::format_double(shape.slope)
                    << " intercept=" << r3net::format_double(shape.intercept) << "\n";
            }
            violations = summary.total_violations();
            break;
        }
        case R3NET_EXPERIMENT_RIC_SWEEP: {
            const r3net::RicSweepConfig cfg = r3net::parse_ric_sweep_config(kv);
            const r3net::RicSweepSummary summary = r3net::run_ric_sweep(cfg);
            oss << "ric_sweep: points=" << summary.rows.size() << " trials=" << cfg.trials << "\n";
            for (const auto& row : summary.rows) {
                oss << r3net::to_string(row.ensemble) << " n=" << row.n << " m=" << row.m
                    << " nu=" << row.nu
                    << " delta_hat=" << r3net::format_double(row.delta_hat) << "\n";
            }
            break;
        }
        case R3NET_EXPERIMENT_CHAIN_BOUNDS: {
            const r3net::ChainBoundsConfig cfg = r3net::parse_chain_bounds_config(kv);
            const r3net::ChainBoundsSummary summary = r3net::run_chain_bounds(cfg);
            oss << "chain_bounds: pairs=" << summary.pairs << " passes=" << summary.passes
                << " collapses=" << summary.collapses
                << " pass_rate=" << r3net::format_double(summary.pass_rate()) << "\n";
            oss << "mean_kappa:";
            for (double k : summary.mean_kappas) {
                oss << ' ' << r3net::format_double(k);
            }
            oss << "\n";
            violations = summary.pairs - summary.collapses - summary.passes;
            break;
        }
        case R3NET_EXPERIMENT_KAPPA_VS_NOISE: {
            const r3net::KappaSweepConfig cfg = r3net::parse_kappa_sweep_config(kv);
            const r3net::KappaSweepSummary summary = r3net::run_kappa_vs_noise(cfg);
            oss << "kappa_vs_noise: points=" << summary.rows.size()
                << " trials=" << summary.trials << " skipped=" << summary.skipped << "\n";
            for (const auto& row : summary.rows) {
                oss << "sigma_delta=" << r3net::format_double(row.sigma_delta)
                    << " mean_kappa=" << r3net::format_double(row.mean_kappa)
                    << " mean_mismatch_fraction="
                    << r3net::format_double(row.mean_mismatch_fraction) << "\n";
            }
            break;
        }
        default:
            throw r3net::Error(r3net::Errc::invalid_argument, "unknown experiment kind");
    }
    return oss.str();
}

}  // namespace

r3net_status r3net_run_experiment(r3net_experiment experiment,
                                  const char* config_text, char** summary_out,
                                  long* violations_out) {
    if (summary_out != nullptr) {
        *summary_out = nullptr;
    }
    return guarded([&] {
        long violations = 0;
        const std::string summary = run_experiment_impl(experiment, config_text, violations);
        if (summary_out != nullptr) {
            *summary_out = copy_string(summary);
        }
        if (violations_out != nullptr) {
            *violations_out = violations;
        }
    });
}

void r3net_string_free(char* text) {
    delete[] text;
}

}  // extern "C"
