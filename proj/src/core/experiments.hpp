#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "core/ensembles.hpp"

namespace r3net {

enum class ExperimentKind { Fig1, RicSweep, ChainBounds, KappaVsNoise };

const char* to_string(ExperimentKind kind);
ExperimentKind parse_experiment_kind(std::string_view name);

// Flat key=value configuration. One "key=value" pair per line; blank lines
// and lines starting with '#' are skipped. Duplicate or malformed lines are
// config errors; unknown keys are rejected by the per-experiment parsers.
using KvMap = std::map<std::string, std::string>;

KvMap parse_kv_text(std::string_view text);
KvMap parse_kv_file(const std::string& path);

// Shortest decimal representation that round-trips to the same double.
std::string format_double(double value);

// ---------------------------------------------------------------------------
// fig1: scatter of output vs input squared perturbation through one block.
// ---------------------------------------------------------------------------

struct Fig1Config {
    int m = 16;
    double sigma = 1.0;
    double sigma_delta = 0.25;
    long samples = 100000;
    std::uint64_t seed = 42;
    std::vector<int> shapes = {16, 8};  // rows of W; cols are always m
    bool splitter = false;              // default: plain y = relu(Wq)
    bool fixed_weights = false;         // default: redraw W every sample
    std::string out_csv;
    std::string out_svg;                // optional; empty skips the figure
};

Fig1Config parse_fig1_config(const KvMap& kv);

struct Fig1ShapeSummary {
    std::string tag;       // e.g. "n=16"
    int n = 0;
    long count = 0;
    long violations = 0;   // records with output_dist_sq > input_dist_sq
    double slope = 0.0;    // affine least-squares fit output ~ slope*input + intercept
    double intercept = 0.0;
};

struct Fig1Summary {
    std::vector<Fig1ShapeSummary> shapes;
    long total_violations() const {
        long v = 0;
        for (const auto& s : shapes) v += s.violations;
        return v;
    }
};

Fig1Summary run_fig1(const Fig1Config& config);

// ---------------------------------------------------------------------------
// kappa-sweep: mean contraction constant and sign-mismatch fraction as the
// perturbation strength grows.
// ---------------------------------------------------------------------------

struct KappaSweepConfig {
    int m = 16;
    int n = 16;
    EnsembleKind ensemble = EnsembleKind::Gaussian;
    double sigma = 1.0;
    std::vector<double> sigma_delta_grid;  // from "start:step:end"
    long trials = 1000;
    std::uint64_t seed = 3;
    std::string out_csv;
};

KappaSweepConfig parse_kappa_sweep_config(const KvMap& kv);

struct KappaSweepRow {
    double sigma_delta = 0.0;
    double mean_kappa = 0.0;
    double mean_mismatch_fraction = 0.0;
};

struct KappaSweepSummary {
    std::vector<KappaSweepRow> rows;
    long trials = 0;
    long skipped = 0;  // degenerate trials excluded from the means
};

// Base draws (q1, W, perturbation direction) are shared across the grid, so
// each trial's mismatch set only grows with sigma_delta and the recorded
// means are exactly nondecreasing in perturbation strength.
KappaSweepSummary run_kappa_vs_noise(const KappaSweepConfig& config);

// ---------------------------------------------------------------------------
// ric: empirical restricted-isometry constants over a parameter grid.
// ---------------------------------------------------------------------------

struct RicSweepConfig {
    std::vector<EnsembleKind> ensembles;
    std::vector<int> rows_grid;  // n
    std::vector<int> cols_grid;  // m
    std::vector<int> nu_grid;
    long trials = 10000;
    std::uint64_t seed = 7;
    std::string out_csv;
};

RicSweepConfig parse_ric_sweep_config(const KvMap& kv);

struct RicSweepRow {
    EnsembleKind ensemble;
    int n = 0;
    int m = 0;
    int nu = 0;
    long trials = 0;
    double delta_hat = 0.0;
};

struct RicSweepSummary {
    std::vector<RicSweepRow> rows;
};

RicSweepSummary run_ric_sweep(const RicSweepConfig& config);

// ---------------------------------------------------------------------------
// chain: multiplicative sandwich verification over random input pairs.
// ---------------------------------------------------------------------------

struct ChainBoundsConfig {
    int input_dim = 16;
    bool splitter = true;
    std::vector<EnsembleKind> kinds;  // one per layer (a single kind broadcasts)
    std::vector<int> rows;            // n per layer
    std::vector<double> deltas;       // empty means all zeros
    double sigma = 1.0;
    double sigma_delta = 0.25;
    long pairs = 1000;
    std::uint64_t seed = 9;
    std::string out_csv;
};

ChainBoundsConfig parse_chain_bounds_config(const KvMap& kv);

struct ChainBoundsSummary {
    long pairs = 0;
    long passes = 0;
    long collapses = 0;  // pairs excluded after a mid-chain collapse
    std::vector<double> mean_kappas;  // per layer, over non-collapsed pairs
    double pass_rate() const {
        const long counted = pairs - collapses;
        return counted == 0 ? 0.0 : static_cast<double>(passes) / counted;
    }
};

ChainBoundsSummary run_chain_bounds(const ChainBoundsConfig& config);

}  // namespace r3net
