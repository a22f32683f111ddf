#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "core/ensembles.hpp"

namespace r3net {

// Empirical restricted-isometry constant of a weight matrix over sparse
// probe vectors. delta_hat is the maximum of ||Wx|^2/|x|^2 - 1| seen across
// the sampled trials, so it is a lower bound on the true constant: sampling
// cannot overestimate a maximum it never reaches.
struct RipEstimate {
    double delta_hat = 0.0;
    EnsembleSpec ensemble;
    int nu = 0;
    long trials = 0;
    Eigen::VectorXd worst_witness;        // probe achieving the extremal ratio
    double worst_ratio = 1.0;             // |Wx|^2/|x|^2 at the witness
    std::vector<long> ratio_histogram;    // kHistogramBuckets over [0, 2), clamped

    static constexpr int kHistogramBuckets = 40;
    static constexpr double kHistogramMax = 2.0;
};

// Samples nu-sparse unit vectors (uniform support, standard Gaussian values,
// normalized) on even trials and differences of two independent nu-sparse
// vectors on odd trials, covering the up-to-2nu-sparse differences the
// isometry bound actually acts on. Per-trial substreams derive from
// (seed, trial index), so the estimate is deterministic and extending the
// trial count only appends probes. Throws when nu < 1 or nu > cols.
RipEstimate estimate_ric(const WeightMatrix& w, int nu, long trials, std::uint64_t seed);

// n = max(1, ceil(c * nu * ln m)) — the sample-complexity shape n ~ nu log m
// with an explicit constant. Requires nu >= 1, m >= 2, c > 0.
int dimension_rule(int nu, int m, double c = 4.0);

}  // namespace r3net
