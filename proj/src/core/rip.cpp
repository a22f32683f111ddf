#include "core/rip.hpp"

#include <cmath>
#include <utility>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace r3net {

namespace {

// nu distinct uniform support indices with standard Gaussian values.
std::vector<std::pair<int, double>> sparse_probe(int m, int nu, Rng& rng) {
    std::vector<int> support;
    support.reserve(nu);
    // Floyd's sampling: uniform nu-subset of {0, ..., m-1}.
    for (int j = m - nu; j < m; ++j) {
        const int t = static_cast<int>(rng.next_index(static_cast<std::uint64_t>(j) + 1));
        bool taken = false;
        for (int s : support) {
            if (s == t) {
                taken = true;
                break;
            }
        }
        support.push_back(taken ? j : t);
    }
    std::vector<std::pair<int, double>> probe;
    probe.reserve(nu);
    for (int idx : support) {
        probe.emplace_back(idx, rng.next_gaussian());
    }
    return probe;
}

void add_scaled(Eigen::VectorXd& x, const std::vector<std::pair<int, double>>& probe,
                double scale) {
    for (const auto& [idx, val] : probe) {
        x[idx] += scale * val;
    }
}

}  // namespace

RipEstimate estimate_ric(const WeightMatrix& w, int nu, long trials, std::uint64_t seed) {
    const int m = w.cols();
    if (nu < 1 || nu > m) {
        throw Error(Errc::invalid_argument, "estimate_ric: nu must lie in [1, cols]");
    }
    if (trials < 1) {
        throw Error(Errc::invalid_argument, "estimate_ric: trials must be >= 1");
    }

    RipEstimate est;
    est.ensemble = w.spec;
    est.nu = nu;
    est.trials = trials;
    est.ratio_histogram.assign(RipEstimate::kHistogramBuckets, 0);
    est.delta_hat = -1.0;

    Eigen::VectorXd x(m);
    Eigen::VectorXd z(w.rows());
    for (long trial = 0; trial < trials; ++trial) {
        Rng rng(derive_seed(seed, {static_cast<std::uint64_t>(trial)}));
        double norm_sq = 0.0;
        do {
            x.setZero();
            if (trial % 2 == 0) {
                add_scaled(x, sparse_probe(m, nu, rng), 1.0);
                const double norm = x.norm();
                if (norm > 0.0) {
                    x /= norm;
                }
            } else {
                // Difference of two independent nu-sparse unit vectors.
                Eigen::VectorXd a = Eigen::VectorXd::Zero(m);
                Eigen::VectorXd b = Eigen::VectorXd::Zero(m);
                add_scaled(a, sparse_probe(m, nu, rng), 1.0);
                add_scaled(b, sparse_probe(m, nu, rng), 1.0);
                const double na = a.norm();
                const double nb = b.norm();
                if (na > 0.0 && nb > 0.0) {
                    x = a / na - b / nb;
                }
            }
            norm_sq = x.squaredNorm();
        } while (norm_sq == 0.0);

        // Support-aware product: z = sum_j x_j W.col(j) over nonzeros.
        z.setZero();
        for (int j = 0; j < m; ++j) {
            if (x[j] != 0.0) {
                z += x[j] * w.entries.col(j);
            }
        }
        const double ratio = z.squaredNorm() / norm_sq;
        const double deviation = std::abs(ratio - 1.0);
        if (deviation > est.delta_hat) {
            est.delta_hat = deviation;
            est.worst_ratio = ratio;
            est.worst_witness = x;
        }
        const double scaled = ratio / RipEstimate::kHistogramMax * RipEstimate::kHistogramBuckets;
        int bucket = static_cast<int>(scaled);
        if (bucket >= RipEstimate::kHistogramBuckets) {
            bucket = RipEstimate::kHistogramBuckets - 1;
        }
        if (bucket < 0) {
            bucket = 0;
        }
        ++est.ratio_histogram[bucket];
    }
    return est;
}

int dimension_rule(int nu, int m, double c) {
    if (nu < 1) {
        throw Error(Errc::invalid_argument, "dimension_rule: nu must be >= 1");
    }
    if (m < 2) {
        throw Error(Errc::invalid_argument, "dimension_rule: m must be >= 2");
    }
    if (!(c > 0.0)) {
        throw Error(Errc::invalid_argument, "dimension_rule: c must be > 0");
    }
    const double n = std::ceil(c * static_cast<double>(nu) * std::log(static_cast<double>(m)));
    return n < 1.0 ? 1 : static_cast<int>(n);
}

}  // namespace r3net
