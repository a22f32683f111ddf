#pragma once

#include <vector>

#include <Eigen/Dense>

#include "core/ensembles.hpp"

namespace r3net {

// Sign/magnitude and positive/negative decompositions of a vector. Both
// reconstructions are exact: signs (.) magnitudes == v and
// positive_part + negative_part == v.
struct SignDecomposition {
    Eigen::VectorXd signs;          // entries in {+1, 0, -1}
    Eigen::VectorXd magnitudes;     // |v|
    Eigen::VectorXd positive_part;  // max(v, 0)
    Eigen::VectorXd negative_part;  // min(v, 0)
};

SignDecomposition decompose(const Eigen::VectorXd& v);

// Index partition for a pair of vectors: matched holds the indices where
// both signs agree and are nonzero, complement holds everything else
// (including indices where either entry is exactly zero). 0-based, sorted.
struct MatchedSignSet {
    std::vector<int> matched;
    std::vector<int> complement;
};

MatchedSignSet matched_set(const Eigen::VectorXd& z1, const Eigen::VectorXd& z2);

// Distance decomposition of a pre-activation pair across the matched-sign
// partition, together with the contraction constant of the splitter+ReLU map:
//
//   matched_term      = sum_{i in M}  (|z1| - |z2|)^2
//   mismatched_term_z = sum_{i in Mc} (|z1| + |z2|)^2
//   mismatched_term_y = sum_{i in Mc} (|z1|^2 + |z2|^2)
//   z_dist_sq    = matched_term + mismatched_term_z   (== |z1 - z2|^2)
//   ybar_dist_sq = matched_term + mismatched_term_y   (== |ybar1 - ybar2|^2)
//   gamma = max(matched_term, mismatched_term_y),  kappa = gamma / z_dist_sq
//
// kappa lies in (0, 1] and satisfies kappa * z_dist_sq <= ybar_dist_sq
// <= z_dist_sq. gamma/kappa are the per-pair quantities; the maxima are taken
// over the two decomposition terms of this pair, not over an input domain.
struct PairAnalysis {
    double matched_term = 0.0;
    double mismatched_term_z = 0.0;
    double mismatched_term_y = 0.0;
    double gamma = 0.0;
    double kappa = 0.0;
    double z_dist_sq = 0.0;
    double ybar_dist_sq = 0.0;
    MatchedSignSet sets;

    int dim() const { return static_cast<int>(sets.matched.size() + sets.complement.size()); }
    double mismatch_fraction() const {
        return dim() == 0 ? 0.0 : static_cast<double>(sets.complement.size()) / dim();
    }
};

// Throws Error(degenerate_pair) when z1 == z2 exactly (kappa is undefined).
PairAnalysis analyze_pair(const Eigen::VectorXd& z1, const Eigen::VectorXd& z2);

struct RobustnessBound {
    double lower_A = 0.0;  // kappa * (1 - delta_hat)
    double upper_B = 1.0;  // 1 + delta_hat
};

struct BoundCheck {
    RobustnessBound bound;
    double input_dist_sq = 0.0;   // |q1 - q2|^2
    double output_dist_sq = 0.0;  // |ybar1 - ybar2|^2, from the actual vectors
    bool pass = false;
    PairAnalysis pair;
};

// Runs one splitter block over the pair and checks
// lower_A |q1-q2|^2 <= |ybar1-ybar2|^2 <= upper_B |q1-q2|^2 with 1e-12
// relative slack. delta_hat is an externally estimated restricted-isometry
// constant; pass 0 for orthonormal ensembles.
BoundCheck verify_block_bounds(const WeightMatrix& w,
                               const Eigen::VectorXd& q1,
                               const Eigen::VectorXd& q2,
                               double delta_hat);

}  // namespace r3net
