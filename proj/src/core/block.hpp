#pragma once

#include <Eigen/Dense>

#include "core/ensembles.hpp"

namespace r3net {

// One network block: z = Wq, optionally the sign-splitter, then ReLU.
// With the splitter the output is [relu(z); relu(-z)] in R^{2n}; without it
// the output is relu(z) in R^n.
struct Block {
    WeightMatrix weights;
    bool splitter = true;

    int input_dim() const { return weights.cols(); }
    int output_dim() const { return splitter ? 2 * weights.rows() : weights.rows(); }
};

struct BlockOutput {
    Eigen::VectorXd z;  // pre-activation, length n
    Eigen::VectorXd y;  // post-activation, length 2n (splitter) or n
    int l0 = 0;         // exact nonzero count of y
};

Eigen::VectorXd relu(const Eigen::VectorXd& v);

// [relu(z); relu(-z)]. The stacked [I; -I] transform is never materialized;
// the two halves carry the positive and negative magnitudes of z, so at most
// n of the 2n entries are nonzero and the Euclidean norm of z is preserved.
Eigen::VectorXd sign_split_forward(const Eigen::VectorXd& z);

// Exact count of entries != 0. ReLU outputs are exact zeros, no threshold.
int l0_count(const Eigen::VectorXd& v);

BlockOutput forward(const Block& block, const Eigen::VectorXd& q);

}  // namespace r3net
