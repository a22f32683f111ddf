#include "core/block.hpp"

namespace r3net {

Eigen::VectorXd relu(const Eigen::VectorXd& v) {
    return v.cwiseMax(0.0);
}

Eigen::VectorXd sign_split_forward(const Eigen::VectorXd& z) {
    const Eigen::Index n = z.size();
    Eigen::VectorXd out(2 * n);
    out.head(n) = z.cwiseMax(0.0);
    out.tail(n) = (-z).cwiseMax(0.0);
    return out;
}

int l0_count(const Eigen::VectorXd& v) {
    int count = 0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        if (v[i] != 0.0) {
            ++count;
        }
    }
    return count;
}

BlockOutput forward(const Block& block, const Eigen::VectorXd& q) {
    BlockOutput out;
    out.z = apply(block.weights, q);
    out.y = block.splitter ? sign_split_forward(out.z) : relu(out.z);
    out.l0 = l0_count(out.y);
    return out;
}

}  // namespace r3net
