#pragma once

#include <vector>

#include <Eigen/Dense>

#include "core/block.hpp"
#include "core/ensembles.hpp"

namespace r3net {

// Layer schedule: cols(1) == input_dim and, for l >= 2,
// cols(l) == 2*rows(l-1) with the splitter (each block doubles its
// pre-activation width) or rows(l-1) without it.
struct NetworkSpec {
    std::vector<EnsembleSpec> layers;
    bool splitter = true;
    int input_dim = 0;
};

struct Network {
    std::vector<Block> blocks;
    NetworkSpec spec;

    int depth() const { return static_cast<int>(blocks.size()); }
    int output_dim() const { return blocks.empty() ? spec.input_dim : blocks.back().output_dim(); }
};

// Validates the dimension schedule and every layer's ensemble constraints.
Network build_network(const NetworkSpec& spec);

struct LayerState {
    Eigen::VectorXd z;
    Eigen::VectorXd y;
    int l0 = 0;
};

struct LayerTrace {
    std::vector<LayerState> layers;

    const Eigen::VectorXd& output() const { return layers.back().y; }
};

LayerTrace forward_chain(const Network& net, const Eigen::VectorXd& x);

// Multiplicative sandwich across the chain:
//   lower = prod kappa_l (1 - delta_l), upper = prod (1 + delta_l)
// with kappa_l computed per layer from the pre-activation pair. verdict is
// whether lower*|x1-x2|^2 <= |y1^(L)-y2^(L)|^2 <= upper*|x1-x2|^2 holds on
// the actual distances (1e-12 relative slack).
struct ChainBoundReport {
    std::vector<double> kappas;
    std::vector<double> deltas;
    std::vector<double> layer_ratios;  // per layer: |dy|^2 / |dq|^2
    double lower = 1.0;
    double upper = 1.0;
    double input_dist_sq = 0.0;
    double output_dist_sq = 0.0;
    bool verdict = false;
};

// deltas must have one entry per layer (all zeros for orthonormal chains).
// Throws Error(degenerate_pair) when x1 == x2 and LayerCollapseError when the
// two traces produce identical pre-activations at some layer.
ChainBoundReport analyze_chain(const Network& net,
                               const Eigen::VectorXd& x1,
                               const Eigen::VectorXd& x2,
                               const std::vector<double>& deltas);

}  // namespace r3net
