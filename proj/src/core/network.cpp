#include "core/network.hpp"

#include <sstream>

#include "core/analysis.hpp"
#include "core/errors.hpp"

namespace r3net {

namespace {

constexpr double kInequalitySlack = 1e-12;

}  // namespace

Network build_network(const NetworkSpec& spec) {
    if (spec.layers.empty()) {
        throw Error(Errc::invalid_argument, "build_network: no layers");
    }
    if (spec.input_dim < 1) {
        throw Error(Errc::invalid_argument, "build_network: input_dim must be >= 1");
    }
    int expected_cols = spec.input_dim;
    for (std::size_t l = 0; l < spec.layers.size(); ++l) {
        const EnsembleSpec& layer = spec.layers[l];
        if (layer.cols != expected_cols) {
            std::ostringstream oss;
            oss << "build_network: layer " << (l + 1) << " has cols " << layer.cols
                << ", schedule requires " << expected_cols;
            throw Error(Errc::dimension_mismatch, oss.str());
        }
        expected_cols = spec.splitter ? 2 * layer.rows : layer.rows;
    }

    Network net;
    net.spec = spec;
    net.blocks.reserve(spec.layers.size());
    for (const EnsembleSpec& layer : spec.layers) {
        net.blocks.push_back(Block{build(layer), spec.splitter});
    }
    return net;
}

LayerTrace forward_chain(const Network& net, const Eigen::VectorXd& x) {
    if (x.size() != net.spec.input_dim) {
        std::ostringstream oss;
        oss << "forward_chain: input length " << x.size() << " != input_dim "
            << net.spec.input_dim;
        throw Error(Errc::dimension_mismatch, oss.str());
    }
    LayerTrace trace;
    trace.layers.reserve(net.blocks.size());
    Eigen::VectorXd q = x;
    for (const Block& block : net.blocks) {
        BlockOutput out = forward(block, q);
        q = out.y;
        trace.layers.push_back(LayerState{std::move(out.z), std::move(out.y), out.l0});
    }
    return trace;
}

ChainBoundReport analyze_chain(const Network& net,
                               const Eigen::VectorXd& x1,
                               const Eigen::VectorXd& x2,
                               const std::vector<double>& deltas) {
    if (x1 == x2) {
        throw Error(Errc::degenerate_pair, "analyze_chain: x1 == x2");
    }
    if (static_cast<int>(deltas.size()) != net.depth()) {
        std::ostringstream oss;
        oss << "analyze_chain: got " << deltas.size() << " deltas for " << net.depth()
            << " layers";
        throw Error(Errc::invalid_argument, oss.str());
    }
    for (double d : deltas) {
        if (d < 0.0 || d >= 1.0) {
            throw Error(Errc::invalid_argument, "analyze_chain: deltas must lie in [0, 1)");
        }
    }

    ChainBoundReport report;
    report.deltas = deltas;
    report.input_dist_sq = (x1 - x2).squaredNorm();

    Eigen::VectorXd q1 = x1;
    Eigen::VectorXd q2 = x2;
    for (int l = 0; l < net.depth(); ++l) {
        BlockOutput out1 = forward(net.blocks[l], q1);
        BlockOutput out2 = forward(net.blocks[l], q2);
        if (out1.z == out2.z) {
            std::ostringstream oss;
            oss << "analyze_chain: pair collapses at layer " << (l + 1)
                << " (identical pre-activations)";
            throw LayerCollapseError(l, oss.str());
        }
        const PairAnalysis pair = analyze_pair(out1.z, out2.z);
        report.kappas.push_back(pair.kappa);
        const double in_dist = (q1 - q2).squaredNorm();
        const double out_dist = (out1.y - out2.y).squaredNorm();
        report.layer_ratios.push_back(out_dist / in_dist);
        report.lower *= pair.kappa * (1.0 - deltas[l]);
        report.upper *= 1.0 + deltas[l];
        q1 = std::move(out1.y);
        q2 = std::move(out2.y);
    }
    report.output_dist_sq = (q1 - q2).squaredNorm();
    const double lower = report.lower * report.input_dist_sq;
    const double upper = report.upper * report.input_dist_sq;
    report.verdict = report.output_dist_sq >= lower * (1.0 - kInequalitySlack) &&
                     report.output_dist_sq <= upper * (1.0 + kInequalitySlack);
    return report;
}

}  // namespace r3net
