#include "core/analysis.hpp"

#include <algorithm>
#include <sstream>

#include "core/block.hpp"
#include "core/errors.hpp"

namespace r3net {

namespace {

constexpr double kInequalitySlack = 1e-12;

void require_same_length(const Eigen::VectorXd& a, const Eigen::VectorXd& b,
                         const char* where) {
    if (a.size() != b.size()) {
        std::ostringstream oss;
        oss << where << ": vector lengths differ (" << a.size() << " vs " << b.size() << ")";
        throw Error(Errc::dimension_mismatch, oss.str());
    }
}

int sign_of(double x) {
    if (x > 0.0) return 1;
    if (x < 0.0) return -1;
    return 0;
}

}  // namespace

SignDecomposition decompose(const Eigen::VectorXd& v) {
    SignDecomposition d;
    d.signs.resize(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        d.signs[i] = static_cast<double>(sign_of(v[i]));
    }
    d.magnitudes = v.cwiseAbs();
    d.positive_part = v.cwiseMax(0.0);
    d.negative_part = v.cwiseMin(0.0);
    return d;
}

MatchedSignSet matched_set(const Eigen::VectorXd& z1, const Eigen::VectorXd& z2) {
    require_same_length(z1, z2, "matched_set");
    MatchedSignSet sets;
    for (Eigen::Index i = 0; i < z1.size(); ++i) {
        const int s1 = sign_of(z1[i]);
        const int s2 = sign_of(z2[i]);
        if (s1 == s2 && s1 != 0) {
            sets.matched.push_back(static_cast<int>(i));
        } else {
            sets.complement.push_back(static_cast<int>(i));
        }
    }
    return sets;
}

PairAnalysis analyze_pair(const Eigen::VectorXd& z1, const Eigen::VectorXd& z2) {
    require_same_length(z1, z2, "analyze_pair");
    if (z1 == z2) {
        throw Error(Errc::degenerate_pair,
                    "analyze_pair: z1 == z2, contraction constant undefined");
    }
    PairAnalysis out;
    out.sets = matched_set(z1, z2);
    for (int i : out.sets.matched) {
        const double diff = std::abs(z1[i]) - std::abs(z2[i]);
        out.matched_term += diff * diff;
    }
    for (int i : out.sets.complement) {
        const double a = std::abs(z1[i]);
        const double b = std::abs(z2[i]);
        out.mismatched_term_z += (a + b) * (a + b);
        out.mismatched_term_y += a * a + b * b;
    }
    out.z_dist_sq = out.matched_term + out.mismatched_term_z;
    out.ybar_dist_sq = out.matched_term + out.mismatched_term_y;
    out.gamma = std::max(out.matched_term, out.mismatched_term_y);
    out.kappa = out.gamma / out.z_dist_sq;
    return out;
}

BoundCheck verify_block_bounds(const WeightMatrix& w,
                               const Eigen::VectorXd& q1,
                               const Eigen::VectorXd& q2,
                               double delta_hat) {
    require_same_length(q1, q2, "verify_block_bounds");
    if (q1 == q2) {
        throw Error(Errc::degenerate_pair, "verify_block_bounds: q1 == q2");
    }
    if (delta_hat < 0.0 || delta_hat >= 1.0) {
        throw Error(Errc::invalid_argument,
                    "verify_block_bounds: delta_hat must lie in [0, 1)");
    }
    const Eigen::VectorXd z1 = apply(w, q1);
    const Eigen::VectorXd z2 = apply(w, q2);
    if (z1 == z2) {
        throw Error(Errc::degenerate_pair,
                    "verify_block_bounds: pair collapses through W (z1 == z2)");
    }

    BoundCheck check;
    check.pair = analyze_pair(z1, z2);
    check.bound.lower_A = check.pair.kappa * (1.0 - delta_hat);
    check.bound.upper_B = 1.0 + delta_hat;
    check.input_dist_sq = (q1 - q2).squaredNorm();
    check.output_dist_sq =
        (sign_split_forward(z1) - sign_split_forward(z2)).squaredNorm();
    const double lower = check.bound.lower_A * check.input_dist_sq;
    const double upper = check.bound.upper_B * check.input_dist_sq;
    check.pass = check.output_dist_sq >= lower * (1.0 - kInequalitySlack) &&
                 check.output_dist_sq <= upper * (1.0 + kInequalitySlack);
    return check;
}

}  // namespace r3net
