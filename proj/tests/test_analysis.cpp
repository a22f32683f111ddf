#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "core/analysis.hpp"
#include "core/block.hpp"
#include "core/errors.hpp"
#include "core/rip.hpp"
#include "core/rng.hpp"

using namespace r3net;

namespace {

Eigen::VectorXd make_vector(std::initializer_list<double> values) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) {
        v[i++] = x;
    }
    return v;
}

// Random pair with occasional exact zeros and coordinated sign flips, the
// edge cases the decomposition has to keep exact.
std::pair<Eigen::VectorXd, Eigen::VectorXd> random_pair(Rng& rng) {
    const int n = 1 + static_cast<int>(rng.next_index(48));
    Eigen::VectorXd z1(n), z2(n);
    for (int i = 0; i < n; ++i) {
        z1[i] = (rng.next_index(10) == 0) ? 0.0 : rng.next_gaussian();
        switch (rng.next_index(4)) {
            case 0: z2[i] = 0.0; break;
            case 1: z2[i] = -z1[i]; break;
            default: z2[i] = rng.next_gaussian(); break;
        }
    }
    return {z1, z2};
}

}  // namespace

TEST_CASE("decompose examples") {
    const SignDecomposition d = decompose(make_vector({3, -2, 0}));
    CHECK(d.signs == make_vector({1, -1, 0}));
    CHECK(d.magnitudes == make_vector({3, 2, 0}));
    CHECK(d.positive_part == make_vector({3, 0, 0}));
    CHECK(d.negative_part == make_vector({0, -2, 0}));

    const SignDecomposition zero = decompose(Eigen::VectorXd::Zero(3));
    CHECK(zero.signs == Eigen::VectorXd::Zero(3));
    CHECK(zero.magnitudes == Eigen::VectorXd::Zero(3));
}

TEST_CASE("decompose reconstructions are exact") {
    Rng rng(5);
    for (int rep = 0; rep < 500; ++rep) {
        const auto [v, unused] = random_pair(rng);
        const SignDecomposition d = decompose(v);
        CHECK(d.positive_part + d.negative_part == v);
        CHECK(d.signs.cwiseProduct(d.magnitudes) == v);
    }
}

TEST_CASE("matched set examples") {
    const MatchedSignSet sets =
        matched_set(make_vector({1, -2, 0, 3}), make_vector({2, -1, 4, -3}));
    CHECK(sets.matched == std::vector<int>{0, 1});
    CHECK(sets.complement == std::vector<int>{2, 3});

    const Eigen::VectorXd z = make_vector({1, -2, 3});
    const MatchedSignSet same = matched_set(z, z);
    CHECK(same.matched == std::vector<int>{0, 1, 2});
    CHECK(same.complement.empty());

    const MatchedSignSet flipped = matched_set(z, -z);
    CHECK(flipped.matched.empty());
    CHECK(flipped.complement == std::vector<int>{0, 1, 2});
}

TEST_CASE("matched set rejects length mismatch") {
    CHECK_THROWS_AS(matched_set(Eigen::VectorXd::Zero(2), Eigen::VectorXd::Zero(3)), Error);
}

TEST_CASE("analyze_pair worked example") {
    const PairAnalysis pair = analyze_pair(make_vector({1, -2}), make_vector({2, 1}));
    CHECK(pair.matched_term == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(pair.mismatched_term_z == doctest::Approx(9.0).epsilon(1e-14));
    CHECK(pair.mismatched_term_y == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(pair.z_dist_sq == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(pair.ybar_dist_sq == doctest::Approx(6.0).epsilon(1e-14));
    CHECK(pair.gamma == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(pair.kappa == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(pair.kappa * pair.z_dist_sq <= pair.ybar_dist_sq);
    CHECK(pair.ybar_dist_sq <= pair.z_dist_sq);
}

TEST_CASE("matching signs give kappa = 1 and equal distances") {
    const PairAnalysis pair = analyze_pair(make_vector({1, 2}), make_vector({3, 1}));
    CHECK(pair.kappa == 1.0);
    CHECK(pair.ybar_dist_sq == pair.z_dist_sq);
    CHECK(pair.z_dist_sq == doctest::Approx(5.0).epsilon(1e-14));
}

TEST_CASE("full sign flip halves the squared distance") {
    const PairAnalysis pair = analyze_pair(make_vector({1, 2}), make_vector({-1, -2}));
    CHECK(pair.z_dist_sq == doctest::Approx(20.0).epsilon(1e-14));
    CHECK(pair.ybar_dist_sq == doctest::Approx(10.0).epsilon(1e-14));
    CHECK(pair.ybar_dist_sq == 0.5 * pair.z_dist_sq);
}

TEST_CASE("analyze_pair rejects identical vectors") {
    const Eigen::VectorXd z = make_vector({1, -2, 0});
    CHECK_THROWS_AS(analyze_pair(z, z), Error);
}

TEST_CASE("distance decomposition identities against direct sums") {
    Rng rng(29);
    int checked = 0;
    while (checked < 10000) {
        const auto [z1, z2] = random_pair(rng);
        if (z1 == z2) continue;
        ++checked;
        const PairAnalysis pair = analyze_pair(z1, z2);

        // Oracle: direct norms, not the per-index decomposition.
        const double z_direct = (z1 - z2).squaredNorm();
        const double y_direct = (sign_split_forward(z1) - sign_split_forward(z2)).squaredNorm();
        CHECK(std::abs(pair.z_dist_sq - z_direct) <= 1e-10 * z_direct);
        CHECK(std::abs(pair.ybar_dist_sq - y_direct) <= 1e-10 * std::max(y_direct, 1e-300));

        CHECK(pair.kappa > 0.0);
        CHECK(pair.kappa <= 1.0);
        CHECK(pair.kappa * pair.z_dist_sq <= pair.ybar_dist_sq * (1.0 + 1e-12));
        CHECK(pair.ybar_dist_sq <= pair.z_dist_sq * (1.0 + 1e-12));

        if (pair.sets.complement.empty()) {
            CHECK(pair.ybar_dist_sq == pair.z_dist_sq);
            CHECK(pair.kappa == 1.0);
        }
    }
}

TEST_CASE("mismatch fraction grows with gaussian perturbation strength") {
    Rng rng(101);
    const int m = 16;
    const WeightMatrix w = build({EnsembleKind::Gaussian, 16, m, 77});
    const std::vector<double> sigmas = {0.02, 0.2, 0.6, 1.2, 2.4};
    std::vector<double> mean_mismatch;
    for (double sigma : sigmas) {
        double total = 0.0;
        const int trials = 4000;
        for (int t = 0; t < trials; ++t) {
            Eigen::VectorXd q1(m), delta(m);
            for (int i = 0; i < m; ++i) {
                q1[i] = rng.next_gaussian();
                delta[i] = sigma * rng.next_gaussian();
            }
            const Eigen::VectorXd z1 = apply(w, q1);
            const Eigen::VectorXd z2 = apply(w, q1 + delta);
            const MatchedSignSet sets = matched_set(z1, z2);
            total += static_cast<double>(sets.complement.size()) / z1.size();
        }
        mean_mismatch.push_back(total / 4000);
    }
    for (std::size_t i = 1; i < mean_mismatch.size(); ++i) {
        CHECK(mean_mismatch[i] >= mean_mismatch[i - 1]);
    }
}

TEST_CASE("verify_block_bounds with identity weights") {
    WeightMatrix identity;
    identity.entries = Eigen::MatrixXd::Identity(2, 2);
    identity.spec = {EnsembleKind::RandomOrthonormal, 2, 2, 0};
    const BoundCheck check =
        verify_block_bounds(identity, make_vector({1, 2}), make_vector({3, 1}), 0.0);
    CHECK(check.pair.kappa == 1.0);
    CHECK(check.bound.lower_A == 1.0);
    CHECK(check.bound.upper_B == 1.0);
    CHECK(check.input_dist_sq == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(check.output_dist_sq == doctest::Approx(5.0).epsilon(1e-14));
    CHECK(check.pass);
}

TEST_CASE("verify_block_bounds on scaled pairs reports the computed verdict") {
    const WeightMatrix w = build({EnsembleKind::RandomOrthonormal, 8, 8, 21});
    Rng rng(3);
    for (int rep = 0; rep < 100; ++rep) {
        Eigen::VectorXd q1(8);
        for (int i = 0; i < 8; ++i) {
            q1[i] = rng.next_gaussian();
        }
        const Eigen::VectorXd q2 = 1.7 * q1;
        const BoundCheck check = verify_block_bounds(w, q1, q2, 0.0);
        // Oracle: evaluate both sides of the sandwich directly.
        const Eigen::VectorXd y1 = sign_split_forward(apply(w, q1));
        const Eigen::VectorXd y2 = sign_split_forward(apply(w, q2));
        const double out = (y1 - y2).squaredNorm();
        const double in = (q1 - q2).squaredNorm();
        const bool expected = out >= check.bound.lower_A * in * (1.0 - 1e-12) &&
                              out <= check.bound.upper_B * in * (1.0 + 1e-12);
        CHECK(check.pass == expected);
        CHECK(check.pass);  // orthonormal: the proposition guarantees it
    }
}

TEST_CASE("verify_block_bounds with estimated RIC on sparse pairs") {
    const WeightMatrix w = build({EnsembleKind::Gaussian, 64, 256, 123});
    const int nu = 4;
    const RipEstimate est = estimate_ric(w, nu, 10000, 9);
    CHECK(est.delta_hat > 0.0);
    CHECK(est.delta_hat < 1.0);

    Rng rng(55);
    int passes = 0;
    const int pairs = 1000;
    for (int p = 0; p < pairs; ++p) {
        Eigen::VectorXd q1 = Eigen::VectorXd::Zero(256);
        Eigen::VectorXd q2 = Eigen::VectorXd::Zero(256);
        for (int k = 0; k < nu; ++k) {
            q1[static_cast<int>(rng.next_index(256))] = rng.next_gaussian();
            q2[static_cast<int>(rng.next_index(256))] = rng.next_gaussian();
        }
        if (q1 == q2) continue;
        if (verify_block_bounds(w, q1, q2, est.delta_hat).pass) {
            ++passes;
        }
    }
    CHECK(passes >= pairs * 99 / 100);
}

TEST_CASE("verify_block_bounds argument errors") {
    const WeightMatrix w = build({EnsembleKind::Gaussian, 4, 4, 0});
    const Eigen::VectorXd q = make_vector({1, 2, 3, 4});
    CHECK_THROWS_AS(verify_block_bounds(w, q, q, 0.0), Error);
    CHECK_THROWS_AS(verify_block_bounds(w, q, 2 * q, 1.0), Error);
    CHECK_THROWS_AS(verify_block_bounds(w, q, 2 * q, -0.1), Error);
}
