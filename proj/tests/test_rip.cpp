#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "core/errors.hpp"
#include "core/rip.hpp"
#include "core/rng.hpp"

using namespace r3net;

TEST_CASE("orthonormal matrices have vanishing empirical RIC") {
    for (const EnsembleSpec spec : {EnsembleSpec{EnsembleKind::RandomOrthonormal, 32, 16, 4},
                                    EnsembleSpec{EnsembleKind::Dct, 32, 32, 0},
                                    EnsembleSpec{EnsembleKind::WalshHadamard, 32, 32, 0}}) {
        const WeightMatrix w = build(spec);
        for (int nu : {1, 4, 16}) {
            const RipEstimate est = estimate_ric(w, nu, 500, 1);
            CHECK(est.delta_hat <= 1e-10);
        }
    }
}

TEST_CASE("gaussian 128x512 estimate lies strictly inside (0, 1)") {
    const WeightMatrix w = build({EnsembleKind::Gaussian, 128, 512, 42});
    const RipEstimate est = estimate_ric(w, 4, 10000, 7);
    CHECK(est.delta_hat > 0.0);
    CHECK(est.delta_hat < 1.0);

    // The witness reproduces the recorded extremal ratio.
    const double witness_ratio =
        (w.entries * est.worst_witness).squaredNorm() / est.worst_witness.squaredNorm();
    CHECK(witness_ratio == doctest::Approx(est.worst_ratio).epsilon(1e-12));
    CHECK(std::abs(witness_ratio - 1.0) == doctest::Approx(est.delta_hat).epsilon(1e-12));

    long total = 0;
    for (long count : est.ratio_histogram) {
        total += count;
    }
    CHECK(total == est.trials);
}

TEST_CASE("taller gaussian matrices concentrate better") {
    const int m = 16;
    double mean_square = 0.0;
    double mean_tall = 0.0;
    const int draws = 20;
    for (int d = 0; d < draws; ++d) {
        const WeightMatrix square = build({EnsembleKind::Gaussian, m, m, 100 + static_cast<std::uint64_t>(d)});
        const WeightMatrix tall = build({EnsembleKind::Gaussian, 4 * m, m, 200 + static_cast<std::uint64_t>(d)});
        mean_square += estimate_ric(square, m, 500, 5).delta_hat;
        mean_tall += estimate_ric(tall, m, 500, 5).delta_hat;
    }
    CHECK(mean_tall / draws < mean_square / draws);
}

TEST_CASE("delta_hat is nondecreasing in the trial count") {
    const WeightMatrix w = build({EnsembleKind::Gaussian, 32, 64, 3});
    double previous = 0.0;
    for (long trials : {10L, 100L, 1000L, 5000L}) {
        const double current = estimate_ric(w, 4, trials, 11).delta_hat;
        CHECK(current >= previous);
        previous = current;
    }
}

TEST_CASE("estimates are reproducible") {
    const WeightMatrix w = build({EnsembleKind::Gaussian, 24, 48, 8});
    const RipEstimate a = estimate_ric(w, 3, 200, 4);
    const RipEstimate b = estimate_ric(w, 3, 200, 4);
    CHECK(a.delta_hat == b.delta_hat);
    CHECK(a.worst_witness == b.worst_witness);
    CHECK(a.ratio_histogram == b.ratio_histogram);

    const RipEstimate c = estimate_ric(w, 3, 200, 5);
    CHECK(a.delta_hat != c.delta_hat);
}

TEST_CASE("estimate_ric argument errors") {
    const WeightMatrix w = build({EnsembleKind::Gaussian, 8, 8, 0});
    CHECK_THROWS_AS(estimate_ric(w, 0, 10, 0), Error);
    CHECK_THROWS_AS(estimate_ric(w, 9, 10, 0), Error);
    CHECK_THROWS_AS(estimate_ric(w, 4, 0, 0), Error);
}

TEST_CASE("dimension rule examples") {
    // ceil(4 * 4 * ln 256) = ceil(88.722...) = 89
    CHECK(dimension_rule(4, 256, 4.0) == 89);
    // ceil(1 * 1 * ln 3) = ceil(1.0986...) = 2
    CHECK(dimension_rule(1, 3, 1.0) == 2);
}

TEST_CASE("dimension rule scales linearly in c up to rounding") {
    Rng rng(13);
    for (int rep = 0; rep < 200; ++rep) {
        const int nu = 1 + static_cast<int>(rng.next_index(16));
        const int m = 2 + static_cast<int>(rng.next_index(1000));
        const double c = 0.5 + 4.0 * rng.next_double();
        const int single = dimension_rule(nu, m, c);
        const int doubled = dimension_rule(nu, m, 2.0 * c);
        CHECK(doubled <= 2 * single);
        CHECK(doubled >= 2 * single - 1);
    }
}

TEST_CASE("dimension rule argument errors") {
    CHECK_THROWS_AS(dimension_rule(0, 10, 1.0), Error);
    CHECK_THROWS_AS(dimension_rule(1, 1, 1.0), Error);
    CHECK_THROWS_AS(dimension_rule(1, 10, 0.0), Error);
}
