#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <string>
#include <vector>

#include "core/analysis.hpp"
#include "core/errors.hpp"
#include "core/experiments.hpp"
#include "core/network.hpp"
#include "core/rng.hpp"
#include "test_util.hpp"

using namespace r3net;
using testutil::TempDir;

namespace {

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = line.find(',', start);
        if (pos == std::string::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

}  // namespace

TEST_CASE("kv parser handles comments, blanks and whitespace") {
    const KvMap kv = parse_kv_text("# comment\n\n key = value \nn=16\n");
    CHECK(kv.size() == 2);
    CHECK(kv.at("key") == "value");
    CHECK(kv.at("n") == "16");
}

TEST_CASE("kv parser rejects malformed and duplicate lines") {
    CHECK_THROWS_AS(parse_kv_text("novalue\n"), Error);
    CHECK_THROWS_AS(parse_kv_text("=x\n"), Error);
    CHECK_THROWS_AS(parse_kv_text("a=1\na=2\n"), Error);
    CHECK(parse_kv_text("").empty());
}

TEST_CASE("unknown keys are rejected per experiment") {
    TempDir dir("cfg");
    const std::string base = "out_csv=" + dir.file("x.csv") + "\n";
    CHECK_THROWS_AS(parse_fig1_config(parse_kv_text(base + "bogus=1\n")), Error);
    CHECK_THROWS_AS(parse_kappa_sweep_config(parse_kv_text(base + "shapes=16\n")), Error);
    CHECK_THROWS_AS(parse_ric_sweep_config(parse_kv_text(base + "n=8\nm=8\nnu=1\nsplitter=true\n")),
                    Error);
    CHECK_THROWS_AS(parse_chain_bounds_config(parse_kv_text(base + "n=8\ntrials=5\n")), Error);
}

TEST_CASE("format_double round-trips exactly") {
    for (double value : {0.1, 1.0 / 3.0, 1e-300, 2.5, -0.0, 88.72283911167344, 1e308}) {
        const std::string text = format_double(value);
        CHECK(std::strtod(text.c_str(), nullptr) == value);
    }
}

TEST_CASE("fig1 writes one row per config for a single sample") {
    TempDir dir("fig1_single");
    Fig1Config cfg;
    cfg.samples = 1;
    cfg.out_csv = dir.file("fig1.csv");
    const Fig1Summary summary = run_fig1(cfg);
    CHECK(summary.shapes.size() == 2);

    const auto lines = testutil::read_lines(cfg.out_csv);
    REQUIRE(lines.size() == 3);
    CHECK(lines[0] == "config,input_dist_sq,output_dist_sq");
    CHECK(split_csv(lines[1])[0] == "n=16");
    CHECK(split_csv(lines[2])[0] == "n=8");
}

TEST_CASE("fig1 reruns are byte-identical and consistent with the summary") {
    TempDir dir("fig1_det");
    Fig1Config cfg;
    cfg.samples = 400;
    cfg.seed = 7;
    cfg.out_csv = dir.file("a.csv");
    cfg.out_svg = dir.file("a.svg");
    const Fig1Summary first = run_fig1(cfg);

    Fig1Config again = cfg;
    again.out_csv = dir.file("b.csv");
    again.out_svg = dir.file("b.svg");
    const Fig1Summary second = run_fig1(again);

    CHECK(testutil::read_file(dir.file("a.csv")) == testutil::read_file(dir.file("b.csv")));
    CHECK(testutil::read_file(dir.file("a.svg")) == testutil::read_file(dir.file("b.svg")));
    REQUIRE(first.shapes.size() == second.shapes.size());
    for (std::size_t c = 0; c < first.shapes.size(); ++c) {
        CHECK(first.shapes[c].slope == second.shapes[c].slope);
        CHECK(first.shapes[c].violations == second.shapes[c].violations);
    }

    // Violation counts match a recount over the CSV records.
    const auto lines = testutil::read_lines(cfg.out_csv);
    long recount = 0;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        const auto fields = split_csv(lines[i]);
        REQUIRE(fields.size() == 3);
        if (std::strtod(fields[2].c_str(), nullptr) > std::strtod(fields[1].c_str(), nullptr)) {
            ++recount;
        }
    }
    CHECK(recount == first.total_violations());
    CHECK(lines.size() == 1 + 2 * 400);
}

TEST_CASE("fig1 svg has one reference line and one fit per config") {
    TempDir dir("fig1_svg");
    Fig1Config cfg;
    cfg.samples = 50;
    cfg.out_csv = dir.file("f.csv");
    cfg.out_svg = dir.file("f.svg");
    run_fig1(cfg);
    const std::string svg = testutil::read_file(cfg.out_svg);
    CHECK(svg.find("<svg") != std::string::npos);

    std::size_t refs = 0, fits = 0, pos = 0;
    while ((pos = svg.find("class=\"reference\"", pos)) != std::string::npos) {
        ++refs;
        pos += 1;
    }
    pos = 0;
    while ((pos = svg.find("class=\"fit\"", pos)) != std::string::npos) {
        ++fits;
        pos += 1;
    }
    CHECK(refs == 1);
    CHECK(fits == cfg.shapes.size());
}

TEST_CASE("fig1 splitter and fixed-weights variants run") {
    TempDir dir("fig1_variants");
    Fig1Config cfg;
    cfg.samples = 20;
    cfg.splitter = true;
    cfg.fixed_weights = true;
    cfg.out_csv = dir.file("v.csv");
    const Fig1Summary summary = run_fig1(cfg);
    CHECK(summary.shapes[0].count == 20);
}

TEST_CASE("fig1 io failure leaves a clear error") {
    Fig1Config cfg;
    cfg.samples = 1;
    cfg.out_csv = "/nonexistent-dir/fig1.csv";
    CHECK_THROWS_AS(run_fig1(cfg), Error);
    try {
        run_fig1(cfg);
    } catch (const Error& err) {
        CHECK(err.code() == Errc::io);
    }
}

TEST_CASE("kappa sweep means are monotone and reproducible") {
    TempDir dir("kappa");
    KappaSweepConfig cfg;
    cfg.sigma_delta_grid = {1e-6, 0.1, 0.5, 1.0, 2.0};
    cfg.trials = 300;
    cfg.seed = 11;
    cfg.out_csv = dir.file("kappa.csv");
    const KappaSweepSummary summary = run_kappa_vs_noise(cfg);
    REQUIRE(summary.rows.size() == 5);
    CHECK(summary.skipped == 0);

    CHECK(summary.rows[0].mean_kappa >= 0.99);
    for (std::size_t g = 0; g < summary.rows.size(); ++g) {
        CHECK(summary.rows[g].mean_kappa > 0.0);
        CHECK(summary.rows[g].mean_kappa <= 1.0);
        CHECK(summary.rows[g].mean_mismatch_fraction >= 0.0);
        CHECK(summary.rows[g].mean_mismatch_fraction <= 1.0);
        if (g > 0) {
            CHECK(summary.rows[g].mean_mismatch_fraction >=
                  summary.rows[g - 1].mean_mismatch_fraction);
        }
    }

    const std::string bytes = testutil::read_file(cfg.out_csv);
    cfg.out_csv = dir.file("kappa2.csv");
    run_kappa_vs_noise(cfg);
    CHECK(testutil::read_file(cfg.out_csv) == bytes);

    const auto lines = testutil::read_lines(dir.file("kappa.csv"));
    REQUIRE(lines.size() == 6);
    CHECK(lines[0] == "sigma_delta,mean_kappa,mean_mismatch_fraction");
}

TEST_CASE("grid parser accepts ranges and lists") {
    TempDir dir("grid");
    const std::string base = "out_csv=" + dir.file("k.csv") + "\n";
    const KappaSweepConfig ranged =
        parse_kappa_sweep_config(parse_kv_text(base + "sigma_delta_grid=0.5:0.25:1.5\n"));
    REQUIRE(ranged.sigma_delta_grid.size() == 5);
    CHECK(ranged.sigma_delta_grid.front() == 0.5);
    CHECK(ranged.sigma_delta_grid.back() == 1.5);

    const KappaSweepConfig listed =
        parse_kappa_sweep_config(parse_kv_text(base + "sigma_delta_grid=1e-6,0.25,2.0\n"));
    REQUIRE(listed.sigma_delta_grid.size() == 3);
    CHECK(listed.sigma_delta_grid[0] == 1e-6);

    CHECK_THROWS_AS(parse_kappa_sweep_config(parse_kv_text(base + "sigma_delta_grid=1:0:2\n")),
                    Error);
}

TEST_CASE("ric sweep covers the grid and flags invalid grids before writing") {
    TempDir dir("ric");
    RicSweepConfig cfg = parse_ric_sweep_config(parse_kv_text(
        "ensemble=gaussian,random_orthonormal\nn=16,32\nm=16\nnu=2\ntrials=50\nseed=3\nout_csv=" +
        dir.file("ric.csv") + "\n"));
    const RicSweepSummary summary = run_ric_sweep(cfg);
    CHECK(summary.rows.size() == 4);
    for (const RicSweepRow& row : summary.rows) {
        if (row.ensemble == EnsembleKind::RandomOrthonormal) {
            CHECK(row.delta_hat <= 1e-10);
        } else {
            CHECK(row.delta_hat > 0.0);
        }
    }
    const auto lines = testutil::read_lines(dir.file("ric.csv"));
    REQUIRE(lines.size() == 5);
    CHECK(lines[0] == "ensemble,n,m,nu,trials,delta_hat");

    // Orthonormal kind with n < m is rejected up front; nothing is written.
    const std::string bad_path = dir.file("bad.csv");
    CHECK_THROWS_AS(
        parse_ric_sweep_config(parse_kv_text(
            "ensemble=random_orthonormal\nn=8\nm=16\nnu=2\nout_csv=" + bad_path + "\n")),
        Error);
    CHECK(!std::filesystem::exists(bad_path));

    CHECK_THROWS_AS(parse_ric_sweep_config(
                        parse_kv_text("ensemble=gaussian\nm=16\nnu=2\nout_csv=" + bad_path + "\n")),
                    Error);
    CHECK(!std::filesystem::exists(bad_path));
}

TEST_CASE("single-layer chain rows match verify_block_bounds exactly") {
    TempDir dir("chain1");
    ChainBoundsConfig cfg;
    cfg.input_dim = 8;
    cfg.kinds = {EnsembleKind::RandomOrthonormal};
    cfg.rows = {8};
    cfg.pairs = 3;
    cfg.seed = 5;
    cfg.out_csv = dir.file("chain.csv");
    const ChainBoundsSummary summary = run_chain_bounds(cfg);
    CHECK(summary.pairs == 3);
    CHECK(summary.collapses == 0);

    // Rebuild the layer and the sampled pairs from the same derived seeds.
    const WeightMatrix w = build(
        EnsembleSpec{EnsembleKind::RandomOrthonormal, 8, 8, derive_seed(cfg.seed, {3, 0})});
    const auto lines = testutil::read_lines(cfg.out_csv);
    REQUIRE(lines.size() == 4);
    CHECK(lines[0] == "input_dist_sq,output_dist_sq,product_lower,product_upper,verdict");
    for (long p = 0; p < cfg.pairs; ++p) {
        Rng rng_x(derive_seed(cfg.seed, {1, static_cast<std::uint64_t>(p)}));
        Rng rng_d(derive_seed(cfg.seed, {2, static_cast<std::uint64_t>(p)}));
        Eigen::VectorXd x1(8), delta(8);
        for (int i = 0; i < 8; ++i) x1[i] = cfg.sigma * rng_x.next_gaussian();
        for (int i = 0; i < 8; ++i) delta[i] = cfg.sigma_delta * rng_d.next_gaussian();
        const BoundCheck check = verify_block_bounds(w, x1, x1 + delta, 0.0);

        const auto fields = split_csv(lines[1 + p]);
        REQUIRE(fields.size() == 5);
        CHECK(fields[0] == format_double(check.input_dist_sq));
        CHECK(fields[1] == format_double(check.output_dist_sq));
        CHECK(fields[2] == format_double(check.bound.lower_A));
        CHECK(fields[3] == format_double(check.bound.upper_B));
        CHECK(fields[4] == (check.pass ? "1" : "0"));
    }
}

TEST_CASE("chain config broadcasting and validation") {
    TempDir dir("chaincfg");
    const std::string out = dir.file("c.csv");
    const ChainBoundsConfig cfg = parse_chain_bounds_config(parse_kv_text(
        "input_dim=16\nkind=random_orthonormal\nn=16,32,64\nout_csv=" + out + "\n"));
    CHECK(cfg.kinds.size() == 3);
    CHECK(cfg.deltas == std::vector<double>(3, 0.0));

    CHECK_THROWS_AS(parse_chain_bounds_config(parse_kv_text(
                        "input_dim=16\nkind=gaussian\nn=16,32\ndeltas=0.1\nout_csv=" + out + "\n")),
                    Error);
    CHECK_THROWS_AS(parse_chain_bounds_config(
                        parse_kv_text("input_dim=16\nkind=gaussian\nout_csv=" + out + "\n")),
                    Error);
}

TEST_CASE("orthonormal chain experiment passes every pair") {
    TempDir dir("chain4");
    ChainBoundsConfig cfg;
    cfg.input_dim = 16;
    cfg.kinds = {EnsembleKind::RandomOrthonormal};
    cfg.rows = {16, 32, 64, 128};
    cfg.pairs = 100;
    cfg.seed = 12;
    cfg.out_csv = dir.file("chain.csv");
    const ChainBoundsSummary summary = run_chain_bounds(cfg);
    CHECK(summary.collapses == 0);
    CHECK(summary.passes == 100);
    CHECK(summary.pass_rate() == 1.0);
    REQUIRE(summary.mean_kappas.size() == 4);
    for (double kappa : summary.mean_kappas) {
        CHECK(kappa > 0.0);
        CHECK(kappa <= 1.0);
    }
}

TEST_CASE("config files parse like inline text") {
    TempDir dir("kvfile");
    const std::string path = dir.file("net.cfg");
    {
        std::ofstream out(path);
        out << "# chain description\ninput_dim=8\nkind=random_orthonormal\nn=8,16\n";
    }
    const KvMap kv = parse_kv_file(path);
    CHECK(kv.at("input_dim") == "8");
    CHECK(kv.at("n") == "8,16");
    CHECK_THROWS_AS(parse_kv_file(dir.file("missing.cfg")), Error);
}
