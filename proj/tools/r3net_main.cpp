// Command-line driver for the r3net shared library. Every subcommand is a
// thin translation from flags to the library's key=value experiment config;
// all computation happens behind the C API.

#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "r3net/r3net.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitIo = 2;
constexpr int kExitVerdict = 3;

int exit_code_for(r3net_status status) {
    switch (status) {
        case R3NET_OK:
            return kExitOk;
        case R3NET_ERR_IO:
            return kExitIo;
        default:
            return kExitConfig;
    }
}

int run(r3net_experiment experiment, const std::string& config, bool strict) {
    char* summary = nullptr;
    long violations = 0;
    const r3net_status status = r3net_run_experiment(experiment, config.c_str(), &summary, &violations);
    if (status != R3NET_OK) {
        std::cerr << "error: " << r3net_last_error() << "\n";
        return exit_code_for(status);
    }
    if (summary != nullptr) {
        std::cout << summary;
        r3net_string_free(summary);
    }
    if (violations > 0) {
        std::cout << "bound violations detected: " << violations << "\n";
        if (strict) {
            return kExitVerdict;
        }
    }
    return kExitOk;
}

std::string kv_line(const std::string& key, const std::string& value) {
    return key + "=" + value + "\n";
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"r3net: random weights, sign-splitter and ReLU robustness experiments"};
    app.require_subcommand(1);

    bool strict = false;
    app.add_flag("--strict", strict, "exit with code 3 when any bound violation is detected");

    // fig1
    auto* fig1 = app.add_subcommand("fig1", "scatter of output vs input squared perturbation");
    int fig1_m = 16;
    std::string fig1_sigma = "1.0", fig1_sigma_delta = "0.25";
    long fig1_samples = 100000;
    std::uint64_t fig1_seed = 42;
    std::string fig1_shapes = "16,8";
    bool fig1_splitter = false, fig1_fixed = false;
    std::string fig1_csv = "fig1.csv", fig1_svg;
    fig1->add_option("--m", fig1_m, "input dimension");
    fig1->add_option("--sigma", fig1_sigma, "input standard deviation");
    fig1->add_option("--sigma-delta", fig1_sigma_delta, "perturbation standard deviation");
    fig1->add_option("--samples", fig1_samples, "number of sampled pairs");
    fig1->add_option("--seed", fig1_seed, "master seed");
    fig1->add_option("--shapes", fig1_shapes, "comma list of weight matrix row counts");
    fig1->add_flag("--splitter", fig1_splitter, "use the sign-splitter output");
    fig1->add_flag("--fixed-weights", fig1_fixed, "hold one weight draw per shape");
    fig1->add_option("--out-csv", fig1_csv, "output CSV path");
    fig1->add_option("--out-svg", fig1_svg, "output SVG path (optional)");

    // ric
    auto* ric = app.add_subcommand("ric", "empirical restricted-isometry constants over a grid");
    std::string ric_ensemble = "gaussian", ric_n = "128", ric_m = "512", ric_nu = "4";
    long ric_trials = 10000;
    std::uint64_t ric_seed = 7;
    std::string ric_out = "ric.csv";
    ric->add_option("--ensemble", ric_ensemble, "comma list of ensemble kinds");
    ric->add_option("--n", ric_n, "comma list of row counts");
    ric->add_option("--m", ric_m, "comma list of column counts");
    ric->add_option("--nu", ric_nu, "comma list of sparsity levels");
    ric->add_option("--trials", ric_trials, "probes per grid point");
    ric->add_option("--seed", ric_seed, "master seed");
    ric->add_option("--out", ric_out, "output CSV path");

    // chain
    auto* chain = app.add_subcommand("chain", "multiplicative chain bounds over random pairs");
    std::string chain_config;
    long chain_pairs = 0;
    std::uint64_t chain_seed = 0;
    std::string chain_out;
    chain->add_option("--config", chain_config, "key=value network description file")->required();
    auto* chain_pairs_opt = chain->add_option("--pairs", chain_pairs, "number of input pairs");
    auto* chain_seed_opt = chain->add_option("--seed", chain_seed, "master seed");
    auto* chain_out_opt = chain->add_option("--out", chain_out, "output CSV path");

    // kappa-sweep
    auto* kappa = app.add_subcommand("kappa-sweep", "mean contraction vs perturbation strength");
    int kappa_m = 16, kappa_n = 16;
    std::string kappa_grid = "0.01:0.1:2.0";
    std::string kappa_ensemble = "gaussian";
    std::string kappa_sigma = "1.0";
    long kappa_trials = 1000;
    std::uint64_t kappa_seed = 3;
    std::string kappa_out = "kappa.csv";
    kappa->add_option("--m", kappa_m, "input dimension");
    kappa->add_option("--n", kappa_n, "weight matrix rows");
    kappa->add_option("--ensemble", kappa_ensemble, "weight ensemble kind");
    kappa->add_option("--sigma", kappa_sigma, "input standard deviation");
    kappa->add_option("--sigma-delta-grid", kappa_grid,
                      "perturbation grid, start:step:end or comma list");
    kappa->add_option("--trials", kappa_trials, "trials per grid point");
    kappa->add_option("--seed", kappa_seed, "master seed");
    kappa->add_option("--out", kappa_out, "output CSV path");

    CLI11_PARSE(app, argc, argv);

    if (fig1->parsed()) {
        std::ostringstream cfg;
        cfg << kv_line("m", std::to_string(fig1_m))
            << kv_line("sigma", fig1_sigma)
            << kv_line("sigma_delta", fig1_sigma_delta)
            << kv_line("samples", std::to_string(fig1_samples))
            << kv_line("seed", std::to_string(fig1_seed))
            << kv_line("shapes", fig1_shapes)
            << kv_line("splitter", fig1_splitter ? "true" : "false")
            << kv_line("fixed_weights", fig1_fixed ? "true" : "false")
            << kv_line("out_csv", fig1_csv);
        if (!fig1_svg.empty()) {
            cfg << kv_line("out_svg", fig1_svg);
        }
        return run(R3NET_EXPERIMENT_FIG1, cfg.str(), strict);
    }

    if (ric->parsed()) {
        std::ostringstream cfg;
        cfg << kv_line("ensemble", ric_ensemble) << kv_line("n", ric_n) << kv_line("m", ric_m)
            << kv_line("nu", ric_nu) << kv_line("trials", std::to_string(ric_trials))
            << kv_line("seed", std::to_string(ric_seed)) << kv_line("out_csv", ric_out);
        return run(R3NET_EXPERIMENT_RIC_SWEEP, cfg.str(), strict);
    }

    if (chain->parsed()) {
        std::ifstream in(chain_config, std::ios::binary);
        if (!in) {
            std::cerr << "error: cannot open config file: " << chain_config << "\n";
            return kExitIo;
        }
        std::ostringstream cfg;
        cfg << in.rdbuf();
        cfg << "\n";
        if (chain_pairs_opt->count() > 0) {
            cfg << kv_line("pairs", std::to_string(chain_pairs));
        }
        if (chain_seed_opt->count() > 0) {
            cfg << kv_line("seed", std::to_string(chain_seed));
        }
        if (chain_out_opt->count() > 0) {
            cfg << kv_line("out_csv", chain_out);
        }
        return run(R3NET_EXPERIMENT_CHAIN_BOUNDS, cfg.str(), strict);
    }

    if (kappa->parsed()) {
        std::ostringstream cfg;
        cfg << kv_line("m", std::to_string(kappa_m)) << kv_line("n", std::to_string(kappa_n))
            << kv_line("ensemble", kappa_ensemble)
            << kv_line("sigma", kappa_sigma)
            << kv_line("sigma_delta_grid", kappa_grid)
            << kv_line("trials", std::to_string(kappa_trials))
            << kv_line("seed", std::to_string(kappa_seed)) << kv_line("out_csv", kappa_out);
        return run(R3NET_EXPERIMENT_KAPPA_VS_NOISE, cfg.str(), strict);
    }

    return kExitConfig;
}
