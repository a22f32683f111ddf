#include "core/experiments.hpp"

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <cmath>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include "core/analysis.hpp"
#include "core/block.hpp"
#include "core/errors.hpp"
#include "core/network.hpp"
#include "core/rip.hpp"
#include "core/rng.hpp"

namespace r3net {

namespace {

// Sub-stream tags so each consumer of the master seed stays independent.
constexpr std::uint64_t kTagInput = 1;
constexpr std::uint64_t kTagPerturbation = 2;
constexpr std::uint64_t kTagWeights = 3;
constexpr std::uint64_t kTagDirection = 4;

std::string trim(std::string_view s) {
    std::size_t a = 0;
    std::size_t b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

std::vector<std::string> split(std::string_view s, char delim) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (true) {
        const std::size_t pos = s.find(delim, start);
        if (pos == std::string_view::npos) {
            out.push_back(trim(s.substr(start)));
            break;
        }
        out.push_back(trim(s.substr(start, pos - start)));
        start = pos + 1;
    }
    return out;
}

long parse_long(const std::string& text, const std::string& key) {
    long value{};
    const char* begin = text.data();
    const char* end = begin + text.size();
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc{} || ptr != end) {
        throw Error(Errc::config, "config: key '" + key + "' is not an integer: " + text);
    }
    return value;
}

double parse_double(const std::string& text, const std::string& key) {
    errno = 0;
    char* end = nullptr;
    const double value = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size() || text.empty() || errno == ERANGE) {
        throw Error(Errc::config, "config: key '" + key + "' is not a number: " + text);
    }
    return value;
}

bool parse_bool(const std::string& text, const std::string& key) {
    if (text == "true" || text == "1") return true;
    if (text == "false" || text == "0") return false;
    throw Error(Errc::config, "config: key '" + key + "' is not a boolean: " + text);
}

// Reads typed values out of a KvMap and rejects keys no getter asked for.
class KvReader {
public:
    explicit KvReader(const KvMap& kv) : kv_(kv) {}

    bool has(const std::string& key) {
        known_.insert(key);
        return kv_.contains(key);
    }

    std::string get_string(const std::string& key, std::string fallback) {
        known_.insert(key);
        auto it = kv_.find(key);
        return it == kv_.end() ? std::move(fallback) : it->second;
    }

    std::string get_string_required(const std::string& key) {
        known_.insert(key);
        auto it = kv_.find(key);
        if (it == kv_.end()) {
            throw Error(Errc::config, "config: missing required key '" + key + "'");
        }
        return it->second;
    }

    long get_long(const std::string& key, long fallback) {
        known_.insert(key);
        auto it = kv_.find(key);
        return it == kv_.end() ? fallback : parse_long(it->second, key);
    }

    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) {
        known_.insert(key);
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        std::uint64_t value{};
        const char* begin = it->second.data();
        const char* end = begin + it->second.size();
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc{} || ptr != end) {
            throw Error(Errc::config, "config: key '" + key + "' is not an unsigned integer: " + it->second);
        }
        return value;
    }

    double get_double(const std::string& key, double fallback) {
        known_.insert(key);
        auto it = kv_.find(key);
        return it == kv_.end() ? fallback : parse_double(it->second, key);
    }

    bool get_bool(const std::string& key, bool fallback) {
        known_.insert(key);
        auto it = kv_.find(key);
        return it == kv_.end() ? fallback : parse_bool(it->second, key);
    }

    std::vector<int> get_int_list(const std::string& key, std::vector<int> fallback) {
        known_.insert(key);
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        std::vector<int> out;
        for (const std::string& item : split(it->second, ',')) {
            out.push_back(static_cast<int>(parse_long(item, key)));
        }
        return out;
    }

    std::vector<double> get_double_list(const std::string& key, std::vector<double> fallback) {
        known_.insert(key);
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        std::vector<double> out;
        for (const std::string& item : split(it->second, ',')) {
            out.push_back(parse_double(item, key));
        }
        return out;
    }

    std::vector<EnsembleKind> get_kind_list(const std::string& key,
                                            std::vector<EnsembleKind> fallback) {
        known_.insert(key);
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        std::vector<EnsembleKind> out;
        for (const std::string& item : split(it->second, ',')) {
            try {
                out.push_back(parse_ensemble_kind(item));
            } catch (const Error&) {
                throw Error(Errc::config, "config: key '" + key + "' has unknown ensemble: " + item);
            }
        }
        return out;
    }

    // Either "start:step:end" or an explicit comma list of values.
    std::vector<double> get_grid(const std::string& key, std::vector<double> fallback) {
        known_.insert(key);
        auto it = kv_.find(key);
        if (it == kv_.end()) return fallback;
        const std::string& text = it->second;
        if (text.find(':') == std::string::npos) {
            std::vector<double> out;
            for (const std::string& item : split(text, ',')) {
                out.push_back(parse_double(item, key));
            }
            return out;
        }
        const std::vector<std::string> parts = split(text, ':');
        if (parts.size() != 3) {
            throw Error(Errc::config, "config: key '" + key + "' grid must be start:step:end");
        }
        const double start = parse_double(parts[0], key);
        const double step = parse_double(parts[1], key);
        const double end = parse_double(parts[2], key);
        if (step <= 0.0 || end < start) {
            throw Error(Errc::config, "config: key '" + key + "' grid needs step > 0 and end >= start");
        }
        std::vector<double> out;
        for (long k = 0;; ++k) {
            const double value = start + static_cast<double>(k) * step;
            if (value > end * (1.0 + 1e-12)) break;
            out.push_back(value);
        }
        return out;
    }

    void finish(const char* experiment) const {
        for (const auto& [key, value] : kv_) {
            if (!known_.contains(key)) {
                throw Error(Errc::config,
                            std::string("config: unknown key '") + key + "' for " + experiment);
            }
        }
    }

private:
    const KvMap& kv_;
    std::set<std::string> known_;
};

Eigen::VectorXd gaussian_vector(int dim, double sigma, Rng& rng) {
    Eigen::VectorXd v(dim);
    for (int i = 0; i < dim; ++i) {
        v[i] = sigma * rng.next_gaussian();
    }
    return v;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error(Errc::io, "cannot open output file: " + path);
    }
    return out;
}

void finish_output(std::ofstream& out, const std::string& path) {
    out.flush();
    if (!out) {
        throw Error(Errc::io, "failed writing output file: " + path);
    }
}

struct AffineFit {
    double slope = 0.0;
    double intercept = 0.0;
};

AffineFit fit_affine(const std::vector<double>& x, const std::vector<double>& y) {
    const double n = static_cast<double>(x.size());
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sx += x[i];
        sy += y[i];
        sxx += x[i] * x[i];
        sxy += x[i] * y[i];
    }
    const double denom = n * sxx - sx * sx;
    AffineFit fit;
    if (denom != 0.0) {
        fit.slope = (n * sxy - sx * sy) / denom;
        fit.intercept = (sy - fit.slope * sx) / n;
    } else {
        fit.intercept = n > 0.0 ? sy / n : 0.0;
    }
    return fit;
}

// --------------------------------------------------------------------------
// SVG scatter for fig1
// --------------------------------------------------------------------------

constexpr int kSvgWidth = 800;
constexpr int kSvgHeight = 600;
constexpr long kSvgMaxPoints = 5000;

const char* shape_color(std::size_t index) {
    static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                    "#9467bd", "#ff7f0e", "#8c564b"};
    return kColors[index % (sizeof(kColors) / sizeof(kColors[0]))];
}

std::string svg_num(double v) {
    std::ostringstream oss;
    oss.precision(2);
    oss << std::fixed << v;
    return oss.str();
}

void write_fig1_svg(const std::string& path,
                    const std::vector<Fig1ShapeSummary>& summaries,
                    const std::vector<std::vector<double>>& inputs,
                    const std::vector<std::vector<double>>& outputs) {
    const int left = 70, right = 25, top = 25, bottom = 55;
    const double plot_w = kSvgWidth - left - right;
    const double plot_h = kSvgHeight - top - bottom;

    double xmax = 0.0, ymax = 0.0;
    for (std::size_t c = 0; c < inputs.size(); ++c) {
        for (double v : inputs[c]) xmax = std::max(xmax, v);
        for (double v : outputs[c]) ymax = std::max(ymax, v);
    }
    if (xmax <= 0.0) xmax = 1.0;
    if (ymax <= 0.0) ymax = 1.0;
    xmax *= 1.05;
    ymax *= 1.05;

    const auto px = [&](double x) { return left + x / xmax * plot_w; };
    const auto py = [&](double y) { return top + plot_h - y / ymax * plot_h; };

    std::ofstream out = open_output(path);
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
        << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << kSvgWidth << " "
        << kSvgHeight << "\">\n"
        << "<rect x=\"0\" y=\"0\" width=\"" << kSvgWidth << "\" height=\"" << kSvgHeight
        << "\" fill=\"white\"/>\n";

    // Axes with a few ticks.
    out << "<g stroke=\"#000\" stroke-width=\"1\">\n"
        << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\"" << left + plot_w
        << "\" y2=\"" << top + plot_h << "\"/>\n"
        << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left << "\" y2=\""
        << top + plot_h << "\"/>\n</g>\n";
    for (int t = 0; t <= 5; ++t) {
        const double fx = xmax * t / 5.0;
        const double fy = ymax * t / 5.0;
        out << "<text x=\"" << svg_num(px(fx)) << "\" y=\"" << kSvgHeight - bottom + 18
            << "\" font-size=\"12\" text-anchor=\"middle\">" << svg_num(fx) << "</text>\n";
        out << "<text x=\"" << left - 8 << "\" y=\"" << svg_num(py(fy) + 4)
            << "\" font-size=\"12\" text-anchor=\"end\">" << svg_num(fy) << "</text>\n";
    }
    out << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << kSvgHeight - 12
        << "\" font-size=\"14\" text-anchor=\"middle\">input distance squared</text>\n";
    out << "<text x=\"16\" y=\"" << top + plot_h / 2
        << "\" font-size=\"14\" text-anchor=\"middle\" transform=\"rotate(-90 16 "
        << top + plot_h / 2 << ")\">output distance squared</text>\n";

    // Scatter, subsampled with a fixed stride so the file stays small.
    const long per_shape_cap = std::max<long>(1, kSvgMaxPoints / std::max<std::size_t>(1, inputs.size()));
    for (std::size_t c = 0; c < inputs.size(); ++c) {
        const long count = static_cast<long>(inputs[c].size());
        const long stride = std::max<long>(1, (count + per_shape_cap - 1) / per_shape_cap);
        out << "<g fill=\"" << shape_color(c) << "\" fill-opacity=\"0.45\">\n";
        for (long i = 0; i < count; i += stride) {
            out << "<circle cx=\"" << svg_num(px(inputs[c][i])) << "\" cy=\""
                << svg_num(py(std::min(outputs[c][i], ymax))) << "\" r=\"2\"/>\n";
        }
        out << "</g>\n";
    }

    // Reference line: output == input.
    const double ref_end = std::min(xmax, ymax);
    out << "<line class=\"reference\" x1=\"" << svg_num(px(0.0)) << "\" y1=\"" << svg_num(py(0.0))
        << "\" x2=\"" << svg_num(px(ref_end)) << "\" y2=\"" << svg_num(py(ref_end))
        << "\" stroke=\"#000\" stroke-width=\"2\"/>\n";

    // One least-squares fit line per shape config.
    for (std::size_t c = 0; c < summaries.size(); ++c) {
        const double a = summaries[c].slope;
        const double b = summaries[c].intercept;
        double x_end = xmax;
        if (a > 0.0 && a * xmax + b > ymax) {
            x_end = (ymax - b) / a;
        }
        out << "<line class=\"fit\" x1=\"" << svg_num(px(0.0)) << "\" y1=\""
            << svg_num(py(std::clamp(b, 0.0, ymax))) << "\" x2=\"" << svg_num(px(x_end))
            << "\" y2=\"" << svg_num(py(std::clamp(a * x_end + b, 0.0, ymax)))
            << "\" stroke=\"" << shape_color(c) << "\" stroke-width=\"2.5\"/>\n";
        out << "<text x=\"" << left + 12 << "\" y=\"" << top + 18 + 18 * static_cast<int>(c)
            << "\" font-size=\"13\" fill=\"" << shape_color(c) << "\">" << summaries[c].tag
            << " fit slope " << svg_num(a) << "</text>\n";
    }

    out << "</svg>\n";
    finish_output(out, path);
}

}  // namespace

const char* to_string(ExperimentKind kind) {
    switch (kind) {
        case ExperimentKind::Fig1: return "fig1";
        case ExperimentKind::RicSweep: return "ric_sweep";
        case ExperimentKind::ChainBounds: return "chain_bounds";
        case ExperimentKind::KappaVsNoise: return "kappa_vs_noise";
    }
    return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
    if (name == "fig1") return ExperimentKind::Fig1;
    if (name == "ric_sweep" || name == "ric") return ExperimentKind::RicSweep;
    if (name == "chain_bounds" || name == "chain") return ExperimentKind::ChainBounds;
    if (name == "kappa_vs_noise" || name == "kappa-sweep") return ExperimentKind::KappaVsNoise;
    throw Error(Errc::config, "unknown experiment kind: " + std::string(name));
}

KvMap parse_kv_text(std::string_view text) {
    KvMap kv;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const std::size_t eol = std::min(text.find('\n', pos), text.size());
        const std::string line = trim(text.substr(pos, eol - pos));
        pos = eol + 1;
        if (line.empty() || line[0] == '#') continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos) {
            throw Error(Errc::config, "config: expected key=value, got: " + line);
        }
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (key.empty()) {
            throw Error(Errc::config, "config: empty key in line: " + line);
        }
        if (!kv.emplace(key, value).second) {
            throw Error(Errc::config, "config: duplicate key '" + key + "'");
        }
    }
    return kv;
}

KvMap parse_kv_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error(Errc::io, "cannot open config file: " + path);
    }
    std::ostringstream oss;
    oss << in.rdbuf();
    return parse_kv_text(oss.str());
}

std::string format_double(double value) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
    return std::string(buf, ptr);
}

// --------------------------------------------------------------------------
// fig1
// --------------------------------------------------------------------------

Fig1Config parse_fig1_config(const KvMap& kv) {
    KvReader reader(kv);
    Fig1Config cfg;
    cfg.m = static_cast<int>(reader.get_long("m", cfg.m));
    cfg.sigma = reader.get_double("sigma", cfg.sigma);
    cfg.sigma_delta = reader.get_double("sigma_delta", cfg.sigma_delta);
    cfg.samples = reader.get_long("samples", cfg.samples);
    cfg.seed = reader.get_u64("seed", cfg.seed);
    cfg.shapes = reader.get_int_list("shapes", cfg.shapes);
    cfg.splitter = reader.get_bool("splitter", cfg.splitter);
    cfg.fixed_weights = reader.get_bool("fixed_weights", cfg.fixed_weights);
    cfg.out_csv = reader.get_string_required("out_csv");
    cfg.out_svg = reader.get_string("out_svg", "");
    reader.finish("fig1");

    if (cfg.m < 1) throw Error(Errc::config, "fig1: m must be >= 1");
    if (cfg.samples < 1) throw Error(Errc::config, "fig1: samples must be >= 1");
    if (cfg.sigma <= 0.0 || cfg.sigma_delta <= 0.0) {
        throw Error(Errc::config, "fig1: sigma and sigma_delta must be > 0");
    }
    if (cfg.shapes.empty()) throw Error(Errc::config, "fig1: shapes must be nonempty");
    for (int n : cfg.shapes) {
        if (n < 1) throw Error(Errc::config, "fig1: shape rows must be >= 1");
    }
    return cfg;
}

Fig1Summary run_fig1(const Fig1Config& config) {
    const std::size_t num_shapes = config.shapes.size();
    std::vector<std::vector<double>> inputs(num_shapes);
    std::vector<std::vector<double>> outputs(num_shapes);
    for (auto& v : inputs) v.reserve(config.samples);
    for (auto& v : outputs) v.reserve(config.samples);

    std::vector<WeightMatrix> fixed;
    if (config.fixed_weights) {
        for (std::size_t c = 0; c < num_shapes; ++c) {
            fixed.push_back(build(EnsembleSpec{EnsembleKind::Gaussian, config.shapes[c], config.m,
                                               derive_seed(config.seed, {kTagWeights, c})}));
        }
    }

    for (long s = 0; s < config.samples; ++s) {
        Rng rng_q(derive_seed(config.seed, {kTagInput, static_cast<std::uint64_t>(s)}));
        Rng rng_d(derive_seed(config.seed, {kTagPerturbation, static_cast<std::uint64_t>(s)}));
        const Eigen::VectorXd q1 = gaussian_vector(config.m, config.sigma, rng_q);
        const Eigen::VectorXd delta = gaussian_vector(config.m, config.sigma_delta, rng_d);
        const Eigen::VectorXd q2 = q1 + delta;
        const double input_dist_sq = delta.squaredNorm();

        for (std::size_t c = 0; c < num_shapes; ++c) {
            const WeightMatrix& w =
                config.fixed_weights
                    ? fixed[c]
                    : build(EnsembleSpec{EnsembleKind::Gaussian, config.shapes[c], config.m,
                                         derive_seed(config.seed, {kTagWeights, c,
                                                                   static_cast<std::uint64_t>(s)})});
            const Eigen::VectorXd z1 = w.entries * q1;
            const Eigen::VectorXd z2 = w.entries * q2;
            const double output_dist_sq =
                config.splitter
                    ? (sign_split_forward(z1) - sign_split_forward(z2)).squaredNorm()
                    : (relu(z1) - relu(z2)).squaredNorm();
            inputs[c].push_back(input_dist_sq);
            outputs[c].push_back(output_dist_sq);
        }
    }

    Fig1Summary summary;
    for (std::size_t c = 0; c < num_shapes; ++c) {
        Fig1ShapeSummary shape;
        shape.n = config.shapes[c];
        shape.tag = "n=" + std::to_string(shape.n);
        shape.count = static_cast<long>(inputs[c].size());
        for (std::size_t i = 0; i < inputs[c].size(); ++i) {
            if (outputs[c][i] > inputs[c][i]) {
                ++shape.violations;
            }
        }
        const AffineFit fit = fit_affine(inputs[c], outputs[c]);
        shape.slope = fit.slope;
        shape.intercept = fit.intercept;
        summary.shapes.push_back(std::move(shape));
    }

    std::ofstream csv = open_output(config.out_csv);
    csv << "config,input_dist_sq,output_dist_sq\n";
    for (std::size_t c = 0; c < num_shapes; ++c) {
        for (std::size_t i = 0; i < inputs[c].size(); ++i) {
            csv << summary.shapes[c].tag << ',' << format_double(inputs[c][i]) << ','
                << format_double(outputs[c][i]) << '\n';
        }
    }
    finish_output(csv, config.out_csv);

    if (!config.out_svg.empty()) {
        write_fig1_svg(config.out_svg, summary.shapes, inputs, outputs);
    }
    return summary;
}

// --------------------------------------------------------------------------
// kappa-sweep
// --------------------------------------------------------------------------

KappaSweepConfig parse_kappa_sweep_config(const KvMap& kv) {
    KvReader reader(kv);
    KappaSweepConfig cfg;
    cfg.m = static_cast<int>(reader.get_long("m", cfg.m));
    cfg.n = static_cast<int>(reader.get_long("n", cfg.n));
    if (reader.has("ensemble")) {
        cfg.ensemble = reader.get_kind_list("ensemble", {cfg.ensemble}).at(0);
    }
    cfg.sigma = reader.get_double("sigma", cfg.sigma);
    cfg.sigma_delta_grid = reader.get_grid("sigma_delta_grid", cfg.sigma_delta_grid);
    cfg.trials = reader.get_long("trials", cfg.trials);
    cfg.seed = reader.get_u64("seed", cfg.seed);
    cfg.out_csv = reader.get_string_required("out_csv");
    reader.finish("kappa_vs_noise");

    if (cfg.m < 1 || cfg.n < 1) throw Error(Errc::config, "kappa_vs_noise: dims must be >= 1");
    if (cfg.trials < 1) throw Error(Errc::config, "kappa_vs_noise: trials must be >= 1");
    if (cfg.sigma <= 0.0) throw Error(Errc::config, "kappa_vs_noise: sigma must be > 0");
    if (cfg.sigma_delta_grid.empty()) {
        throw Error(Errc::config, "kappa_vs_noise: sigma_delta_grid must be nonempty");
    }
    for (double s : cfg.sigma_delta_grid) {
        if (s <= 0.0) throw Error(Errc::config, "kappa_vs_noise: sigma_delta values must be > 0");
    }
    validate(EnsembleSpec{cfg.ensemble, cfg.n, cfg.m, 0});
    return cfg;
}

KappaSweepSummary run_kappa_vs_noise(const KappaSweepConfig& config) {
    const std::size_t grid_size = config.sigma_delta_grid.size();
    std::vector<double> kappa_sum(grid_size, 0.0);
    std::vector<double> mismatch_sum(grid_size, 0.0);
    long counted = 0;
    long skipped = 0;

    for (long t = 0; t < config.trials; ++t) {
        Rng rng_q(derive_seed(config.seed, {kTagInput, static_cast<std::uint64_t>(t)}));
        Rng rng_u(derive_seed(config.seed, {kTagDirection, static_cast<std::uint64_t>(t)}));
        const WeightMatrix w = build(EnsembleSpec{
            config.ensemble, config.n, config.m,
            derive_seed(config.seed, {kTagWeights, static_cast<std::uint64_t>(t)})});
        const Eigen::VectorXd q1 = gaussian_vector(config.m, config.sigma, rng_q);
        const Eigen::VectorXd direction = gaussian_vector(config.m, 1.0, rng_u);
        const Eigen::VectorXd z1 = w.entries * q1;
        const Eigen::VectorXd step = w.entries * direction;

        // The base draw is shared across the grid; scaling a fixed direction
        // means each coordinate's sign can only flip once as sigma grows, so
        // the mismatch means below are monotone by construction.
        bool usable = true;
        std::vector<double> kappas(grid_size);
        std::vector<double> mismatches(grid_size);
        for (std::size_t g = 0; g < grid_size; ++g) {
            const Eigen::VectorXd z2 = z1 + config.sigma_delta_grid[g] * step;
            if (z2 == z1) {
                usable = false;
                break;
            }
            const PairAnalysis pair = analyze_pair(z1, z2);
            kappas[g] = pair.kappa;
            mismatches[g] = pair.mismatch_fraction();
        }
        if (!usable) {
            ++skipped;
            continue;
        }
        ++counted;
        for (std::size_t g = 0; g < grid_size; ++g) {
            kappa_sum[g] += kappas[g];
            mismatch_sum[g] += mismatches[g];
        }
    }

    KappaSweepSummary summary;
    summary.trials = config.trials;
    summary.skipped = skipped;
    for (std::size_t g = 0; g < grid_size; ++g) {
        KappaSweepRow row;
        row.sigma_delta = config.sigma_delta_grid[g];
        row.mean_kappa = counted > 0 ? kappa_sum[g] / counted : 0.0;
        row.mean_mismatch_fraction = counted > 0 ? mismatch_sum[g] / counted : 0.0;
        summary.rows.push_back(row);
    }

    std::ofstream csv = open_output(config.out_csv);
    csv << "sigma_delta,mean_kappa,mean_mismatch_fraction\n";
    for (const KappaSweepRow& row : summary.rows) {
        csv << format_double(row.sigma_delta) << ',' << format_double(row.mean_kappa) << ','
            << format_double(row.mean_mismatch_fraction) << '\n';
    }
    finish_output(csv, config.out_csv);
    return summary;
}

// --------------------------------------------------------------------------
// ric sweep
// --------------------------------------------------------------------------

RicSweepConfig parse_ric_sweep_config(const KvMap& kv) {
    KvReader reader(kv);
    RicSweepConfig cfg;
    cfg.ensembles = reader.get_kind_list("ensemble", {EnsembleKind::Gaussian});
    cfg.rows_grid = reader.get_int_list("n", {});
    cfg.cols_grid = reader.get_int_list("m", {});
    cfg.nu_grid = reader.get_int_list("nu", {});
    cfg.trials = reader.get_long("trials", cfg.trials);
    cfg.seed = reader.get_u64("seed", cfg.seed);
    cfg.out_csv = reader.get_string_required("out_csv");
    reader.finish("ric_sweep");

    if (cfg.ensembles.empty() || cfg.rows_grid.empty() || cfg.cols_grid.empty() ||
        cfg.nu_grid.empty()) {
        throw Error(Errc::config, "ric_sweep: ensemble, n, m and nu must all be nonempty");
    }
    if (cfg.trials < 1) throw Error(Errc::config, "ric_sweep: trials must be >= 1");

    // Reject invalid grid points up front so no partial file gets written.
    for (EnsembleKind kind : cfg.ensembles) {
        for (int n : cfg.rows_grid) {
            for (int m : cfg.cols_grid) {
                validate(EnsembleSpec{kind, n, m, 0});
                for (int nu : cfg.nu_grid) {
                    if (nu < 1 || nu > m) {
                        throw Error(Errc::config, "ric_sweep: nu must lie in [1, m]");
                    }
                }
            }
        }
    }
    return cfg;
}

RicSweepSummary run_ric_sweep(const RicSweepConfig& config) {
    RicSweepSummary summary;
    std::uint64_t point = 0;
    for (EnsembleKind kind : config.ensembles) {
        for (int n : config.rows_grid) {
            for (int m : config.cols_grid) {
                for (int nu : config.nu_grid) {
                    const WeightMatrix w = build(EnsembleSpec{
                        kind, n, m, derive_seed(config.seed, {kTagWeights, point})});
                    const RipEstimate est = estimate_ric(
                        w, nu, config.trials, derive_seed(config.seed, {kTagInput, point}));
                    summary.rows.push_back(
                        RicSweepRow{kind, n, m, nu, config.trials, est.delta_hat});
                    ++point;
                }
            }
        }
    }

    std::ofstream csv = open_output(config.out_csv);
    csv << "ensemble,n,m,nu,trials,delta_hat\n";
    for (const RicSweepRow& row : summary.rows) {
        csv << to_string(row.ensemble) << ',' << row.n << ',' << row.m << ',' << row.nu << ','
            << row.trials << ',' << format_double(row.delta_hat) << '\n';
    }
    finish_output(csv, config.out_csv);
    return summary;
}

// --------------------------------------------------------------------------
// chain bounds
// --------------------------------------------------------------------------

ChainBoundsConfig parse_chain_bounds_config(const KvMap& kv) {
    KvReader reader(kv);
    ChainBoundsConfig cfg;
    cfg.input_dim = static_cast<int>(reader.get_long("input_dim", cfg.input_dim));
    cfg.splitter = reader.get_bool("splitter", cfg.splitter);
    cfg.kinds = reader.get_kind_list("kind", {EnsembleKind::RandomOrthonormal});
    cfg.rows = reader.get_int_list("n", {});
    cfg.deltas = reader.get_double_list("deltas", {});
    cfg.sigma = reader.get_double("sigma", cfg.sigma);
    cfg.sigma_delta = reader.get_double("sigma_delta", cfg.sigma_delta);
    cfg.pairs = reader.get_long("pairs", cfg.pairs);
    cfg.seed = reader.get_u64("seed", cfg.seed);
    cfg.out_csv = reader.get_string_required("out_csv");
    reader.finish("chain_bounds");

    if (cfg.rows.empty()) throw Error(Errc::config, "chain_bounds: n must list one size per layer");
    if (cfg.kinds.size() == 1 && cfg.rows.size() > 1) {
        cfg.kinds.assign(cfg.rows.size(), cfg.kinds[0]);
    }
    if (cfg.kinds.size() != cfg.rows.size()) {
        throw Error(Errc::config, "chain_bounds: kind list must have one entry or one per layer");
    }
    if (cfg.deltas.empty()) {
        cfg.deltas.assign(cfg.rows.size(), 0.0);
    }
    if (cfg.deltas.size() != cfg.rows.size()) {
        throw Error(Errc::config, "chain_bounds: deltas must have one entry per layer");
    }
    for (double d : cfg.deltas) {
        if (d < 0.0 || d >= 1.0) {
            throw Error(Errc::config, "chain_bounds: deltas must lie in [0, 1)");
        }
    }
    if (cfg.input_dim < 1) throw Error(Errc::config, "chain_bounds: input_dim must be >= 1");
    if (cfg.pairs < 1) throw Error(Errc::config, "chain_bounds: pairs must be >= 1");
    if (cfg.sigma <= 0.0 || cfg.sigma_delta <= 0.0) {
        throw Error(Errc::config, "chain_bounds: sigma and sigma_delta must be > 0");
    }
    return cfg;
}

NetworkSpec chain_network_spec(const ChainBoundsConfig& config) {
    NetworkSpec spec;
    spec.splitter = config.splitter;
    spec.input_dim = config.input_dim;
    int cols = config.input_dim;
    for (std::size_t l = 0; l < config.rows.size(); ++l) {
        spec.layers.push_back(EnsembleSpec{config.kinds[l], config.rows[l], cols,
                                           derive_seed(config.seed, {kTagWeights, l})});
        cols = config.splitter ? 2 * config.rows[l] : config.rows[l];
    }
    return spec;
}

ChainBoundsSummary run_chain_bounds(const ChainBoundsConfig& config) {
    const NetworkSpec spec = chain_network_spec(config);
    const Network net = build_network(spec);
    const int depth = net.depth();
    const std::vector<double> deltas =
        config.deltas.empty() ? std::vector<double>(depth, 0.0) : config.deltas;

    ChainBoundsSummary summary;
    summary.pairs = config.pairs;
    summary.mean_kappas.assign(depth, 0.0);

    struct Row {
        double input_dist_sq;
        double output_dist_sq;
        double lower;
        double upper;
        bool verdict;
    };
    std::vector<Row> csv_rows;
    csv_rows.reserve(config.pairs);

    for (long p = 0; p < config.pairs; ++p) {
        Rng rng_x(derive_seed(config.seed, {kTagInput, static_cast<std::uint64_t>(p)}));
        Rng rng_d(derive_seed(config.seed, {kTagPerturbation, static_cast<std::uint64_t>(p)}));
        const Eigen::VectorXd x1 = gaussian_vector(config.input_dim, config.sigma, rng_x);
        const Eigen::VectorXd delta = gaussian_vector(config.input_dim, config.sigma_delta, rng_d);
        const Eigen::VectorXd x2 = x1 + delta;
        try {
            const ChainBoundReport report = analyze_chain(net, x1, x2, config.deltas);
            csv_rows.push_back(Row{report.input_dist_sq, report.output_dist_sq, report.lower,
                                   report.upper, report.verdict});
            if (report.verdict) {
                ++summary.passes;
            }
            for (int l = 0; l < depth; ++l) {
                summary.mean_kappas[l] += report.kappas[l];
            }
        } catch (const Error& err) {
            if (err.code() == Errc::layer_collapse || err.code() == Errc::degenerate_pair) {
                ++summary.collapses;
            } else {
                throw;
            }
        }
    }
    const long counted = summary.pairs - summary.collapses;
    if (counted > 0) {
        for (double& k : summary.mean_kappas) {
            k /= counted;
        }
    }

    std::ofstream csv = open_output(config.out_csv);
    csv << "input_dist_sq,output_dist_sq,product_lower,product_upper,verdict\n";
    for (const Row& row : csv_rows) {
        csv << format_double(row.input_dist_sq) << ',' << format_double(row.output_dist_sq) << ','
            << format_double(row.lower) << ',' << format_double(row.upper) << ','
            << (row.verdict ? 1 : 0) << '\n';
    }
    finish_output(csv, config.out_csv);
    return summary;
}

}  // namespace r3net
