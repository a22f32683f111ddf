#include "core/ensembles.hpp"

#include <bit>
#include <cmath>
#include <sstream>

#include "core/errors.hpp"
#include "core/rng.hpp"

namespace r3net {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool is_power_of_two(int n) {
    return n >= 1 && std::has_single_bit(static_cast<unsigned>(n));
}

Eigen::MatrixXd gaussian_matrix(int n, int m, Rng& rng, double stddev) {
    Eigen::MatrixXd w(n, m);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            w(i, j) = stddev * rng.next_gaussian();
        }
    }
    return w;
}

Eigen::MatrixXd rademacher_matrix(int n, int m, Rng& rng) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    Eigen::MatrixXd w(n, m);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            w(i, j) = (rng.next_u64() & 1ull) ? scale : -scale;
        }
    }
    return w;
}

Eigen::MatrixXd bernoulli_matrix(int n, int m, Rng& rng) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    Eigen::MatrixXd w(n, m);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < m; ++j) {
            w(i, j) = (rng.next_u64() & 1ull) ? scale : 0.0;
        }
    }
    // Column-center so differences of sparse vectors are mapped approximately
    // isometrically; the raw {0, 1/sqrt(n)} ensemble has a large mean offset.
    for (int j = 0; j < m; ++j) {
        w.col(j).array() -= w.col(j).mean();
    }
    return w;
}

Eigen::MatrixXd random_orthonormal_matrix(int n, int m, Rng& rng) {
    Eigen::MatrixXd a = gaussian_matrix(n, m, rng, 1.0);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(n, m);
    // Fixing the R diagonal signs positive makes the draw a canonical
    // Haar-measure sample instead of depending on the QR sign convention.
    const Eigen::MatrixXd& qr_mat = qr.matrixQR();
    for (int j = 0; j < m; ++j) {
        if (qr_mat(j, j) < 0.0) {
            q.col(j) = -q.col(j);
        }
    }
    return q;
}

Eigen::MatrixXd dct_matrix(int n, int m) {
    Eigen::MatrixXd w(n, m);
    const double s0 = std::sqrt(1.0 / n);
    const double s = std::sqrt(2.0 / n);
    for (int j = 0; j < m; ++j) {
        const double sj = (j == 0) ? s0 : s;
        for (int i = 0; i < n; ++i) {
            w(i, j) = sj * std::cos(kPi * (2.0 * i + 1.0) * j / (2.0 * n));
        }
    }
    return w;
}

Eigen::MatrixXd walsh_hadamard_matrix(int n) {
    const double scale = 1.0 / std::sqrt(static_cast<double>(n));
    Eigen::MatrixXd w(n, n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            const int parity = std::popcount(static_cast<unsigned>(i & j)) & 1;
            w(i, j) = parity ? -scale : scale;
        }
    }
    return w;
}

Eigen::MatrixXd haar_matrix(int n) {
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    Eigen::MatrixXd h(1, 1);
    h(0, 0) = 1.0;
    for (int s = 1; s < n; s *= 2) {
        Eigen::MatrixXd next = Eigen::MatrixXd::Zero(2 * s, 2 * s);
        // Coarse rows: each parent basis function stretched over pairs.
        for (int r = 0; r < s; ++r) {
            for (int c = 0; c < s; ++c) {
                next(r, 2 * c) = h(r, c) * inv_sqrt2;
                next(r, 2 * c + 1) = h(r, c) * inv_sqrt2;
            }
        }
        // Fine rows: one wavelet per pair.
        for (int r = 0; r < s; ++r) {
            next(s + r, 2 * r) = inv_sqrt2;
            next(s + r, 2 * r + 1) = -inv_sqrt2;
        }
        h = std::move(next);
    }
    return h;
}

std::uint64_t kind_tag(EnsembleKind kind) {
    return static_cast<std::uint64_t>(kind) + 1;
}

}  // namespace

const char* to_string(EnsembleKind kind) {
    switch (kind) {
        case EnsembleKind::Gaussian: return "gaussian";
        case EnsembleKind::Rademacher: return "rademacher";
        case EnsembleKind::Bernoulli: return "bernoulli";
        case EnsembleKind::RandomOrthonormal: return "random_orthonormal";
        case EnsembleKind::Dct: return "dct";
        case EnsembleKind::WalshHadamard: return "walsh_hadamard";
        case EnsembleKind::Haar: return "haar";
    }
    return "unknown";
}

EnsembleKind parse_ensemble_kind(std::string_view name) {
    if (name == "gaussian") return EnsembleKind::Gaussian;
    if (name == "rademacher") return EnsembleKind::Rademacher;
    if (name == "bernoulli") return EnsembleKind::Bernoulli;
    if (name == "random_orthonormal") return EnsembleKind::RandomOrthonormal;
    if (name == "dct") return EnsembleKind::Dct;
    if (name == "walsh_hadamard") return EnsembleKind::WalshHadamard;
    if (name == "haar") return EnsembleKind::Haar;
    throw Error(Errc::invalid_argument,
                "unknown ensemble kind: " + std::string(name));
}

bool is_orthonormal_kind(EnsembleKind kind) {
    switch (kind) {
        case EnsembleKind::RandomOrthonormal:
        case EnsembleKind::Dct:
        case EnsembleKind::WalshHadamard:
        case EnsembleKind::Haar:
            return true;
        default:
            return false;
    }
}

std::string EnsembleSpec::describe() const {
    std::ostringstream oss;
    oss << to_string(kind) << " " << rows << "x" << cols << " seed=" << seed;
    return oss.str();
}

void validate(const EnsembleSpec& spec) {
    if (spec.rows < 1 || spec.cols < 1) {
        throw Error(Errc::invalid_argument,
                    "ensemble dimensions must be >= 1: " + spec.describe());
    }
    if (is_orthonormal_kind(spec.kind) && spec.rows < spec.cols) {
        throw Error(Errc::dimension_mismatch,
                    "orthonormal ensembles need rows >= cols: " + spec.describe());
    }
    if (spec.kind == EnsembleKind::WalshHadamard || spec.kind == EnsembleKind::Haar) {
        if (spec.rows != spec.cols) {
            throw Error(Errc::dimension_mismatch,
                        "walsh_hadamard/haar need rows == cols: " + spec.describe());
        }
        if (!is_power_of_two(spec.rows)) {
            throw Error(Errc::invalid_argument,
                        "walsh_hadamard/haar need a power-of-two size: " + spec.describe());
        }
    }
}

WeightMatrix build(const EnsembleSpec& spec) {
    validate(spec);
    const int n = spec.rows;
    const int m = spec.cols;
    Rng rng(derive_seed(spec.seed, {kind_tag(spec.kind),
                                    static_cast<std::uint64_t>(n),
                                    static_cast<std::uint64_t>(m)}));
    Eigen::MatrixXd entries;
    switch (spec.kind) {
        case EnsembleKind::Gaussian:
            entries = gaussian_matrix(n, m, rng, 1.0 / std::sqrt(static_cast<double>(n)));
            break;
        case EnsembleKind::Rademacher:
            entries = rademacher_matrix(n, m, rng);
            break;
        case EnsembleKind::Bernoulli:
            entries = bernoulli_matrix(n, m, rng);
            break;
        case EnsembleKind::RandomOrthonormal:
            entries = random_orthonormal_matrix(n, m, rng);
            break;
        case EnsembleKind::Dct:
            entries = dct_matrix(n, m);
            break;
        case EnsembleKind::WalshHadamard:
            entries = walsh_hadamard_matrix(n);
            break;
        case EnsembleKind::Haar:
            entries = haar_matrix(n);
            break;
    }
    return WeightMatrix{std::move(entries), spec};
}

Eigen::VectorXd apply(const WeightMatrix& w, const Eigen::VectorXd& q) {
    if (q.size() != w.entries.cols()) {
        std::ostringstream oss;
        oss << "apply: vector length " << q.size() << " != cols " << w.entries.cols();
        throw Error(Errc::dimension_mismatch, oss.str());
    }
    return w.entries * q;
}

void walsh_hadamard_inplace(std::span<double> data) {
    const std::size_t n = data.size();
    if (!is_power_of_two(static_cast<int>(n))) {
        throw Error(Errc::invalid_argument,
                    "walsh_hadamard_inplace needs a power-of-two length");
    }
    for (std::size_t h = 1; h < n; h *= 2) {
        for (std::size_t i = 0; i < n; i += 2 * h) {
            for (std::size_t j = i; j < i + h; ++j) {
                const double x = data[j];
                const double y = data[j + h];
                data[j] = x + y;
                data[j + h] = x - y;
            }
        }
    }
}

}  // namespace r3net
