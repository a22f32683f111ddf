#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace r3net {

enum class EnsembleKind {
    Gaussian,
    Rademacher,
    Bernoulli,
    RandomOrthonormal,
    Dct,
    WalshHadamard,
    Haar,
};

const char* to_string(EnsembleKind kind);
EnsembleKind parse_ensemble_kind(std::string_view name);

// Kinds whose realized matrix has exactly orthonormal columns.
bool is_orthonormal_kind(EnsembleKind kind);

struct EnsembleSpec {
    EnsembleKind kind = EnsembleKind::Gaussian;
    int rows = 0;           // n
    int cols = 0;           // m
    std::uint64_t seed = 0; // ignored for deterministic kinds

    std::string describe() const;
};

// Throws Error(invalid_argument / dimension_mismatch) when the spec breaks an
// ensemble constraint (orthonormal kinds need rows >= cols; Walsh-Hadamard and
// Haar need a square power-of-two size).
void validate(const EnsembleSpec& spec);

// A realized linear transform with its provenance. Immutable after build.
struct WeightMatrix {
    Eigen::MatrixXd entries;
    EnsembleSpec spec;

    int rows() const { return static_cast<int>(entries.rows()); }
    int cols() const { return static_cast<int>(entries.cols()); }
};

// Deterministic in spec: identical specs give bit-identical matrices.
//   Gaussian          — i.i.d. N(0, 1/n)
//   Rademacher        — +-1/sqrt(n) equiprobable
//   Bernoulli         — {0, 1/sqrt(n)} equiprobable, then column-mean-centered
//   RandomOrthonormal — thin QR of an i.i.d. N(0,1) matrix, R diagonal signs
//                       fixed positive (Haar-distributed sample)
//   Dct               — first m columns of the orthonormal type-II DCT basis
//   WalshHadamard     — Sylvester Hadamard scaled by 1/sqrt(n)
//   Haar              — orthonormal Haar wavelet basis, coarse-to-fine rows
WeightMatrix build(const EnsembleSpec& spec);

// z = W q. Throws Error(dimension_mismatch) unless q.size() == cols.
Eigen::VectorXd apply(const WeightMatrix& w, const Eigen::VectorXd& q);

// In-place unnormalized Walsh-Hadamard butterfly; data.size() must be a power
// of two. Scaling by 1/sqrt(n) gives the WalshHadamard ensemble's action.
void walsh_hadamard_inplace(std::span<double> data);

}  // namespace r3net
