#pragma once

#include <stdexcept>
#include <string>

namespace r3net {

// Error categories mirror the status codes of the C API and the CLI exit
// code mapping (config -> 1, io -> 2).
enum class Errc {
    invalid_argument,
    dimension_mismatch,
    degenerate_pair,
    layer_collapse,
    config,
    io,
};

class Error : public std::runtime_error {
public:
    Error(Errc code, std::string message)
        : std::runtime_error(std::move(message)), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

// Raised by chain analysis when both pre-activations coincide exactly at an
// inner layer; carries the offending layer (0-based).
class LayerCollapseError : public Error {
public:
    LayerCollapseError(int layer, std::string message)
        : Error(Errc::layer_collapse, std::move(message)), layer_(layer) {}

    int layer() const noexcept { return layer_; }

private:
    int layer_;
};

}  // namespace r3net
