#pragma once

// Exception taxonomy shared across the library.  The CLI maps ConfigError to
// exit code 2 and NumericalError (and derived) to exit code 3.

#include <stdexcept>
#include <string>

namespace heatcq {

struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

struct NumericalError : std::runtime_error {
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// A field-evaluation point too close to the boundary for reliable quadrature.
struct NearSingularError : NumericalError {
    explicit NearSingularError(const std::string& what) : NumericalError(what) {}
};

// A CQ contour frequency left the admissible region or a per-frequency
// factorization failed.
struct ContourError : NumericalError {
    explicit ContourError(const std::string& what) : NumericalError(what) {}
};

}  // namespace heatcq
