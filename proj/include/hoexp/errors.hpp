#pragma once

#include <stdexcept>
#include <string>

namespace hoexp {

// Bad user input: malformed config, unknown keys, invalid parameter ranges.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Numeric domain failures: non-finite functionals, density underflow,
// regularity violations, root-finding breakdown.
struct NumericError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Adaptive quadrature did not reach the requested tolerance at max refinement.
struct QuadratureError : NumericError {
    using NumericError::NumericError;
};

// MLE solver-failure fraction exceeded the configured threshold.
struct SolverFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace hoexp
