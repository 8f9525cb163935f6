#pragma once

#include <stdexcept>
#include <string>

namespace bubblereduce {

/// Base class for all library errors.
struct error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid parameters: divergent integral, out-of-range exponent, bad dims.
struct domain_error : error {
    using error::error;
};

/// Geometrically degenerate input (coincident centers, zero profile, ...).
struct degenerate_error : error {
    using error::error;
};

/// Adaptive quadrature exhausted its depth/panel budget.  Carries the best
/// estimate so callers can decide whether to accept it.
struct tolerance_failure : error {
    double best_estimate;
    double err_est;
    tolerance_failure(const std::string& msg, double value, double err)
        : error(msg), best_estimate(value), err_est(err) {}
};

/// Newton iteration failed to converge.
struct no_convergence_error : error {
    using error::error;
};

/// Degree computation hit a (near-)zero on the box boundary.
struct inconclusive_degree_error : error {
    using error::error;
};

/// Model fails an admissibility requirement (g <= 0, boundary minimizer, ...).
struct admissibility_error : error {
    using error::error;
};

/// A computed certificate (degree, sign ledger) does not have the required value.
struct certificate_error : error {
    using error::error;
};

}  // namespace bubblereduce
