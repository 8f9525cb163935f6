#pragma once

#include <cmath>
#include <string>

#include "bubblereduce/errors.hpp"

namespace bubblereduce {

/// Euler Beta function via log-gamma.  Requires a, b > 0.
inline double beta_fn(double a, double b) {
    if (!(a > 0.0) || !(b > 0.0))
        throw domain_error("beta_fn: requires a > 0 and b > 0, got a=" +
                           std::to_string(a) + ", b=" + std::to_string(b));
    return std::exp(std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b));
}

/// int_0^inf s^m / (1+s)^n ds = B(m+1, n-m-1).  Convergent for 0 < m+1 < n.
inline double beta_integral_s(double m, double n) {
    if (!(m + 1.0 > 0.0))
        throw domain_error("beta_integral_s: divergent at 0, violates m + 1 > 0");
    if (!(n - m - 1.0 > 0.0))
        throw domain_error("beta_integral_s: divergent at infinity, violates m + 1 < n");
    return beta_fn(m + 1.0, n - m - 1.0);
}

/// int_0^inf t^{a-1} / (1+t^2)^n dt = (1/2) B(a/2, n - a/2).
/// Convergent for 0 < a < 2n.
inline double beta_integral_t(double a, double n) {
    if (!(a > 0.0))
        throw domain_error("beta_integral_t: divergent at 0, violates a > 0");
    if (!(2.0 * n - a > 0.0))
        throw domain_error("beta_integral_t: divergent at infinity, violates a < 2n");
    return 0.5 * beta_fn(0.5 * a, n - 0.5 * a);
}

/// (x + y)^p - x^p - y^p for x, y >= 0, p > 1, evaluated without the
/// catastrophic cancellation the naive form suffers when the two inputs
/// differ by many orders of magnitude (x^p swamps the p x^{p-1} y + ... tail
/// in double precision).
inline double power_excess(double x, double y, double p) {
    if (x < y) std::swap(x, y);
    if (!(y > 0.0)) return 0.0;
    const double r = y / x;
    return std::pow(x, p) * std::expm1(p * std::log1p(r)) - std::pow(y, p);
}

struct RecurrenceReport {
    double rel_diff_1;  ///< power-shift recurrence in (1+s)
    double rel_diff_2;  ///< exponent-raise recurrence in s
    double rel_diff_3;  ///< power-shift recurrence in (1+t^2)
    double max_rel_diff;
};

/// Evaluates both sides of the three one-dimensional reduction recurrences
/// through the Beta primitives and reports the relative discrepancies.
/// Valid for 0 < m < n - 1.
inline RecurrenceReport check_recurrences(double m, double n) {
    if (!(m > 0.0) || !(m < n - 1.0))
        throw domain_error("check_recurrences: requires 0 < m < n - 1");
    auto rel = [](double a, double b) { return std::fabs(a - b) / std::fabs(b); };

    // int s^m/(1+s)^{n+1} = (n-m-1)/n * int s^m/(1+s)^n
    double r1 = rel(beta_integral_s(m, n + 1.0),
                    (n - m - 1.0) / n * beta_integral_s(m, n));
    // int s^{m+1}/(1+s)^{n+1} = (m+1)/(n-m-1) * int s^m/(1+s)^{n+1}
    double r2 = rel(beta_integral_s(m + 1.0, n + 1.0),
                    (m + 1.0) / (n - m - 1.0) * beta_integral_s(m, n + 1.0));
    // int t^{m-2}/(1+t^2)^n = (2n-m-1)/(2(n-1)) * int t^{m-2}/(1+t^2)^{n-1}
    // (requires m > 1 for convergence at 0 of the t-form with a = m-1)
    double r3 = 0.0;
    if (m > 1.0 && n > 1.0 && m - 1.0 < 2.0 * (n - 1.0)) {
        r3 = rel(beta_integral_t(m - 1.0, n),
                 (2.0 * n - m - 1.0) / (2.0 * (n - 1.0)) * beta_integral_t(m - 1.0, n - 1.0));
    }
    return {r1, r2, r3, std::fmax(r1, std::fmax(r2, r3))};
}

}  // namespace bubblereduce
