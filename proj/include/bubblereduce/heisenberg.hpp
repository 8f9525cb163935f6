#pragma once

#include <cmath>

#include "bubblereduce/errors.hpp"

namespace bubblereduce {

/// The cylindrical extremal V_{s,lambda} of the critical Heisenberg problem
///   -Delta_{H^n} V = V^{(Q+2)/(Q-2)},  Q = 2n + 2,
/// with normalization c_0 = (2n)^n:
///   V_{s,lambda}(Z, t) = (2n)^n lambda^{(Q-2)/2}
///                        [(1 + lambda^2 |Z|^2)^2 + lambda^4 (t - s)^2]^{-(Q-2)/4}.
struct HeisenbergBubble {
    int n = 1;
    double s = 0.0;       ///< center on the t-axis
    double lambda = 1.0;

    HeisenbergBubble(int n_, double s_, double lam) : n(n_), s(s_), lambda(lam) {
        if (n < 1) throw domain_error("HeisenbergBubble: n >= 1 required");
        if (!(lambda > 0.0)) throw domain_error("HeisenbergBubble: lambda > 0 required");
    }

    int Q() const { return 2 * n + 2; }
    double c0() const { return std::pow(2.0 * n, n); }

    /// Value at |Z| = r, t.
    double value(double r, double t) const {
        const double q2 = 0.5 * (Q() - 2);
        const double a = 1.0 + lambda * lambda * r * r;
        const double b = lambda * lambda * (t - s);
        return c0() * std::pow(lambda, q2) * std::pow(a * a + b * b, -0.5 * q2);
    }
};

}  // namespace bubblereduce
