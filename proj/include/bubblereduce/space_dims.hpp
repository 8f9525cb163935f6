#pragma once

#include <cmath>
#include <optional>
#include <string>

#include "bubblereduce/errors.hpp"

namespace bubblereduce {

/// The dimension triple (N, k, h) of the cylindrical splitting
/// R^N = R^k x R^h, with the optional Heisenberg index n when the
/// instance arises from the CR problem (then k = n+1, h = 1, Q = 2n+2).
struct SpaceDims {
    int k = 0;  ///< dimension of the y-block
    int h = 0;  ///< dimension of the z-block
    int N = 0;  ///< total dimension, N = k + h
    std::optional<int> cr_n;

    SpaceDims() = default;
    SpaceDims(int N_, int k_, int h_, std::optional<int> n = std::nullopt)
        : k(k_), h(h_), N(N_), cr_n(n) {
        validate();
    }

    /// The CR instance for Heisenberg index n: k = n+1, h = 1, N = n+2.
    static SpaceDims from_cr(int n) { return SpaceDims(n + 2, n + 1, 1, n); }

    /// Homogeneous dimension Q = 2n+2 of the originating Heisenberg group.
    int Q() const {
        if (!cr_n) throw domain_error("SpaceDims: Q requested but no CR origin");
        return 2 * *cr_n + 2;
    }

    void validate() const {
        if (k < 2 || h < 1 || N != k + h || N < 3)
            throw domain_error("SpaceDims: need k >= 2, h >= 1, N = k + h >= 3");
        if (cr_n && (k != *cr_n + 1 || h != 1))
            throw domain_error("SpaceDims: CR instance requires k = n+1, h = 1");
    }

    bool operator==(const SpaceDims& o) const {
        return N == o.N && k == o.k && h == o.h;
    }
};

/// Measure of the (N-1)-sphere, omega_N = 2 pi^{N/2} / Gamma(N/2).
inline double sphere_measure(double N) {
    return 2.0 * std::exp(0.5 * N * std::log(M_PI) - std::lgamma(0.5 * N));
}

/// C_{N,k} = [(N-2)(k-1)]^{N-1}.
inline double c_nk(const SpaceDims& d) {
    return std::pow(double((d.N - 2) * (d.k - 1)), d.N - 1);
}

inline std::string dims_str(const SpaceDims& d) {
    return std::to_string(d.N) + "," + std::to_string(d.k) + "," + std::to_string(d.h);
}

}  // namespace bubblereduce
