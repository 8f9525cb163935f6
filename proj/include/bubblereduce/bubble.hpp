#pragma once

#include <cmath>
#include <vector>

#include "bubblereduce/errors.hpp"
#include "bubblereduce/space_dims.hpp"

namespace bubblereduce {

/// A standard solution U_{eta,lambda} of the limiting Hardy-Sobolev problem
///   -Delta U = U^{N/(N-2)} / |y|  on R^k x R^h.
/// Cylindrical in y, so every evaluation takes s = |y| and the z-offset from
/// the center.  Immutable after construction; all member functions are pure.
struct Bubble {
    SpaceDims dims;
    std::vector<double> eta;  ///< center in R^h
    double lambda = 1.0;      ///< concentration scale

    Bubble(SpaceDims d, std::vector<double> center, double lam)
        : dims(d), eta(std::move(center)), lambda(lam) {
        if (!(lambda > 0.0)) throw domain_error("Bubble: lambda > 0 required");
        if (int(eta.size()) != dims.h) throw domain_error("Bubble: eta needs h components");
    }

    /// [(N-2)(k-1)]^{(N-2)/2}, the normalizing prefactor.
    double prefactor() const {
        return std::pow(double((dims.N - 2) * (dims.k - 1)), 0.5 * (dims.N - 2));
    }

    /// Denominator (1 + lambda s)^2 + lambda^2 t^2 at s = |y|, t = |z - eta|.
    double denom(double s, double t) const {
        const double a = 1.0 + lambda * s;
        const double b = lambda * t;
        return a * a + b * b;
    }

    /// U at (s, t) with t = |z - eta|.  Finite everywhere, including s = 0.
    double value(double s, double t) const {
        const double m = 0.5 * (dims.N - 2);
        return prefactor() * std::pow(lambda, m) * std::pow(denom(s, t), -m);
    }

    /// dU/dlambda at (s, t).
    double dlambda(double s, double t) const {
        const double m = 0.5 * (dims.N - 2);
        const double D = denom(s, t);
        const double dD = 2.0 * (1.0 + lambda * s) * s + 2.0 * lambda * t * t;
        return m * value(s, t) * (1.0 / lambda - dD / D);
    }

    /// dU/deta_i at a point with z - eta component dz_i in direction i and
    /// total z-offset t (t >= |dz_i|).
    double deta(double s, double dz_i, double t) const {
        const double m = 0.5 * (dims.N - 2);
        return 2.0 * m * lambda * lambda * dz_i * value(s, t) / denom(s, t);
    }

    // Closed-form pieces of the cylindrical Laplacian
    //   Delta = d_ss + (k-1)/s d_s + d_tt + (h-1)/t d_t
    // (acting on the profile in s = |y|, t = |z - eta|).

    double d_s(double s, double t) const {
        const double m = 0.5 * (dims.N - 2);
        const double D = denom(s, t);
        return -2.0 * m * prefactor() * std::pow(lambda, m + 1.0) * (1.0 + lambda * s) *
               std::pow(D, -m - 1.0);
    }

    double d_ss(double s, double t) const {
        const double m = 0.5 * (dims.N - 2);
        const double D = denom(s, t);
        const double a = 1.0 + lambda * s;
        return prefactor() * std::pow(lambda, m) *
               (4.0 * m * (m + 1.0) * lambda * lambda * a * a * std::pow(D, -m - 2.0) -
                2.0 * m * lambda * lambda * std::pow(D, -m - 1.0));
    }

    /// d_t U / t, finite at t = 0.
    double d_t_over_t(double s, double t) const {
        const double m = 0.5 * (dims.N - 2);
        return -2.0 * m * prefactor() * std::pow(lambda, m + 2.0) *
               std::pow(denom(s, t), -m - 1.0);
    }

    double d_tt(double s, double t) const {
        const double m = 0.5 * (dims.N - 2);
        const double D = denom(s, t);
        return prefactor() * std::pow(lambda, m) *
               (4.0 * m * (m + 1.0) * std::pow(lambda, 4.0) * t * t * std::pow(D, -m - 2.0) -
                2.0 * m * lambda * lambda * std::pow(D, -m - 1.0));
    }

    /// s * (Delta U), assembled without the removable 1/s and 1/t
    /// singularities.  For the exact bubble s*Delta U + U^{N/(N-2)} == 0
    /// pointwise.
    double s_times_laplacian(double s, double t) const {
        return s * d_ss(s, t) + (dims.k - 1) * d_s(s, t) + s * d_tt(s, t) +
               (dims.h - 1) * s * d_t_over_t(s, t);
    }
};

/// Euclidean bubble evaluated at a split point x = (y, z) given as
/// (s = |y|, z-vector); convenience for callers holding full coordinates.
inline double bubble_eval(const Bubble& b, double s, const std::vector<double>& z) {
    if (int(z.size()) != b.dims.h) throw domain_error("bubble_eval: z needs h components");
    double t2 = 0.0;
    for (int i = 0; i < b.dims.h; ++i) {
        const double d = z[i] - b.eta[i];
        t2 += d * d;
    }
    return b.value(s, std::sqrt(t2));
}

}  // namespace bubblereduce
