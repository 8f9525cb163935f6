#pragma once

#include <array>
#include <cmath>
#include <map>
#include <mutex>
#include <string>
#include <vector>

#include "bubblereduce/bubble.hpp"
#include "bubblereduce/errors.hpp"
#include "bubblereduce/quadrature.hpp"
#include "bubblereduce/space_dims.hpp"
#include "bubblereduce/special.hpp"

namespace bubblereduce {

/// Exact Beta-function reduction of
///   int_0^inf int_0^inf s^a t^b ((1+s)^2 + t^2)^{-p} dt ds.
/// Inner t-integral rescales by (1+s), leaving two 1-D Beta primitives.
inline double two_axis_beta(double a, double b, double p) {
    return beta_integral_t(b + 1.0, p) * beta_integral_s(a, 2.0 * p - b - 1.0);
}

namespace detail {

inline double memo_lookup_or(const std::array<double, 5>& key, double (*compute)(const std::array<double, 5>&)) {
    static std::map<std::array<double, 5>, double> cache;
    static std::mutex mu;
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    const double v = compute(key);
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(key, v);
    return v;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Closed forms (Beta primitives throughout; each throws a domain error naming
// the violated convergence inequality).

/// b1 = (N/2) int (1-|x|^2) / (|y| [(1+|y|)^2+|z|^2]^{(N+2)/2}) dx, compactly
///   -[k^2 - 2 + k(h-1) + h] N omega_h omega_k / (2k(k+1))
///     x int s^{k-2}/(1+s)^{N-h} x int t^{h-1}/(1+t^2)^{(N+2)/2}.
inline double b1_closed(const SpaceDims& d) {
    const double wk = sphere_measure(d.k), wh = sphere_measure(d.h);
    const double num = d.k * d.k - 2 + d.k * (d.h - 1) + d.h;
    return -num * d.N * wh * wk / (2.0 * d.k * (d.k + 1)) *
           beta_integral_s(d.k - 2, d.N - d.h) * beta_integral_t(d.h, 0.5 * (d.N + 2));
}

/// b2(gamma) = int |y|^gamma (1-|x|^2) / (|y| [(1+|y|)^2+|z|^2]^N) dx,
/// compactly -2 gamma omega_h omega_k / (N-1-gamma)
///   x int s^{gamma+k-2}/(1+s)^{2N-h-1} x int t^{h-1}/(1+t^2)^N.
inline double b2_closed(const SpaceDims& d, double gamma) {
    if (!(gamma > 0.0) || !(gamma < d.N - 1))
        throw domain_error("b2_closed: requires 0 < gamma < N - 1");
    const double wk = sphere_measure(d.k), wh = sphere_measure(d.h);
    return -2.0 * gamma * wh * wk / (d.N - 1.0 - gamma) *
           beta_integral_s(gamma + d.k - 2, 2.0 * d.N - d.h - 1) * beta_integral_t(d.h, d.N);
}

/// b3(gamma) = int |z|^gamma (1-|x|^2) / (|y| [(1+|y|)^2+|z|^2]^N) dx,
/// compactly -2 gamma omega_h omega_k / (N-gamma+k-2)
///   x int s^{k-2}/(1+s)^{N-gamma+k-2} x int t^{gamma+h-1}/(1+t^2)^N.
inline double b3_closed(const SpaceDims& d, double gamma) {
    if (!(gamma > 0.0) || !(gamma < d.N - 1))
        throw domain_error("b3_closed: requires 0 < gamma < N - 1");
    const double wk = sphere_measure(d.k), wh = sphere_measure(d.h);
    return -2.0 * gamma * wh * wk / (d.N - gamma + d.k - 2) *
           beta_integral_s(d.k - 2, d.N - gamma + d.k - 2) * beta_integral_t(gamma + d.h, d.N);
}

/// Theta = int dx / (|y| [(1+|y|)^2+|z|^2]^{N/2}); Beta reduction.
inline double theta_closed(const SpaceDims& d) {
    return sphere_measure(d.k) * sphere_measure(d.h) * two_axis_beta(d.k - 2, d.h - 1, 0.5 * d.N);
}

/// A = int U_{0,1}^{2(N-1)/(N-2)} / |y| dx = C_{N,k} omega_k omega_h
///     x int int s^{k-2} t^{h-1} ((1+s)^2+t^2)^{-(N-1)}.
inline double a_closed(const SpaceDims& d) {
    return c_nk(d) * sphere_measure(d.k) * sphere_measure(d.h) *
           two_axis_beta(d.k - 2, d.h - 1, d.N - 1.0);
}

/// b4's defining integral int |z|^gamma / (|y| [(1+|y|)^2+|z|^2]^N) dx in
/// Beta form (without the C_{N,k}(N-2)gamma/h prefactor).
inline double b4_core_closed(const SpaceDims& d, double gamma) {
    if (!(gamma > 0.0) || !(gamma < d.N))
        throw domain_error("b4: requires 0 < gamma < N");
    return sphere_measure(d.k) * sphere_measure(d.h) *
           two_axis_beta(d.k - 2, gamma + d.h - 1, double(d.N));
}

// ---------------------------------------------------------------------------
// Quadrature path (independent 2-D adaptive evaluation of the defining
// integrals; default tolerance 1e-10 for table-bound constants).

inline QuadratureSpec constants_spec() { return QuadratureSpec{}.with_rel(1e-10); }

inline double b1_quad(const SpaceDims& d, const QuadratureSpec& spec = constants_spec()) {
    auto f = [&](double s, double t) {
        const double den = (1.0 + s) * (1.0 + s) + t * t;
        return (1.0 - s * s - t * t) / (s * std::pow(den, 0.5 * (d.N + 2)));
    };
    return 0.5 * d.N * require_converged(integrate_cyl(d, f, spec), "b1_quad");
}

inline double b2_quad(const SpaceDims& d, double gamma,
                      const QuadratureSpec& spec = constants_spec()) {
    if (!(gamma > 0.0) || !(gamma < d.N - 1))
        throw domain_error("b2_quad: requires 0 < gamma < N - 1");
    auto f = [&](double s, double t) {
        const double den = (1.0 + s) * (1.0 + s) + t * t;
        return std::pow(s, gamma) * (1.0 - s * s - t * t) / (s * std::pow(den, double(d.N)));
    };
    return require_converged(integrate_cyl(d, f, spec), "b2_quad");
}

inline double b3_quad(const SpaceDims& d, double gamma,
                      const QuadratureSpec& spec = constants_spec()) {
    if (!(gamma > 0.0) || !(gamma < d.N - 1))
        throw domain_error("b3_quad: requires 0 < gamma < N - 1");
    auto f = [&](double s, double t) {
        const double den = (1.0 + s) * (1.0 + s) + t * t;
        return std::pow(t, gamma) * (1.0 - s * s - t * t) / (s * std::pow(den, double(d.N)));
    };
    return require_converged(integrate_cyl(d, f, spec), "b3_quad");
}

inline double theta_quad(const SpaceDims& d, const QuadratureSpec& spec = constants_spec()) {
    auto f = [&](double s, double t) {
        const double den = (1.0 + s) * (1.0 + s) + t * t;
        return 1.0 / (s * std::pow(den, 0.5 * d.N));
    };
    return require_converged(integrate_cyl(d, f, spec), "theta_quad");
}

inline double a_quad(const SpaceDims& d, const QuadratureSpec& spec = constants_spec()) {
    const Bubble b(d, std::vector<double>(d.h, 0.0), 1.0);
    const double p = 2.0 * (d.N - 1) / (d.N - 2);
    auto f = [&](double s, double t) { return std::pow(b.value(s, t), p) / s; };
    return require_converged(integrate_cyl(d, f, spec), "a_quad");
}

/// b4(gamma) = C_{N,k} (N-2) gamma / h x quadrature of the defining integral.
inline double b4(const SpaceDims& d, double gamma,
                 const QuadratureSpec& spec = constants_spec()) {
    if (!(gamma > 0.0) || !(gamma < d.N))
        throw domain_error("b4: requires 0 < gamma < N");
    auto f = [&](double s, double t) {
        const double den = (1.0 + s) * (1.0 + s) + t * t;
        return std::pow(t, gamma) / (s * std::pow(den, double(d.N)));
    };
    const double core = require_converged(integrate_cyl(d, f, spec), "b4");
    return c_nk(d) * (d.N - 2) * gamma / d.h * core;
}

inline double b4_closed(const SpaceDims& d, double gamma) {
    return c_nk(d) * (d.N - 2) * gamma / d.h * b4_core_closed(d, gamma);
}

// ---------------------------------------------------------------------------
// pi1, pi2 and the admissibility function g.

struct PiAndG {
    double pi1, pi2, g;
};

/// pi1 = b2(gamma), pi2 = b3(gamma); g = (pi1/k) sum xi + (pi2/h) sum a.
/// g > 0 is the admissibility condition (holds e.g. when all xi, a < 0).
inline PiAndG pi_and_g(const SpaceDims& d, double gamma, const std::vector<double>& xi,
                       const std::vector<double>& a) {
    if (!(gamma > 1.0) || !(gamma < d.N - 2))
        throw domain_error("pi_and_g: requires 1 < gamma < N - 2");
    const double pi1 = b2_closed(d, gamma);
    const double pi2 = b3_closed(d, gamma);
    double sx = 0.0, sa = 0.0;
    for (double v : xi) sx += v;
    for (double v : a) sa += v;
    return {pi1, pi2, pi1 / d.k * sx + pi2 / d.h * sa};
}

// ---------------------------------------------------------------------------
// Inner-product constants of the natural basis, via the differentiated
// limiting equation: -Delta dU = q U^{q-1} dU / |y| with q = N/(N-2), so
// <dU, dV> = q int U^{q-1} dU dV / |y|.

/// A1 = lambda^2 <dU/dlambda, dU/dlambda>; lambda-independent.
inline double a1_quad(const SpaceDims& d, double lambda = 1.0,
                      const QuadratureSpec& spec = constants_spec()) {
    const Bubble b(d, std::vector<double>(d.h, 0.0), lambda);
    const double q = double(d.N) / (d.N - 2);
    auto f = [&](double s, double t) {
        const double dl = b.dlambda(s, t);
        return std::pow(b.value(s, t), q - 1.0) * dl * dl / s;
    };
    return lambda * lambda * q * require_converged(integrate_cyl(d, f, spec), "a1_quad");
}

/// A2 = lambda^{-2} <dU/deta_l, dU/deta_l>; lambda-independent.  The angular
/// average of (z_l)^2 over the z-sphere of radius t is t^2/h.
inline double a2_quad(const SpaceDims& d, double lambda = 1.0,
                      const QuadratureSpec& spec = constants_spec()) {
    const Bubble b(d, std::vector<double>(d.h, 0.0), lambda);
    const double q = double(d.N) / (d.N - 2);
    const double m = 0.5 * (d.N - 2);
    auto f = [&](double s, double t) {
        const double U = b.value(s, t);
        const double D = b.denom(s, t);
        const double g2 = 4.0 * m * m * std::pow(lambda, 4.0) * (t * t / d.h) * U * U / (D * D);
        return std::pow(U, q - 1.0) * g2 / s;
    };
    return q / (lambda * lambda) * require_converged(integrate_cyl(d, f, spec), "a2_quad");
}

/// Cross term <dU/dlambda, dU/deta_l> for a single bubble; the integrand is
/// odd in z_l, computed here without symmetry reduction (h = 1 line
/// integral) so the vanishing is an actual numerical check.
inline double a_cross_quad(const SpaceDims& d, double lambda = 1.0,
                           const QuadratureSpec& spec = constants_spec()) {
    if (d.h != 1) throw domain_error("a_cross_quad: h = 1 only");
    const Bubble b(d, std::vector<double>(1, 0.0), lambda);
    const double q = double(d.N) / (d.N - 2);
    const double wk = sphere_measure(d.k);
    auto outer = [&](double s) {
        auto g = [&](double z) {
            const double t = std::fabs(z);
            return std::pow(b.value(s, t), q - 1.0) * b.dlambda(s, t) * b.deta(s, z, t) / s;
        };
        QuadResult in = integrate_line(g, spec.inner(), {0.0});
        return std::pow(s, d.k - 1) * in.value;
    };
    QuadResult res = integrate_semi_axis(outer, spec);
    return wk * q * res.value;
}

struct InnerProductConstants {
    double A1, A2;
};

inline InnerProductConstants inner_product_constants(const SpaceDims& d) {
    auto computeA1 = +[](const std::array<double, 5>& key) {
        return a1_quad(SpaceDims(int(key[1]) + int(key[2]), int(key[1]), int(key[2])));
    };
    auto computeA2 = +[](const std::array<double, 5>& key) {
        return a2_quad(SpaceDims(int(key[1]) + int(key[2]), int(key[1]), int(key[2])));
    };
    const std::array<double, 5> k1{1.0, double(d.k), double(d.h), 0.0, 0.0};
    const std::array<double, 5> k2{2.0, double(d.k), double(d.h), 0.0, 0.0};
    return {detail::memo_lookup_or(k1, computeA1), detail::memo_lookup_or(k2, computeA2)};
}

// ---------------------------------------------------------------------------
// Aggregate with provenance.

enum class Provenance { closed_form, quadrature, both };

struct AppendixConstants {
    SpaceDims dims;
    double gamma;
    double A = 0.0;
    double Theta = 0.0;
    double pi1 = 0.0, pi2 = 0.0;
    double b1 = 0.0, b2 = 0.0, b3 = 0.0, b4 = 0.0;
    double A1 = 0.0, A2 = 0.0;
    double D = 0.0;  ///< filled by the interaction-fit path when requested
    Provenance prov_A = Provenance::both;
    Provenance prov_Theta = Provenance::both;
    Provenance prov_b123 = Provenance::both;
    Provenance prov_b4 = Provenance::both;
    Provenance prov_A12 = Provenance::quadrature;
    Provenance prov_D = Provenance::quadrature;
};

/// All appendix constants at (dims, gamma), closed forms where available.
/// D is left 0 here; the interaction module extracts it from the energy
/// expansion fit.
inline AppendixConstants compute_constants(const SpaceDims& d, double gamma) {
    AppendixConstants c;
    c.dims = d;
    c.gamma = gamma;
    c.A = a_closed(d);
    c.Theta = theta_closed(d);
    c.b1 = b1_closed(d);
    c.b2 = b2_closed(d, gamma);
    c.b3 = b3_closed(d, gamma);
    c.pi1 = c.b2;
    c.pi2 = c.b3;
    c.b4 = b4_closed(d, gamma);
    const InnerProductConstants ip = inner_product_constants(d);
    c.A1 = ip.A1;
    c.A2 = ip.A2;
    return c;
}

// ---------------------------------------------------------------------------
// Cross-check ledger: every constant computed both ways where possible.

struct CrossCheckRow {
    std::string name;
    SpaceDims dims;
    double gamma = 0.0;       ///< NaN-free: 0 marks gamma-independent rows
    double closed = 0.0;
    double quadrature = 0.0;
    double rel_diff = 0.0;
    bool sign_ok = false;
    bool ok = false;
    std::string error;
};

struct CrossCheckReport {
    std::vector<CrossCheckRow> rows;
    double max_rel_diff = 0.0;
    bool pass = true;
};

/// Optional fault injection for tests: multiplies the named closed form.
struct CrossCheckCorruption {
    std::string name;
    double factor = 1.0;
};

inline CrossCheckReport cross_check_table(const std::vector<SpaceDims>& dims_grid,
                                          const std::vector<double>& gamma_grid,
                                          double tolerance = 1e-5,
                                          const CrossCheckCorruption& corrupt = {}) {
    CrossCheckReport rep;
    auto add = [&](const std::string& name, const SpaceDims& d, double gamma, int want_sign,
                   auto closed_fn, auto quad_fn) {
        CrossCheckRow row;
        row.name = name;
        row.dims = d;
        row.gamma = gamma;
        try {
            row.closed = closed_fn();
            if (name == corrupt.name) row.closed *= corrupt.factor;
            row.quadrature = quad_fn();
            row.rel_diff = std::fabs(row.closed - row.quadrature) /
                           std::fmax(std::fabs(row.quadrature), 1e-300);
            const int sc = (row.closed > 0.0) - (row.closed < 0.0);
            const int sq = (row.quadrature > 0.0) - (row.quadrature < 0.0);
            row.sign_ok = (sc == want_sign) && (sq == want_sign);
            row.ok = row.sign_ok && row.rel_diff <= tolerance;
            rep.max_rel_diff = std::fmax(rep.max_rel_diff, row.rel_diff);
        } catch (const error& e) {
            row.error = e.what();
            row.ok = false;
        }
        rep.pass = rep.pass && row.ok;
        rep.rows.push_back(row);
    };
    for (const SpaceDims& d : dims_grid) {
        add("b1", d, 0.0, -1, [&] { return b1_closed(d); }, [&] { return b1_quad(d); });
        add("Theta", d, 0.0, +1, [&] { return theta_closed(d); }, [&] { return theta_quad(d); });
        add("A", d, 0.0, +1, [&] { return a_closed(d); }, [&] { return a_quad(d); });
        for (double g : gamma_grid) {
            add("b2", d, g, -1, [&] { return b2_closed(d, g); }, [&] { return b2_quad(d, g); });
            add("b3", d, g, -1, [&] { return b3_closed(d, g); }, [&] { return b3_quad(d, g); });
            add("b4", d, g, +1, [&] { return b4_closed(d, g); }, [&] { return b4(d, g); });
        }
    }
    return rep;
}

}  // namespace bubblereduce
