#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <vector>

#include "bubblereduce/errors.hpp"
#include "bubblereduce/heisenberg.hpp"
#include "bubblereduce/quadrature.hpp"
#include "bubblereduce/space_dims.hpp"

namespace bubblereduce {

/// A cylindrical profile f(r, t) on R^{k} x R^{h}, r = |y| >= 0 and
/// t = |z| the radial z-coordinate about the origin.  Carries the decay
/// rate at infinity in the space's natural gauge; quadrature relies on the
/// profile being finite for all r >= 0 and decaying at the declared rate.
struct CylFunction {
    SpaceDims dims;
    std::function<double(double, double)> f;
    double decay = 0.0;

    CylFunction(SpaceDims d, std::function<double(double, double)> fn, double dec)
        : dims(d), f(std::move(fn)), decay(dec) {
        if (!f) throw domain_error("CylFunction: callable required");
        if (!(decay >= dims.N - 2))
            throw domain_error("CylFunction: declared decay must be >= N - 2");
    }

    double operator()(double r, double t) const { return f(r, t); }
};

/// CR equivalence: stereographic-type map from S^{2n+1} subset C^{n+1}
/// (minus the pole theta_{n+1} = -1) onto the Heisenberg group H^n:
///   Z_j = theta_j / (1 + theta_{n+1}),
///   t   = Re( i (1 - theta_{n+1}) / (1 + theta_{n+1}) ).
struct HeisenbergPoint {
    std::vector<std::complex<double>> Z;
    double t = 0.0;
};

inline HeisenbergPoint cr_to_heisenberg(const std::vector<std::complex<double>>& theta) {
    if (theta.size() < 2) throw domain_error("cr_to_heisenberg: need n + 1 >= 2 components");
    double norm2 = 0.0;
    for (const auto& c : theta) norm2 += std::norm(c);
    if (std::fabs(norm2 - 1.0) > 1e-9)
        throw domain_error("cr_to_heisenberg: point must lie on the unit sphere");
    const std::complex<double> last = theta.back();
    const std::complex<double> den = 1.0 + last;
    if (std::abs(den) < 1e-14)
        throw domain_error("cr_to_heisenberg: pole point theta_{n+1} = -1");
    HeisenbergPoint p;
    p.Z.resize(theta.size() - 1);
    for (std::size_t j = 0; j + 1 < theta.size(); ++j) p.Z[j] = theta[j] / den;
    p.t = (std::complex<double>(0.0, 1.0) * (1.0 - last) / den).real();
    return p;
}

/// Analytic inverse of cr_to_heisenberg.  With w = |Z|^2 - i t the Moebius
/// relations give theta_{n+1} = (1 - w)/(1 + w) and theta_j = 2 Z_j/(1 + w).
inline std::vector<std::complex<double>> heisenberg_to_cr(const HeisenbergPoint& p) {
    double z2 = 0.0;
    for (const auto& c : p.Z) z2 += std::norm(c);
    const std::complex<double> w(z2, -p.t);
    const std::complex<double> den = 1.0 + w;
    std::vector<std::complex<double>> theta(p.Z.size() + 1);
    for (std::size_t j = 0; j < p.Z.size(); ++j) theta[j] = 2.0 * p.Z[j] / den;
    theta.back() = (1.0 - w) / den;
    return theta;
}

/// Grushin -> Hardy-Sobolev substitution v(r, z) = psi(sqrt(r), z).
/// psi lives on R^{m1} x R^{m2} with m1 even; v lives on R^k x R^h with
/// k = (m1 + 2)/2, h = m2.  Monotone in r, so suprema are preserved.
inline CylFunction grushin_to_hs(const CylFunction& psi) {
    if (psi.dims.k % 2 != 0)
        throw domain_error("grushin_to_hs: m1 must be even (unsupported dimension)");
    const int k = (psi.dims.k + 2) / 2;
    const int h = psi.dims.h;
    SpaceDims d(k + h, k, h);
    auto f = psi.f;
    // the gauge contracts quadratically in r, so the decay rate halves; it
    // still dominates N - 2 = (m1 + 2)/2 + m2 - 2 whenever psi was admissible
    const double dec = std::fmax(0.5 * psi.decay, double(d.N - 2));
    return CylFunction(d, [f](double r, double t) { return f(std::sqrt(r), t); }, dec);
}

/// Inverse substitution psi(r, z) = v(r^2, z).
inline CylFunction hs_to_grushin(const CylFunction& v, int m1) {
    if (m1 % 2 != 0 || (m1 + 2) / 2 != v.dims.k)
        throw domain_error("hs_to_grushin: m1 must be even with k = (m1 + 2)/2");
    SpaceDims d(m1 + v.dims.h, m1, v.dims.h);
    auto f = v.f;
    return CylFunction(d, [f](double r, double t) { return f(r * r, t); }, 2.0 * v.decay);
}

/// Curvature transfer phi(r, z) = Phi(sqrt(r), z)/4 between the Grushin and
/// Hardy-Sobolev sides.  Plain profile substitution; no decay bookkeeping
/// (curvatures are bounded, not decaying).
inline std::function<double(double, double)> curvature_transfer(
    const std::function<double(double, double)>& Phi) {
    return [Phi](double r, double t) { return 0.25 * Phi(std::sqrt(r), t); };
}

namespace detail {

/// Central difference with even reflection through 0, for profiles radial in
/// the differentiated coordinate.
template <class F>
inline double dradial(const F& f, double x, double other, bool first_arg) {
    const double step = 1e-5 * (1.0 + std::fabs(x));
    const double xp = x + step, xm = x - step;
    const double fp = first_arg ? f(xp, other) : f(other, xp);
    const double fm = first_arg ? f(std::fabs(xm), other) : f(other, std::fabs(xm));
    return (fp - fm) / (2.0 * step);
}

}  // namespace detail

/// Dirichlet energy on the Heisenberg side for a cylindrical profile
/// u(|Z|, t) even in t:
///   int |grad_H u|^2 dZ dt = omega_{2n} int int (u_r^2 + 4 r^2 u_t^2) r^{2n-1} dr dt.
/// Derivatives by central differences with even reflection.
template <class U>
inline double dirichlet_norm_heisenberg(const U& u, int n,
                                        const QuadratureSpec& spec = QuadratureSpec{}.with_rel(1e-7)) {
    if (n < 1) throw domain_error("dirichlet_norm_heisenberg: n >= 1 required");
    SpaceDims d(2 * n + 1, 2 * n, 1);
    auto integrand = [&](double r, double t) {
        const double ur = detail::dradial(u, r, t, true);
        const double ut = detail::dradial(u, t, r, false);
        return ur * ur + 4.0 * r * r * ut * ut;
    };
    QuadResult res = integrate_cyl(d, integrand, spec);
    return require_converged(res, "dirichlet_norm_heisenberg");
}

inline double dirichlet_norm_heisenberg(const CylFunction& u, int n,
                                        const QuadratureSpec& spec = QuadratureSpec{}.with_rel(1e-7)) {
    return dirichlet_norm_heisenberg(u.f, n, spec);
}

/// Plain Dirichlet energy int |grad v|^2 on R^k x R^h for a profile radial
/// in both blocks.
template <class V>
inline double dirichlet_norm_hs(const V& v, const SpaceDims& dims,
                                const QuadratureSpec& spec = QuadratureSpec{}.with_rel(1e-7)) {
    auto integrand = [&](double r, double t) {
        const double vr = detail::dradial(v, r, t, true);
        const double vt = detail::dradial(v, t, r, false);
        return vr * vr + vt * vt;
    };
    QuadResult res = integrate_cyl(dims, integrand, spec);
    return require_converged(res, "dirichlet_norm_hs");
}

inline double dirichlet_norm_hs(const CylFunction& v,
                                const QuadratureSpec& spec = QuadratureSpec{}.with_rel(1e-7)) {
    return dirichlet_norm_hs(v.f, v.dims, spec);
}

/// The constant c_n of the norm identity, taken from its proof: 2 omega_{2n}/omega_k
/// with k = n + 1.
inline double norm_identity_constant(int n) {
    return 2.0 * sphere_measure(2 * n) / sphere_measure(n + 1);
}

/// Ratio of the Heisenberg Dirichlet energy of u to the Hardy-Sobolev
/// Dirichlet energy of its Grushin-chained image.  Equals
/// norm_identity_constant(n) for every admissible u.
inline double norm_identity_ratio(const CylFunction& u, int n,
                                  const QuadratureSpec& spec = QuadratureSpec{}.with_rel(1e-7)) {
    const double num = dirichlet_norm_heisenberg(u, n, spec);
    const CylFunction v = grushin_to_hs(u);
    const double den = dirichlet_norm_hs(v, spec);
    if (den == 0.0) throw degenerate_error("norm_identity_ratio: zero Dirichlet energy");
    return num / den;
}

/// The Heisenberg bubble as a CylFunction on R^{2n} x R (its Grushin profile);
/// requires center s = 0 so the profile is even in t.
inline CylFunction heisenberg_profile(const HeisenbergBubble& hb) {
    if (hb.s != 0.0)
        throw domain_error("heisenberg_profile: centered bubble (s = 0) required");
    SpaceDims d(2 * hb.n + 1, 2 * hb.n, 1);
    HeisenbergBubble copy = hb;
    return CylFunction(d, [copy](double r, double t) { return copy.value(r, t); },
                       2.0 * hb.n);
}

}  // namespace bubblereduce
