#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <vector>

#include "bubblereduce/errors.hpp"
#include "bubblereduce/space_dims.hpp"

namespace bubblereduce {

struct QuadratureSpec {
    double rel_tol = 1e-8;
    double abs_tol = 1e-14;
    // concentration scales down to lambda ~ 1e10 inside O(100)-sized
    // intervals need ~50 bisections to localize; depth is cheap because the
    // worst-first refinement only spends it where the integrand demands it
    int max_depth = 64;
    int max_panels = 20000;

    /// Known feature widths of the integrand (bubble scales 1/lambda).  The
    /// integrators split their intervals at these values: a peak of width
    /// 1e-10 inside an O(1) panel leaves no trace on the GK nodes, so
    /// adaptive refinement alone can converge on a silently wrong answer.
    std::vector<double> feature_scales;

    QuadratureSpec with_rel(double r) const {
        QuadratureSpec s = *this;
        s.rel_tol = r;
        return s;
    }
    QuadratureSpec with_scales(std::vector<double> scales) const {
        QuadratureSpec s = *this;
        s.feature_scales = std::move(scales);
        // declared concentration scales mean the integral itself can sit far
        // below O(1); an absolute floor would then shut refinement off before
        // the first digit is right
        s.abs_tol = 1e-300;
        return s;
    }
    QuadratureSpec inner() const {
        // nested axes integrate a bit tighter than the requested outer
        // tolerance, and purely relative: an inner integral can be orders of
        // magnitude smaller than the outer scale, so an absolute floor would
        // cut it off before it is resolved
        QuadratureSpec s = *this;
        s.rel_tol = rel_tol * 0.2;
        s.abs_tol = 1e-300;
        return s;
    }
    void validate() const {
        if (!(rel_tol > 0.0) || max_depth < 1)
            throw domain_error("QuadratureSpec: rel_tol > 0 and max_depth >= 1 required");
    }
};

struct QuadResult {
    double value = 0.0;
    double err_est = 0.0;
    bool converged = true;
};

namespace detail {

// Gauss-Kronrod 15(7) on [-1, 1].
constexpr int gk_n = 15;
constexpr double gk_x[gk_n] = {
    -0.991455371120812639206854697526329,
    -0.949107912342758524526189684047851,
    -0.864864423359769072789712788640926,
    -0.741531185599394439863864773280788,
    -0.586087235467691130294144838258730,
    -0.405845151377397166906606412076961,
    -0.207784955007898467600689403773245,
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329};
constexpr double gk_wk[gk_n] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970};
// Gauss-7 weights, mapped onto the odd Kronrod nodes.
constexpr double gk_wg[7] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082};

struct Panel {
    double a, b;
    double value;
    double err;
    int depth;
};

template <class F>
inline Panel gk15(const F& f, double a, double b, int depth) {
    const double c = 0.5 * (a + b), half = 0.5 * (b - a);
    double k = 0.0, g = 0.0, kabs = 0.0;
    for (int i = 0; i < gk_n; ++i) {
        const double fx = f(c + half * gk_x[i]);
        k += gk_wk[i] * fx;
        kabs += gk_wk[i] * std::fabs(fx);
        if (i % 2 == 1) g += gk_wg[i / 2] * fx;
    }
    k *= half;
    g *= half;
    kabs *= half;
    // |K15 - G7| with a round-off floor so refinement stops at machine noise
    double err = std::fmax(std::fabs(k - g), 5e-16 * kabs);
    err = std::fmax(err, 1e-300);
    return {a, b, k, err, depth};
}

struct WorseErr {
    bool operator()(const Panel& x, const Panel& y) const {
        if (x.err != y.err) return x.err < y.err;
        return x.a > y.a;  // deterministic tie-break
    }
};

inline double kahan_sum(std::vector<double>& v) {
    double s = 0.0, c = 0.0;
    for (double x : v) {
        double t = x - c;
        double u = s + t;
        c = (u - s) - t;
        s = u;
    }
    return s;
}

/// Adaptive GK15 on the finite interval [a, b], refining the worst panel
/// first.  The final sum runs over panels ordered by position so that the
/// result is reproducible for a given spec.
template <class F>
inline QuadResult adaptive_finite(const F& f, double a, double b, const QuadratureSpec& spec) {
    spec.validate();
    if (a == b) return {0.0, 0.0, true};
    std::priority_queue<Panel, std::vector<Panel>, WorseErr> queue;
    std::vector<Panel> frozen;  // panels at max depth, no longer refinable
    queue.push(gk15(f, a, b, 0));
    double total = queue.top().value, err = queue.top().err;
    double frozen_value = 0.0, frozen_err = 0.0;
    int panels = 1;
    auto tol_met = [&]() {
        return err + frozen_err <= std::fmax(spec.rel_tol * std::fabs(total + frozen_value), spec.abs_tol);
    };
    while (!queue.empty() && !tol_met() && panels < spec.max_panels) {
        Panel p = queue.top();
        queue.pop();
        total -= p.value;
        err -= p.err;
        if (p.depth >= spec.max_depth) {
            frozen.push_back(p);
            frozen_value += p.value;
            frozen_err += p.err;
            continue;
        }
        const double m = 0.5 * (p.a + p.b);
        Panel l = gk15(f, p.a, m, p.depth + 1);
        Panel r = gk15(f, m, p.b, p.depth + 1);
        queue.push(l);
        queue.push(r);
        total += l.value + r.value;
        err += l.err + r.err;
        ++panels;
    }
    std::vector<Panel> all(std::move(frozen));
    while (!queue.empty()) {
        all.push_back(queue.top());
        queue.pop();
    }
    std::sort(all.begin(), all.end(), [](const Panel& x, const Panel& y) { return x.a < y.a; });
    std::vector<double> vals, errs;
    vals.reserve(all.size());
    errs.reserve(all.size());
    for (const Panel& p : all) {
        vals.push_back(p.value);
        errs.push_back(p.err);
    }
    QuadResult res;
    res.value = kahan_sum(vals);
    res.err_est = kahan_sum(errs);
    res.converged = res.err_est <= std::fmax(spec.rel_tol * std::fabs(res.value), spec.abs_tol);
    return res;
}

inline void merge(QuadResult& acc, const QuadResult& part) {
    acc.value += part.value;
    acc.err_est += part.err_est;
    acc.converged = acc.converged && part.converged;
}

/// Sorted, deduplicated positive knots below the cap.
inline std::vector<double> usable_knots(const std::vector<double>& scales, double cap) {
    std::vector<double> k;
    for (double s : scales)
        if (s > 0.0 && s < cap) k.push_back(s);
    std::sort(k.begin(), k.end());
    std::vector<double> out;
    for (double s : k)
        if (out.empty() || s > 1.5 * out.back()) out.push_back(s);
    // geometric bridge from the top feature scale toward the cap: the slowly
    // decaying shoulder of a concentrated peak carries mass across every
    // octave in between, which a tail map clustered at the cap scale alone
    // places below its first node
    if (!out.empty())
        for (double s = out.back() * 8.0; s < cap; s *= 8.0) out.push_back(s);
    return out;
}

/// The z-profile of a peak of horizontal width w sitting at horizontal
/// distance s is smooth at scale w + s, so inner axes drop the part of the
/// knot ladder below that.
inline QuadratureSpec scales_at(const QuadratureSpec& sp, double s) {
    if (sp.feature_scales.empty()) return sp;
    std::vector<double> sc = sp.feature_scales;
    for (double& v : sc) v += s;
    return sp.with_scales(std::move(sc));
}

}  // namespace detail

/// int_0^inf f(x) dx through the rational compactification x = scale u/(1-u).
/// Refinement toward u = 0 resolves features near the origin, toward u = 1
/// the algebraic tail.
template <class F>
inline QuadResult integrate_semi_axis(const F& f, const QuadratureSpec& spec, double scale = 1.0) {
    auto g = [&](double u) {
        const double om = 1.0 - u;
        const double x = scale * u / om;
        const double w = scale / (om * om);
        if (!std::isfinite(x) || !std::isfinite(w)) return 0.0;
        const double v = f(x) * w;
        return std::isfinite(v) ? v : 0.0;
    };
    return detail::adaptive_finite(g, 0.0, 1.0, spec);
}

/// Semi-axis integral split at the spec's feature scales before the rational
/// tail map takes over.
template <class F>
inline QuadResult integrate_semi_axis_knotted(const F& f, const QuadratureSpec& spec,
                                              double tail_scale = 1.0) {
    const std::vector<double> knots = detail::usable_knots(spec.feature_scales, tail_scale);
    QuadResult res;
    double lo = 0.0;
    for (double k : knots) {
        detail::merge(res, detail::adaptive_finite(f, lo, k, spec));
        lo = k;
    }
    const double off = lo;
    detail::merge(res, integrate_semi_axis([&](double v) { return f(off + v); }, spec, tail_scale));
    return res;
}

/// int over the whole line of f, split at the given anchor points (peaks of
/// the integrand should sit on anchors so that bisection zooms onto them).
template <class F>
inline QuadResult integrate_line(const F& f, const QuadratureSpec& spec,
                                 const std::vector<double>& anchors, double scale = 1.0) {
    std::vector<double> a(anchors);
    if (a.empty()) a.push_back(0.0);
    std::sort(a.begin(), a.end());
    QuadResult res;
    // left tail
    detail::merge(res, integrate_semi_axis([&](double v) { return f(a.front() - v); }, spec, scale));
    // interior segments
    for (std::size_t i = 0; i + 1 < a.size(); ++i) {
        const double mid = 0.5 * (a[i] + a[i + 1]);
        detail::merge(res, detail::adaptive_finite(f, a[i], mid, spec));
        detail::merge(res, detail::adaptive_finite([&](double x) { return f(x); }, mid, a[i + 1], spec));
    }
    // right tail
    detail::merge(res, integrate_semi_axis([&](double v) { return f(a.back() + v); }, spec, scale));
    return res;
}

/// Cylindrical integral with a single z-center:
///   int_{R^N} F dx = omega_k omega_h int_0^inf int_0^inf f(s,t) s^{k-1} t^{h-1} dt ds,
/// where f(s, t) is the integrand as a function of s = |y| and t = |z - center|.
/// f must already include any 1/|y| factor; the s^{k-1} weight keeps the
/// product integrable at s = 0 for k >= 2.
template <class F>
inline QuadResult integrate_cyl(const SpaceDims& dims, const F& f, const QuadratureSpec& spec) {
    const double wk = sphere_measure(dims.k), wh = sphere_measure(dims.h);
    const QuadratureSpec ispec = spec.inner();
    // inner accuracy is judged against the largest inner magnitude seen, not
    // per call: an inner integral passing through zero has no meaningful
    // relative error of its own
    double inner_err = 0.0, inner_scale = 0.0;
    auto outer = [&](double s) {
        auto g = [&](double t) { return std::pow(t, dims.h - 1) * f(s, t); };
        // an inner slice where the integrand nearly vanishes has no meaningful
        // relative error of its own; the largest slice seen so far sets an
        // absolute floor so such slices stop instead of refining to the panel
        // cap.  the 1e-4 margin keeps coherent accumulation of per-slice
        // errors across many outer panels well under the requested tolerance
        QuadratureSpec isp = detail::scales_at(ispec, s);
        isp.abs_tol = std::fmax(isp.abs_tol, 1e-4 * isp.rel_tol * inner_scale);
        // the z-mass of every integrand in this library sits at t = O(1 + s);
        // scaling the compactification accordingly keeps it mid-domain
        QuadResult in = integrate_semi_axis_knotted(g, isp, 1.0 + s);
        inner_err = std::fmax(inner_err, in.err_est);
        inner_scale = std::fmax(inner_scale, std::fabs(in.value));
        return std::pow(s, dims.k - 1) * in.value;
    };
    QuadResult res = integrate_semi_axis_knotted(outer, spec);
    const double inner_rel = inner_scale > 0.0 ? inner_err / inner_scale : 0.0;
    res.value *= wk * wh;
    res.err_est = wk * wh * res.err_est + inner_rel * std::fabs(res.value);
    res.converged = res.converged && inner_rel <= spec.rel_tol;
    return res;
}

/// Evaluation point of a two-center cylindrical integrand.  p1 and p2 are the
/// signed coordinates along the axis through the two z-centers, measured from
/// center 1 and center 2 respectively (p1 - p2 == separation, with whichever
/// offset is anchor-exact carrying full precision).  tperp is the distance
/// from the axis inside the z-block (0 when h == 1).
struct ZPoint {
    double p1;
    double p2;
    double tperp;
    double dist1() const { return std::hypot(p1, tperp); }
    double dist2() const { return std::hypot(p2, tperp); }
};

/// Cylindrical integral with two distinct z-centers at axis separation
/// sep > 0.  The z-block splits into the axis coordinate plus the
/// perpendicular radius (weight omega_{h-1} tperp^{h-2} for h >= 2; plain
/// line integral for h == 1).  Valid for integrands invariant under
/// rotations of z about the axis, which covers every integrand in this
/// library.  f(s, zp) must include any 1/|y| factor.
template <class F>
inline QuadResult integrate_cyl_two(const SpaceDims& dims, double sep, const F& f,
                                    const QuadratureSpec& spec) {
    if (sep < 0.0) throw degenerate_error("integrate_cyl_two: negative separation");
    const double wk = sphere_measure(dims.k);
    const QuadratureSpec mspec = spec.inner();
    const QuadratureSpec ispec = mspec.inner();
    // per-level running magnitudes: the largest slice value seen sets an
    // absolute floor for later slices at the same level, so slices where the
    // integrand nearly vanishes stop instead of refining to the panel cap
    double axis_err = 0.0, axis_scale = 0.0;
    double perp_err = 0.0, perp_scale = 0.0;

    // integrand over the z-axis coordinate for fixed s, perp radius folded in
    auto axis_integral = [&](double s) {
        QuadratureSpec msp = detail::scales_at(mspec, s);
        msp.abs_tol = std::fmax(msp.abs_tol, 1e-4 * msp.rel_tol * axis_scale);
        const QuadratureSpec isp0 = detail::scales_at(ispec, s);
        auto eval = [&](const ZPoint& zp) { return f(s, zp); };
        auto at = [&](double p1, double p2) {
            if (dims.h == 1) return eval({p1, p2, 0.0});
            const double whm1 = sphere_measure(dims.h - 1);
            auto g = [&](double tp) {
                return std::pow(tp, dims.h - 2) * eval({p1, p2, tp});
            };
            QuadratureSpec isp = isp0;
            isp.abs_tol = std::fmax(isp.abs_tol, 1e-4 * isp.rel_tol * perp_scale);
            QuadResult in = integrate_semi_axis_knotted(g, isp, 1.0 + s);
            perp_err = std::fmax(perp_err, in.err_est);
            perp_scale = std::fmax(perp_scale, std::fabs(in.value));
            return whm1 * in.value;
        };
        QuadResult res;
        const double half = 0.5 * sep;
        // [0, half] segments split at the concentration scales near the anchor
        auto inward = [&](auto g) {
            const std::vector<double> knots = detail::usable_knots(msp.feature_scales, half);
            QuadResult part;
            double lo = 0.0;
            for (double k : knots) {
                detail::merge(part, detail::adaptive_finite(g, lo, k, msp));
                lo = k;
            }
            detail::merge(part, detail::adaptive_finite(g, lo, half, msp));
            return part;
        };
        // left tail, anchored at center 1: p1 = -v
        detail::merge(res, integrate_semi_axis_knotted(
                               [&](double v) { return at(-v, -v - sep); }, msp, 1.0 + s));
        if (sep > 0.0) {
            // [center1, mid] in the center-1 offset
            detail::merge(res, inward([&](double v) { return at(v, v - sep); }));
            // [mid, center2] in the center-2 offset (v = -p2 decreasing toward 0)
            detail::merge(res, inward([&](double v) { return at(sep - v, -v); }));
        }
        // right tail, anchored at center 2: p2 = v
        detail::merge(res, integrate_semi_axis_knotted(
                               [&](double v) { return at(sep + v, v); }, msp, 1.0 + s));
        axis_err = std::fmax(axis_err, res.err_est);
        axis_scale = std::fmax(axis_scale, std::fabs(res.value));
        return res.value;
    };

    auto outer = [&](double s) { return std::pow(s, dims.k - 1) * axis_integral(s); };
    QuadResult res = integrate_semi_axis_knotted(outer, spec);
    double inner_rel = axis_scale > 0.0 ? axis_err / axis_scale : 0.0;
    if (perp_scale > 0.0) inner_rel = std::fmax(inner_rel, perp_err / perp_scale);
    res.value *= wk;
    res.err_est = wk * res.err_est + inner_rel * std::fabs(res.value);
    res.converged = res.converged && inner_rel <= spec.rel_tol;
    return res;
}

/// Wrapper that converts a non-converged result into a tolerance_failure.
inline double require_converged(const QuadResult& r, const char* what) {
    if (!r.converged)
        throw tolerance_failure(std::string(what) + ": quadrature tolerance not reached", r.value,
                                r.err_est);
    return r.value;
}

}  // namespace bubblereduce
