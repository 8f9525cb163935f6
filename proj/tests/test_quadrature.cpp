#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "bubblereduce/bubble.hpp"
#include "bubblereduce/constants.hpp"
#include "bubblereduce/quadrature.hpp"

using namespace bubblereduce;

TEST_CASE("separable exponential integrates to its closed form") {
    SpaceDims d(3, 2, 1);
    auto f = [](double s, double t) { return std::exp(-s - t * t) / s; };
    // omega_2 omega_1 int s e^{-s}/s ds int t^0 e^{-t^2} dt = 2pi * 2 * 1 * sqrt(pi)/2
    QuadResult r = integrate_cyl(d, f, QuadratureSpec{}.with_rel(1e-10));
    REQUIRE(r.converged);
    CHECK(r.value == Catch::Approx(2.0 * M_PI * std::sqrt(M_PI)).epsilon(1e-9));
}

TEST_CASE("singular-kernel integral matches its one-dimensional reduction") {
    SpaceDims d(4, 2, 2);
    auto f = [&](double s, double t) {
        const double den = (1.0 + s) * (1.0 + s) + t * t;
        return 1.0 / (s * std::pow(den, 0.5 * d.N));
    };
    QuadResult r = integrate_cyl(d, f, QuadratureSpec{}.with_rel(1e-10));
    REQUIRE(r.converged);
    CHECK(r.value > 0.0);
    CHECK(r.value == Catch::Approx(theta_closed(d)).epsilon(1e-8));
}

TEST_CASE("two tolerances agree on the critical norm integral") {
    SpaceDims d(3, 2, 1);
    const double lo = a_quad(d, QuadratureSpec{}.with_rel(1e-6));
    const double hi = a_quad(d, QuadratureSpec{}.with_rel(1e-9));
    CHECK(lo == Catch::Approx(hi).epsilon(1e-6));
    CHECK(hi == Catch::Approx(a_closed(d)).epsilon(1e-8));
}

TEST_CASE("declared feature scales keep concentrated peaks resolved") {
    SpaceDims d(5, 3, 2);
    const double p = 2.0 * (d.N - 1) / (d.N - 2);
    // the critical norm is lambda-invariant, so any deviation from A is
    // quadrature error; a lambda=1e6 peak inside O(1) panels is the regime
    // where undeclared scales silently lose the core
    for (double lam : {1.0, 1e3, 1e6}) {
        Bubble b(d, {0.0, 0.0}, lam);
        auto f = [&](double s, double t) { return std::pow(b.value(s, t), p) / s; };
        QuadResult r =
            integrate_cyl(d, f, QuadratureSpec{}.with_rel(1e-8).with_scales({1.0 / lam}));
        REQUIRE(r.converged);
        INFO("lambda = " << lam);
        CHECK(r.value == Catch::Approx(a_closed(d)).epsilon(1e-7));
    }
}

TEST_CASE("knot ladder is sorted, deduplicated and bridged toward the cap") {
    std::vector<double> knots = detail::usable_knots({1e-6, 1.1e-6, 1e-3}, 1.0);
    REQUIRE(!knots.empty());
    CHECK(std::is_sorted(knots.begin(), knots.end()));
    for (std::size_t i = 1; i < knots.size(); ++i) CHECK(knots[i] > 1.4 * knots[i - 1]);
    // a geometric bridge must continue past the top declared scale
    CHECK(knots.back() > 1e-2);
    CHECK(knots.back() < 1.0);
    CHECK(detail::usable_knots({}, 1.0).empty());
    // knots at or beyond the cap are dropped
    CHECK(detail::usable_knots({2.0}, 1.0).empty());
}

TEST_CASE("line integral splits at its anchors") {
    auto g = [](double x) { return std::exp(-(x - 3.0) * (x - 3.0)); };
    QuadResult r = integrate_line(g, QuadratureSpec{}.with_rel(1e-10), {3.0});
    REQUIRE(r.converged);
    CHECK(r.value == Catch::Approx(std::sqrt(M_PI)).epsilon(1e-9));
}

TEST_CASE("two-center reduction agrees with the single-center one") {
    SpaceDims d(4, 3, 1);
    const double p = 2.0 * (d.N - 1) / (d.N - 2);
    Bubble b(d, {0.0}, 7.0);
    auto f1 = [&](double s, double t) { return std::pow(b.value(s, t), p) / s; };
    auto f2 = [&](double s, const ZPoint& zp) {
        return std::pow(b.value(s, zp.dist1()), p) / s;
    };
    const QuadratureSpec spec = QuadratureSpec{}.with_rel(1e-8).with_scales({1.0 / 7.0});
    const double one = require_converged(integrate_cyl(d, f1, spec), "one");
    const double two = require_converged(integrate_cyl_two(d, 2.0, f2, spec), "two");
    CHECK(two == Catch::Approx(one).epsilon(1e-7));
}

TEST_CASE("spec validation and convergence reporting") {
    CHECK_THROWS_AS(integrate_semi_axis([](double) { return 0.0; },
                                        QuadratureSpec{}.with_rel(-1.0)),
                    domain_error);
    QuadResult bad;
    bad.converged = false;
    bad.value = 1.0;
    bad.err_est = 0.5;
    try {
        require_converged(bad, "probe");
        FAIL("expected tolerance_failure");
    } catch (const tolerance_failure& e) {
        CHECK(e.best_estimate == 1.0);
        CHECK(e.err_est == 0.5);
    }
}
