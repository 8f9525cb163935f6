#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "bubblereduce/constants.hpp"

using namespace bubblereduce;

TEST_CASE("sphere measures") {
    CHECK(sphere_measure(2) == Catch::Approx(2.0 * M_PI).epsilon(1e-14));
    CHECK(sphere_measure(3) == Catch::Approx(4.0 * M_PI).epsilon(1e-14));
    CHECK(sphere_measure(4) == Catch::Approx(2.0 * M_PI * M_PI).epsilon(1e-14));
    CHECK(c_nk(SpaceDims(5, 3, 2)) == Catch::Approx(std::pow(6.0, 4)).epsilon(1e-14));
}

TEST_CASE("closed forms match independent quadrature") {
    SpaceDims d(4, 3, 1);
    CHECK(b1_quad(d) == Catch::Approx(b1_closed(d)).epsilon(1e-6));
    CHECK(theta_quad(d) == Catch::Approx(theta_closed(d)).epsilon(1e-8));
    CHECK(a_quad(d) == Catch::Approx(a_closed(d)).epsilon(1e-8));
    const double g = 1.5;
    CHECK(b2_quad(d, g) == Catch::Approx(b2_closed(d, g)).epsilon(1e-6));
    CHECK(b3_quad(d, g) == Catch::Approx(b3_closed(d, g)).epsilon(1e-6));
    CHECK(b4(d, g) == Catch::Approx(b4_closed(d, g)).epsilon(1e-6));
}

TEST_CASE("two_axis_beta against direct quadrature") {
    const double a = 1.0, b = 1.0, p = 2.5;
    auto f = [&](double s, double t) {
        const double den = (1.0 + s) * (1.0 + s) + t * t;
        return std::pow(s, a) * std::pow(t, b) * std::pow(den, -p);
    };
    // strip the omega factors and the s^{k-1} t^{h-1} weights by choosing
    // k = h = 1 weights through a plain nested evaluation
    double outer = 0.0;
    {
        QuadratureSpec spec = QuadratureSpec{}.with_rel(1e-10);
        auto g = [&](double s) {
            return integrate_semi_axis([&](double t) { return f(s, t); }, spec.inner(),
                                       1.0 + s)
                .value;
        };
        outer = require_converged(integrate_semi_axis(g, spec), "two_axis probe");
    }
    CHECK(outer == Catch::Approx(two_axis_beta(a, b, p)).epsilon(1e-8));
}

TEST_CASE("sign conventions and admissibility") {
    SpaceDims d(5, 3, 2);
    CHECK(b1_closed(d) < 0.0);
    CHECK(theta_closed(d) > 0.0);
    CHECK(a_closed(d) > 0.0);
    for (double g : {1.2, 1.8, 2.5}) {
        CHECK(b2_closed(d, g) < 0.0);
        CHECK(b3_closed(d, g) < 0.0);
        CHECK(b4_closed(d, g) > 0.0);
    }
    PiAndG pg = pi_and_g(d, 1.5, {-1.0, -1.0, -1.0}, {-1.0, -1.0});
    CHECK(pg.pi1 < 0.0);
    CHECK(pg.pi2 < 0.0);
    CHECK(pg.g > 0.0);
    // flipping the coefficient signs flips g
    PiAndG bad = pi_and_g(d, 1.5, {1.0, 1.0, 1.0}, {1.0, 1.0});
    CHECK(bad.g < 0.0);
    CHECK_THROWS_AS(pi_and_g(d, 0.5, {-1.0, -1.0, -1.0}, {-1.0, -1.0}), domain_error);
    CHECK_THROWS_AS(b2_closed(d, 4.5), domain_error);
    CHECK_THROWS_AS(b4_closed(d, 5.5), domain_error);
}

TEST_CASE("cross-check table passes and reacts to fault injection") {
    std::vector<SpaceDims> dims{SpaceDims(4, 3, 1)};
    std::vector<double> gammas{1.5};
    CrossCheckReport good = cross_check_table(dims, gammas, 1e-5);
    CHECK(good.pass);
    CHECK(good.max_rel_diff < 1e-5);
    CHECK(good.rows.size() == 6);

    CrossCheckReport bad = cross_check_table(dims, gammas, 1e-5, {"b2", 1.001});
    CHECK(!bad.pass);
    int failed = 0;
    for (const CrossCheckRow& r : bad.rows)
        if (!r.ok) {
            ++failed;
            CHECK(r.name == "b2");
        }
    CHECK(failed == 1);
}

TEST_CASE("inner product constants") {
    SpaceDims d(4, 3, 1);
    InnerProductConstants ip = inner_product_constants(d);
    CHECK(ip.A1 > 0.0);
    CHECK(ip.A2 > 0.0);
    // lambda independence of the normalized pairings
    CHECK(a1_quad(d, 3.0) == Catch::Approx(ip.A1).epsilon(1e-6));
    CHECK(a2_quad(d, 3.0) == Catch::Approx(ip.A2).epsilon(1e-6));
    // the mixed pairing vanishes by oddness; computed without using it
    const double cross = a_cross_quad(d);
    CHECK(std::fabs(cross) < 1e-8 * ip.A1);
}

TEST_CASE("aggregate constants are consistent") {
    SpaceDims d(5, 3, 2);
    AppendixConstants c = compute_constants(d, 1.5);
    CHECK(c.A == Catch::Approx(a_closed(d)));
    CHECK(c.pi1 == c.b2);
    CHECK(c.pi2 == c.b3);
    CHECK(c.b1 < 0.0);
    CHECK(c.b4 > 0.0);
    CHECK(c.A1 > 0.0);
    CHECK(c.D == 0.0);
}
