#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "bubblereduce/bubble.hpp"
#include "bubblereduce/models.hpp"
#include "bubblereduce/space_dims.hpp"

using namespace bubblereduce;

namespace {

template <class F>
double central(F f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace

TEST_CASE("dimension triples validate") {
    CHECK_NOTHROW(SpaceDims(5, 3, 2));
    CHECK_THROWS_AS(SpaceDims(5, 3, 1), domain_error);
    CHECK_THROWS_AS(SpaceDims(3, 1, 2), domain_error);
    CHECK_THROWS_AS(SpaceDims(2, 2, 0), domain_error);
    SpaceDims cr = SpaceDims::from_cr(2);
    CHECK(cr.N == 4);
    CHECK(cr.k == 3);
    CHECK(cr.Q() == 6);
    CHECK_THROWS_AS(SpaceDims(5, 3, 2).Q(), domain_error);
}

TEST_CASE("bubble profile and closed-form derivatives") {
    SpaceDims d(5, 3, 2);
    Bubble b(d, {0.3, -0.1}, 2.5);
    CHECK(b.prefactor() == Catch::Approx(std::pow(6.0, 1.5)).epsilon(1e-14));

    const double s = 0.7, t = 1.3;
    const double h = 1e-6;
    // dlambda against a finite difference in lambda
    {
        auto f = [&](double lam) { return Bubble(d, b.eta, lam).value(s, t); };
        CHECK(b.dlambda(s, t) == Catch::Approx(central(f, b.lambda, h)).epsilon(1e-7));
    }
    // d_s, d_ss
    {
        auto f = [&](double x) { return b.value(x, t); };
        CHECK(b.d_s(s, t) == Catch::Approx(central(f, s, h)).epsilon(1e-7));
        auto g = [&](double x) { return b.d_s(x, t); };
        CHECK(b.d_ss(s, t) == Catch::Approx(central(g, s, h)).epsilon(1e-7));
    }
    // d_t_over_t, d_tt
    {
        auto f = [&](double x) { return b.value(s, x); };
        CHECK(t * b.d_t_over_t(s, t) == Catch::Approx(central(f, t, h)).epsilon(1e-7));
        auto g = [&](double x) { return x * b.d_t_over_t(s, x); };
        CHECK(b.d_tt(s, t) == Catch::Approx(central(g, t, h)).epsilon(1e-7));
    }
    // deta: derivative in one center component
    {
        auto f = [&](double e0) {
            Bubble bb(d, {e0, b.eta[1]}, b.lambda);
            const double dz0 = 0.9 - e0, dz1 = 0.4 - b.eta[1];
            return bb.value(s, std::hypot(dz0, dz1));
        };
        const double dz0 = 0.9 - b.eta[0], dz1 = 0.4 - b.eta[1];
        const double tt = std::hypot(dz0, dz1);
        CHECK(b.deta(s, dz0, tt) == Catch::Approx(central(f, b.eta[0], h)).epsilon(1e-6));
    }
}

TEST_CASE("bubble profile annihilates its equation pointwise") {
    for (auto [N, k, hh] : {std::tuple{3, 2, 1}, {4, 2, 2}, {5, 3, 2}}) {
        SpaceDims d(N, k, hh);
        const double q = double(d.N) / (d.N - 2);
        Bubble b(d, std::vector<double>(d.h, 0.0), 3.0);
        for (double s : {0.1, 1.0, 4.0}) {
            for (double t : {0.0, 0.5, 2.0}) {
                const double lap = b.s_times_laplacian(s, t);
                const double rhs = std::pow(b.value(s, t), q);
                INFO("dims " << dims_str(d) << " s=" << s << " t=" << t);
                CHECK(lap + rhs == Catch::Approx(0.0).margin(1e-12 * std::fabs(rhs)));
            }
        }
    }
}

TEST_CASE("bubble validation") {
    SpaceDims d(4, 3, 1);
    CHECK_THROWS_AS(Bubble(d, {0.0}, 0.0), domain_error);
    CHECK_THROWS_AS(Bubble(d, {0.0, 0.0}, 1.0), domain_error);
    CHECK_THROWS_AS(bubble_eval(Bubble(d, {0.0}, 1.0), 1.0, {0.0, 0.0}), domain_error);
    CHECK(bubble_eval(Bubble(d, {0.5}, 1.0), 1.0, {0.5}) ==
          Catch::Approx(Bubble(d, {0.5}, 1.0).value(1.0, 0.0)));
}

TEST_CASE("pair configuration and its interaction parameter") {
    SpaceDims d(5, 3, 2);
    Bubble b1(d, {0.0, 0.0}, 10.0);
    Bubble b2(d, {3.0, 4.0}, 40.0);
    TwoBubbleConfig cfg(b1, b2);
    CHECK(cfg.separation() == Catch::Approx(5.0));
    CHECK(cfg.eps12() ==
          Catch::Approx(std::pow(10.0 * 40.0 * 25.0, -1.5)).epsilon(1e-14));
    CHECK_THROWS_AS(TwoBubbleConfig(b1, Bubble(d, {0.0, 0.0}, 2.0)).eps12(), degenerate_error);

    // joint rescaling (lambda_j -> c lambda_j, separation -> sep/c) is neutral
    const double c = 7.0;
    TwoBubbleConfig scaled(Bubble(d, {0.0, 0.0}, c * 10.0),
                           Bubble(d, {3.0 / c, 4.0 / c}, c * 40.0));
    CHECK(scaled.eps12() == Catch::Approx(cfg.eps12()).epsilon(1e-13));
}

TEST_CASE("ansatz validation") {
    SpaceDims d(4, 3, 1);
    Bubble b1(d, {0.0}, 5.0), b2(d, {1.0}, 5.0);
    CHECK_NOTHROW(ConcentrationAnsatz(b1, b2, {1.0, 1.0}));
    CHECK_THROWS_AS(ConcentrationAnsatz(b1, b2, {0.0, 1.0}), domain_error);
    CHECK_THROWS_AS(ConcentrationAnsatz(b1, b2, {1.0, 1.0}, -1.0), domain_error);
    CHECK(ConcentrationAnsatz(b1, b2, {1.0, 2.0}).separation() == Catch::Approx(1.0));
}

TEST_CASE("perturbative profile validates and averages") {
    SpaceDims d(5, 3, 2);
    CHECK_THROWS_AS(PerturbativeModel(d, {0.0, 0.0}, 0.0, 0.5, {-1, -1, -1}, {-1, -1}, 0.5,
                                      1.0, 0.0),
                    domain_error);
    CHECK_THROWS_AS(PerturbativeModel(d, {0.0, 0.0}, 0.0, 3.5, {-1, -1, -1}, {-1, -1}, 0.5,
                                      1.0, 0.0),
                    domain_error);
    CHECK_THROWS_AS(PerturbativeModel(d, {0.0, 0.0}, 0.0, 1.5, {-1, 0, -1}, {-1, -1}, 0.5,
                                      1.0, 0.0),
                    domain_error);
    PerturbativeModel m(d, {0.0, 0.0}, 2.0, 1.5, {-1, -1, -1}, {-2, -2}, 0.5, 1.0, 0.0);
    CHECK(m.sum_xi() == Catch::Approx(-3.0));
    CHECK(m.sum_a() == Catch::Approx(-4.0));
    // inside the ball the averaged profile carries the z-component moment
    const double zm = component_moment(d.h, m.gamma);
    CHECK(m.kappa(0.2, 0.3) ==
          Catch::Approx(2.0 - 3.0 * std::pow(0.2, 1.5) - 4.0 * zm * std::pow(0.3, 1.5)));
    // outside it is the boundary average, constant
    CHECK(m.kappa(2.0, 2.0) == Catch::Approx(m.boundary_average()));
    CHECK(m.kappa(5.0, 0.0) == Catch::Approx(m.kappa(0.0, 5.0)));
}

TEST_CASE("component and block moments") {
    CHECK(component_moment(1, 1.5) == Catch::Approx(1.0));
    // d = 2, gamma = 2: mean of u1^2 over the circle is 1/2
    CHECK(component_moment(2, 2.0) == Catch::Approx(0.5).epsilon(1e-12));
    // h = 0 block is trivial
    CHECK(block_moment(3, 0, 1.5) == Catch::Approx(1.0));
    // full-sphere block: k + h with gamma = 2 gives k/(k+h)
    CHECK(block_moment(3, 2, 2.0) == Catch::Approx(3.0 / 5.0).epsilon(1e-12));
}

TEST_CASE("flat-maximum profile validates and clips at the floor") {
    SpaceDims d(5, 4, 1);
    CHECK_THROWS_AS(
        MaxPointModel(d, {{0.0}, {4.0}}, {1.0, 1.0}, {2.5, 3.5}, {1.0, 1.0}, 1.0, 2.0, 0.5,
                      1.0),
        domain_error);  // gamma out of (N-2, N)
    CHECK_THROWS_AS(
        MaxPointModel(d, {{0.0}, {4.0}}, {1.0, 1.0}, {3.5, 3.5}, {3.0, 1.0}, 1.0, 2.0, 0.5,
                      1.0),
        domain_error);  // q above a1
    MaxPointModel m(d, {{0.0}, {4.0}}, {1.0, 2.0}, {3.5, 3.5}, {1.0, 1.0}, 1.0, 2.0, 0.5,
                    1.0);
    CHECK(m.floor_value() == Catch::Approx(0.5));
    CHECK(m.phi_from_dists({0.0, 4.0}) == Catch::Approx(1.0));
    CHECK(m.phi_from_dists({4.0, 0.0}) == Catch::Approx(2.0));
    // far from every site the floor takes over
    CHECK(m.phi_from_dists({100.0, 100.0}) == Catch::Approx(0.5));
}
