#include <catch2/catch_amalgamated.hpp>

#include <array>
#include <cmath>

#include "bubblereduce/reduction.hpp"

using namespace bubblereduce;

namespace {

/// Brute-force oracle: repeatedly evaluate the residual sup-norm on a 400x400
/// log-spaced grid and shrink the box around the best cell.  Slow but free of
/// any shared machinery with the Newton path.
std::array<double, 2> grid_refine_root(const ReducedSystem& sys, double lo, double hi) {
    double l1 = std::log(lo), u1 = std::log(hi), l2 = l1, u2 = u1;
    const int n = 400;
    for (int it = 0; it < 10; ++it) {
        int bi = 0, bj = 0;
        double best = HUGE_VAL;
        const double w1 = (u1 - l1) / (n - 1), w2 = (u2 - l2) / (n - 1);
        for (int i = 0; i < n; ++i) {
            const double t1 = std::exp(l1 + w1 * i);
            for (int j = 0; j < n; ++j) {
                const double t2 = std::exp(l2 + w2 * j);
                // scaled form: 1 - c_j t_j^{g_j} (t1 t2)^{-m'}; the raw
                // residual decays at the far corner, which would park the
                // argmin on the box boundary instead of the root
                const double mm = 0.5 * (sys.N - 2);
                const double prod = std::pow(t1 * t2, -mm);
                const double g1 = 1.0 - sys.c1 * std::pow(t1, sys.gamma1) * prod;
                const double g2 = 1.0 - sys.c2 * std::pow(t2, sys.gamma2) * prod;
                const double m = std::fmax(std::fabs(g1), std::fabs(g2));
                if (m < best) {
                    best = m;
                    bi = i;
                    bj = j;
                }
            }
        }
        const double c1 = l1 + w1 * bi, c2 = l2 + w2 * bj;
        l1 = c1 - 2.0 * w1;
        u1 = c1 + 2.0 * w1;
        l2 = c2 - 2.0 * w2;
        u2 = c2 + 2.0 * w2;
    }
    return {std::exp(0.5 * (l1 + u1)), std::exp(0.5 * (l2 + u2))};
}

}  // namespace

TEST_CASE("newton agrees with the grid-refinement oracle") {
    const std::array<double, 5> g1s{1.3, 1.7, 2.1, 1.2, 2.4};
    const std::array<double, 5> g2s{1.9, 1.2, 1.4, 2.3, 1.8};
    const std::array<double, 5> c1s{0.7, 1.9, 0.4, 2.5, 1.1};
    const std::array<double, 5> c2s{1.6, 0.6, 2.2, 0.9, 3.0};
    for (int i = 0; i < 5; ++i) {
        ReducedSystem sys(5, g1s[i], g2s[i], c1s[i], c2s[i]);
        NewtonResult nr = newton_solve(sys);
        const std::array<double, 2> oracle = grid_refine_root(sys, 1e-2, 1e2);
        INFO("system " << i);
        CHECK(std::fabs(nr.t[0] - oracle[0]) <= 1e-8 * oracle[0]);
        CHECK(std::fabs(nr.t[1] - oracle[1]) <= 1e-8 * oracle[1]);
        CHECK(nr.res_sup < 1e-12);
        // and the explicit log-linear root agrees too
        const std::array<double, 2> lin = sys.log_linear_root();
        CHECK(nr.t[0] == Catch::Approx(lin[0]).epsilon(1e-10));
        CHECK(nr.t[1] == Catch::Approx(lin[1]).epsilon(1e-10));
    }
}

TEST_CASE("symmetric root has a closed form") {
    const int N = 5;
    for (double g : {1.3, 1.9, 2.5}) {
        for (double c : {0.5, 1.0, 2.0}) {
            ReducedSystem sys(N, g, g, c, c);
            NewtonResult nr = newton_solve(sys);
            const double expect = std::pow(c, 1.0 / (N - 2.0 - g));
            INFO("g=" << g << " c=" << c);
            CHECK(std::fabs(nr.t[0] - expect) <= 1e-12 * expect);
            CHECK(std::fabs(nr.t[1] - expect) <= 1e-12 * expect);
        }
    }
}

TEST_CASE("system validation") {
    CHECK_THROWS_AS(ReducedSystem(2, 1.5, 1.5, 1.0, 1.0), domain_error);
    CHECK_THROWS_AS(ReducedSystem(5, -1.0, 1.5, 1.0, 1.0), domain_error);
    CHECK_THROWS_AS(ReducedSystem(5, 1.5, 1.5, 0.0, 1.0), domain_error);
    CHECK_THROWS_AS(ReducedSystem(5, 1.5, 1.5, 1.0, 1.0, 1.0, 0.5), domain_error);
    ReducedSystem sys(5, 1.5, 1.5, 1.0, 1.0);
    CHECK_THROWS_AS(sys.residual(-1.0, 1.0), domain_error);
}

TEST_CASE("degree certificate on and off the root box") {
    const std::array<double, 3> gs{1.3, 1.7, 2.2};
    const std::array<double, 3> cs{0.6, 1.0, 2.3};
    int count = 0;
    for (double g1 : gs) {
        for (double c1 : cs) {
            const double g2 = 3.5 - g1, c2 = 2.9 - c1;
            ReducedSystem sys(5, g1, g2, c1, c2);
            INFO("g1=" << g1 << " c1=" << c1);
            CHECK(winding_degree(sys) == -1);
            ++count;
        }
    }
    CHECK(count == 9);

    // a box strictly to one side of the root contains no zero
    ReducedSystem sys(5, 1.5, 1.5, 1.0, 1.0);
    const std::array<double, 2> root = sys.log_linear_root();
    ReducedSystem off(5, 1.5, 1.5, 1.0, 1.0, root[0] * 4.0, root[0] * 400.0);
    CHECK(winding_degree(off) == 0);

    // enlargement invariance
    ReducedSystem wide(5, 1.5, 1.5, 1.0, 1.0, 1e-5, 1e5);
    CHECK(winding_degree(wide) == -1);
}

TEST_CASE("epsilon scale algebra") {
    const double g1 = 1.4, g2 = 1.9;
    const int N = 5;
    const double den = 0.5 * (N - 2) * (g1 + g2) - g1 * g2;
    REQUIRE(den > 0.0);
    for (double eps : {1e-2, 1e-3}) {
        CHECK(l_epsilon(g1, g2, N, eps) ==
              Catch::Approx(std::pow(eps, -g1 * g2 / den)).epsilon(1e-14));
        CHECK(l_epsilon(g1, g2, N, eps) == l_epsilon(g2, g1, N, eps));
    }
    CHECK_THROWS_AS(l_epsilon(g1, g2, N, 0.0), domain_error);
    // den <= 0 regime is rejected
    CHECK_THROWS_AS(l_epsilon(3.5, 3.5, 5, 1e-2), domain_error);
}

TEST_CASE("separation scale algebra") {
    // symmetric: den = g^2 - g (N-2), L = s^{(N-2) g / den}
    CHECK(l_scale_24(3.5, 3.5, 5, 2.0)[0] == Catch::Approx(64.0).epsilon(1e-12));
    CHECK(l_scale_24(3.5, 3.5, 5, 2.0)[1] == Catch::Approx(64.0).epsilon(1e-12));
    // asymmetric swap exchanges the two components
    const std::array<double, 2> L = l_scale_24(3.3, 3.8, 5, 10.0);
    const std::array<double, 2> Ls = l_scale_24(3.8, 3.3, 5, 10.0);
    CHECK(L[0] == Catch::Approx(Ls[1]).epsilon(1e-14));
    CHECK(L[1] == Catch::Approx(Ls[0]).epsilon(1e-14));
    CHECK_THROWS_AS(l_scale_24(1.5, 1.5, 5, 10.0), domain_error);
    CHECK_THROWS_AS(l_scale_24(3.5, 3.5, 5, 0.0), domain_error);
}

TEST_CASE("perturbative construction produces the scaled ansatz") {
    SpaceDims d(5, 3, 2);
    PerturbativeModel m1(d, {0.0, 0.0}, 1.0, 1.5, {-1, -1, -1}, {-1, -1}, 0.5, 1.0, 0.0);
    PerturbativeModel m2(d, {3.0, 0.0}, 1.0, 1.5, {-1, -1, -1}, {-1, -1}, 0.5, 1.0, 0.0);
    const double eps = 1e-2;
    Theorem23Solution sol = solve_theorem23(m1, m2, eps);
    CHECK(sol.degree == -1);
    const double L = l_epsilon(1.5, 1.5, 5, eps);
    CHECK(sol.L == Catch::Approx(L));
    CHECK(sol.ansatz.b1.lambda ==
          Catch::Approx(sol.t[0] * std::pow(L, 1.0 / 1.5)).epsilon(1e-12));
    CHECK(sol.ansatz.b2.lambda ==
          Catch::Approx(sol.t[1] * std::pow(L, 1.0 / 1.5)).epsilon(1e-12));
    CHECK(sol.ansatz.b1.eta == m1.center);
    CHECK(sol.ansatz.b2.eta == m2.center);

    // inadmissible curvature coefficients: positive xi/a flip the sign of g
    PerturbativeModel bad(d, {0.0, 0.0}, 1.0, 1.5, {1, 1, 1}, {1, 1}, 0.5, 1.0, 0.0);
    CHECK_THROWS_AS(solve_theorem23(bad, m2, eps), admissibility_error);
    // epsilon too large for the requested neighborhood: lambda falls below 1/mu
    CHECK_THROWS_AS(solve_theorem23(m1, m2, 0.5, 0.01), domain_error);
}

TEST_CASE("single-site leading equation has no root") {
    SpaceDims d(5, 3, 2);
    PerturbativeModel m(d, {0.0, 0.0}, 1.0, 1.5, {-1, -1, -1}, {-1, -1}, 0.5, 1.0, 0.0);
    ObstructionCheck oc = single_peak_obstruction(m, 1e-2);
    CHECK(oc.obstructed);
    CHECK(oc.min_abs > 0.0);
}
