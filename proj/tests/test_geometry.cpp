#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <complex>
#include <random>

#include "bubblereduce/bubble.hpp"
#include "bubblereduce/geometry.hpp"
#include "bubblereduce/heisenberg.hpp"

using namespace bubblereduce;

namespace {

std::vector<std::complex<double>> random_sphere_point(std::mt19937_64& rng, int ncomp) {
    std::normal_distribution<double> g(0.0, 1.0);
    std::vector<std::complex<double>> v(ncomp);
    double n2 = 0.0;
    for (auto& c : v) {
        c = {g(rng), g(rng)};
        n2 += std::norm(c);
    }
    for (auto& c : v) c /= std::sqrt(n2);
    return v;
}

}  // namespace

TEST_CASE("sphere projection round-trips through its analytic inverse") {
    std::mt19937_64 rng(7);
    for (int ncomp : {2, 3}) {
        for (int rep = 0; rep < 20; ++rep) {
            auto theta = random_sphere_point(rng, ncomp);
            if (std::abs(1.0 + theta.back()) < 1e-3) continue;  // too near the pole
            HeisenbergPoint p = cr_to_heisenberg(theta);
            auto back = heisenberg_to_cr(p);
            REQUIRE(back.size() == theta.size());
            for (std::size_t j = 0; j < theta.size(); ++j)
                CHECK(std::abs(back[j] - theta[j]) < 1e-12);
        }
    }
    CHECK_THROWS_AS(cr_to_heisenberg({{1.0, 0.0}, {-1.0, 0.0}}), domain_error);
    CHECK_THROWS_AS(cr_to_heisenberg({{1.0, 0.0}, {1.0, 0.0}}), domain_error);
}

TEST_CASE("group extremal equals the scaled cylindrical profile pointwise") {
    for (int n : {1, 2}) {
        HeisenbergBubble hb(n, 0.0, 1.0);
        CHECK(hb.c0() == Catch::Approx(std::pow(2.0 * n, n)).epsilon(1e-15));
        CylFunction v = grushin_to_hs(heisenberg_profile(hb));
        Bubble u(SpaceDims::from_cr(n), {0.0}, 1.0);
        const double amp = std::pow(2.0, n);
        int checked = 0;
        for (double r : {0.1, 0.3, 0.7, 1.0, 1.7, 3.0, 6.0}) {
            for (double t : {0.0, 0.2, 0.9, 2.5}) {
                INFO("n=" << n << " r=" << r << " t=" << t);
                CHECK(v(r, t) == Catch::Approx(amp * u.value(r, t)).epsilon(1e-12));
                ++checked;
            }
        }
        CHECK(checked >= 25);
    }
}

TEST_CASE("substitution preserves suprema") {
    HeisenbergBubble hb(1, 0.0, 2.0);
    CylFunction prof = heisenberg_profile(hb);
    CylFunction v = grushin_to_hs(prof);
    double sup_in = 0.0, sup_out = 0.0;
    for (double r = 0.0; r < 5.0; r += 0.05) {
        sup_in = std::fmax(sup_in, prof(r, 0.0));
        sup_out = std::fmax(sup_out, v(r, 0.0));
    }
    CHECK(sup_out == Catch::Approx(sup_in).epsilon(1e-12));
    // and the two substitutions invert each other
    CylFunction back = hs_to_grushin(v, 2);
    CHECK(back(1.3, 0.4) == Catch::Approx(prof(1.3, 0.4)).epsilon(1e-13));
    CHECK_THROWS_AS(hs_to_grushin(v, 3), domain_error);
}

TEST_CASE("norm identity constant") {
    CHECK(norm_identity_constant(1) == Catch::Approx(2.0).epsilon(1e-12));
    CHECK(norm_identity_constant(2) == Catch::Approx(M_PI).epsilon(1e-12));
}

TEST_CASE("norm identity ratio is profile independent") {
    // standard extremal, n = 1
    CylFunction u1 = heisenberg_profile(HeisenbergBubble(1, 0.0, 1.0));
    CHECK(norm_identity_ratio(u1, 1) == Catch::Approx(2.0).epsilon(1e-6));
    // a second, slower profile with the same cylindrical symmetry
    const double Q = 4.0, dec = 0.5 * (Q - 2.0) * 1.1;
    CylFunction u2(SpaceDims(3, 2, 1),
                   [dec](double r, double t) {
                       return std::pow(1.0 + r * r * r * r + t * t, -0.5 * dec);
                   },
                   2.0 * dec);
    CHECK(norm_identity_ratio(u2, 1) == Catch::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("dirichlet energy is scale invariant") {
    std::vector<double> vals;
    for (double lam : {1.0, 2.0, 5.0}) {
        CylFunction u = heisenberg_profile(HeisenbergBubble(1, 0.0, lam));
        vals.push_back(dirichlet_norm_heisenberg(u, 1));
    }
    CHECK(vals[1] == Catch::Approx(vals[0]).epsilon(1e-6));
    CHECK(vals[2] == Catch::Approx(vals[0]).epsilon(1e-6));
    CHECK(vals[0] > 0.0);
}

TEST_CASE("geometry rejections") {
    CHECK_THROWS_AS(heisenberg_profile(HeisenbergBubble(1, 0.5, 1.0)), domain_error);
    CylFunction odd_k(SpaceDims(4, 3, 1), [](double, double) { return 1.0; }, 2.0);
    CHECK_THROWS_AS(grushin_to_hs(odd_k), domain_error);
    CHECK_THROWS_AS(CylFunction(SpaceDims(3, 2, 1), nullptr, 2.0), domain_error);
    CHECK_THROWS_AS(CylFunction(SpaceDims(5, 3, 2), [](double, double) { return 1.0; }, 1.0),
                    domain_error);
}
