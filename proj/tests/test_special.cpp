#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "bubblereduce/special.hpp"

using namespace bubblereduce;

TEST_CASE("beta primitives reproduce closed forms") {
    CHECK(beta_integral_s(1.0, 4.0) == Catch::Approx(1.0 / 6.0).epsilon(1e-14));
    CHECK(beta_integral_t(2.0, 2.0) == Catch::Approx(0.5).epsilon(1e-14));
    CHECK(beta_integral_s(0.5, 3.0) == Catch::Approx(M_PI / 8.0).epsilon(1e-14));
    CHECK(beta_fn(2.0, 2.0) == Catch::Approx(1.0 / 6.0).epsilon(1e-14));
    // symmetry of the Beta function
    CHECK(beta_fn(1.7, 3.2) == Catch::Approx(beta_fn(3.2, 1.7)).epsilon(1e-14));
}

TEST_CASE("beta primitives reject divergent parameters") {
    CHECK_THROWS_AS(beta_integral_s(-1.0, 4.0), domain_error);
    CHECK_THROWS_AS(beta_integral_s(3.0, 4.0), domain_error);
    CHECK_THROWS_AS(beta_integral_t(0.0, 2.0), domain_error);
    CHECK_THROWS_AS(beta_integral_t(4.0, 2.0), domain_error);
    CHECK_THROWS_WITH(beta_integral_s(3.0, 4.0),
                      Catch::Matchers::ContainsSubstring("m + 1 < n"));
    CHECK_THROWS_WITH(beta_integral_t(4.0, 2.0), Catch::Matchers::ContainsSubstring("a < 2n"));
}

TEST_CASE("reduction recurrences hold on a parameter grid") {
    // hand values: m=1, n=3 gives B(2,1) = 1/2, both sides 1/6
    CHECK(beta_integral_s(1.0, 3.0) == Catch::Approx(0.5).epsilon(1e-14));
    RecurrenceReport r13 = check_recurrences(1.0, 3.0);
    CHECK(r13.max_rel_diff < 1e-12);

    const std::pair<double, double> grid[] = {{0.5, 3.0}, {1.0, 3.0}, {1.5, 3.0},
                                              {1.9, 3.0}, {0.5, 4.5}, {1.0, 4.5},
                                              {2.0, 4.5}, {2.5, 4.5}, {3.0, 4.5},
                                              {3.4, 4.5}};
    for (auto [m, n] : grid) {
        RecurrenceReport rep = check_recurrences(m, n);
        INFO("m=" << m << " n=" << n);
        CHECK(rep.max_rel_diff < 1e-12);
    }
    CHECK_THROWS_AS(check_recurrences(3.0, 3.0), domain_error);
}

TEST_CASE("power_excess matches the naive form at benign inputs") {
    for (double x : {0.3, 1.0, 7.0}) {
        for (double y : {0.2, 0.9, 3.0}) {
            for (double p : {1.5, 2.0, 10.0 / 3.0}) {
                const double naive = std::pow(x + y, p) - std::pow(x, p) - std::pow(y, p);
                CHECK(power_excess(x, y, p) == Catch::Approx(naive).epsilon(1e-12));
            }
        }
    }
    CHECK(power_excess(1.0, 0.0, 2.0) == 0.0);
    CHECK(power_excess(0.0, 1.0, 2.0) == 0.0);
}

TEST_CASE("power_excess keeps precision at extreme magnitude ratios") {
    // series oracle: (x+y)^p - x^p - y^p = p x^{p-1} y + p(p-1)/2 x^{p-2} y^2 + ...
    const double x = 1.0, p = 8.0 / 3.0;
    for (double y : {1e-8, 1e-12, 1e-15}) {
        const double series = p * std::pow(x, p - 1.0) * y +
                              0.5 * p * (p - 1.0) * std::pow(x, p - 2.0) * y * y;
        CHECK(power_excess(x, y, p) == Catch::Approx(series).epsilon(1e-10));
        // symmetry in the two arguments
        CHECK(power_excess(y, x, p) == power_excess(x, y, p));
    }
}
