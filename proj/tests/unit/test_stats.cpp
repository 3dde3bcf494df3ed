#include <doctest.h>

#include <cmath>
#include <vector>

#include "zipper/core.hpp"
#include "zipper/stats.hpp"

using namespace zipper;

TEST_SUITE("stats") {

TEST_CASE("kolmogorov tail") {
    CHECK(kolmogorov_sf(1.3581) == doctest::Approx(0.05).epsilon(1e-3));
    CHECK(kolmogorov_sf(1.6276) == doctest::Approx(0.01).epsilon(1e-3));
    CHECK(kolmogorov_sf(0.0) == 1.0);
    CHECK(kolmogorov_sf(5.0) < 1e-15);
    double previous = 1.0;
    for (double x = 0.1; x < 3.0; x += 0.1) {
        CHECK(kolmogorov_sf(x) <= previous);
        previous = kolmogorov_sf(x);
    }
}

TEST_CASE("ks against the normal") {
    RandomSource rng(3);
    std::vector<double> draws(2000);
    for (auto& v : draws) v = rng.normal();
    const KsResult good = ks_test_normal(draws);
    CHECK(good.n == 2000);
    CHECK(good.p_value > 0.01);
    for (auto& v : draws) v += 0.2;
    CHECK(ks_test_normal(draws).p_value < 1e-6);

    // exact statistic for a single point at zero
    const std::vector<double> one = {0.0};
    CHECK(ks_test_normal(one).statistic == doctest::Approx(0.5));
}

TEST_CASE("binomial standard error") {
    CHECK(binomial_se(0.05, 1000) == doctest::Approx(std::sqrt(0.05 * 0.95 / 1000)));
    CHECK(binomial_se(0.0, 10) == 0.0);
}

}
