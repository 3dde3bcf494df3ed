#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "zipper/core.hpp"
#include "zipper/errors.hpp"

using namespace zipper;

namespace {

// Composite Simpson rule on the standard normal density; independent of erfc.
double integrate_density(double upper) {
    const double lower = -40.0;
    const int steps = 200000;
    const double h = (upper - lower) / steps;
    double sum = 0.0;
    for (int i = 0; i <= steps; ++i) {
        const double x = lower + i * h;
        const double w = (i == 0 || i == steps) ? 1.0 : (i % 2 ? 4.0 : 2.0);
        sum += w * std::exp(-0.5 * x * x);
    }
    return sum * h / 3.0 / std::sqrt(2.0 * M_PI);
}

Matrix random_spd(RandomSource& rng, Eigen::Index p) {
    Matrix a(p, p);
    for (Eigen::Index i = 0; i < p; ++i)
        for (Eigen::Index j = 0; j < p; ++j) a(i, j) = rng.normal();
    return a * a.transpose() + static_cast<double>(p) * Matrix::Identity(p, p) * 0.1;
}

}  // namespace

TEST_SUITE("core") {

TEST_CASE("cholesky small cases") {
    CHECK(cholesky(Matrix::Identity(3, 3)).isApprox(Matrix::Identity(3, 3)));

    Matrix ar(2, 2);
    ar << 1.0, 0.2, 0.2, 1.0;
    const Matrix l = cholesky(ar);
    CHECK(l(0, 0) == doctest::Approx(1.0));
    CHECK(l(0, 1) == 0.0);
    CHECK(l(1, 0) == doctest::Approx(0.2));
    CHECK(l(1, 1) == doctest::Approx(std::sqrt(0.96)));

    Matrix s(2, 2);
    s << 4.0, 2.0, 2.0, 3.0;
    const Matrix l2 = cholesky(s);
    CHECK(l2(0, 0) == doctest::Approx(2.0));
    CHECK(l2(1, 0) == doctest::Approx(1.0));
    CHECK(l2(1, 1) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("cholesky round trip on random SPD matrices") {
    RandomSource rng(11);
    for (Eigen::Index p : {1, 2, 5, 13, 31, 50}) {
        const Matrix s = random_spd(rng, p);
        const Matrix l = cholesky(s);
        CHECK(l.triangularView<Eigen::StrictlyUpper>().toDenseMatrix().isZero(0.0));
        const double err = (l * l.transpose() - s).cwiseAbs().maxCoeff();
        CHECK(err <= 1e-8 * s.cwiseAbs().maxCoeff());
    }
}

TEST_CASE("cholesky names the failing pivot") {
    Matrix s(3, 3);
    s << 1, 0, 0, 0, 1, 0, 0, 0, -1;
    try {
        cholesky(s);
        FAIL("expected DefinitenessError");
    } catch (const DefinitenessError& e) {
        CHECK(e.pivot() == 2);
    }
    CHECK_THROWS_AS(cholesky(Matrix::Zero(2, 3)), DomainError);
}

TEST_CASE("normal cdf against a quadrature oracle") {
    CHECK(std_normal_cdf(0.0) == 0.5);
    CHECK(std_normal_cdf(1.6449) == doctest::Approx(0.95).epsilon(1e-4));
    CHECK(std_normal_cdf(-8.0) < 1e-14);
    CHECK(std_normal_cdf(-8.0) > 0.0);
    for (double x : {-6.0, -3.1, -1.0, -0.3, 0.0, 0.7, 1.96, 2.5, 4.0}) {
        CHECK(std::abs(std_normal_cdf(x) - integrate_density(x)) <= 1e-10);
        CHECK(std::abs(std_normal_cdf(-x) - (1.0 - std_normal_cdf(x))) <= 1e-15);
        CHECK(std_normal_sf(x) == doctest::Approx(std_normal_cdf(-x)).epsilon(1e-14));
    }
    double previous = 0.0;
    for (double x = -10.0; x <= 10.0; x += 0.01) {
        const double value = std_normal_cdf(x);
        CHECK(value >= previous);
        previous = value;
    }
}

TEST_CASE("normal quantile inverts the cdf") {
    CHECK(std_normal_quantile(0.5) == doctest::Approx(0.0).epsilon(1e-14));
    CHECK(std_normal_quantile(0.95) == doctest::Approx(1.6449).epsilon(1e-4));
    CHECK(std_normal_quantile(0.975) == doctest::Approx(1.9600).epsilon(1e-4));
    for (int k = 1; k <= 999; ++k) {
        const double p = k / 1000.0;
        CHECK(std::abs(std_normal_cdf(std_normal_quantile(p)) - p) <= 1e-9);
    }
    CHECK(std::abs(std_normal_cdf(std_normal_quantile(1e-12)) - 1e-12) <= 1e-20);
    CHECK_THROWS_AS(std_normal_quantile(0.0), DomainError);
    CHECK_THROWS_AS(std_normal_quantile(1.0), DomainError);
    CHECK_THROWS_AS(std_normal_quantile(-0.2), DomainError);
}

TEST_CASE("random streams are reproducible and separable") {
    RandomSource a(42), b(42), c(42, 1);
    const Vector x = sample_normal(a, 5);
    const Vector y = sample_normal(b, 5);
    const Vector z = sample_normal(c, 5);
    CHECK(x == y);
    CHECK(x != z);

    RandomSource parent(9);
    RandomSource child = parent.derive(3);
    const Vector first = sample_uniform(child, 4);
    sample_uniform(parent, 100);
    RandomSource again = parent.derive(3);
    CHECK(sample_uniform(again, 4) == first);
    RandomSource other = parent.derive(4);
    CHECK(sample_uniform(other, 4) != first);
}

TEST_CASE("sampler moments") {
    RandomSource rng(2024);
    const std::size_t n = 1000000;
    const Vector z = sample_normal(rng, n);
    CHECK(std::abs(z.mean()) <= 0.004);
    const double var = (z.array() - z.mean()).square().mean();
    CHECK(std::abs(var - 1.0) <= 3.0 * std::sqrt(2.0 / n));

    const Vector u = sample_uniform(rng, n);
    CHECK(u.minCoeff() >= 0.0);
    CHECK(u.maxCoeff() < 1.0);
    CHECK(std::abs(u.mean() - 0.5) <= 3.0 * std::sqrt(1.0 / 12.0 / n));

    Vector t = sample_t(rng, n, 3);
    std::vector<double> sorted(t.begin(), t.end());
    std::nth_element(sorted.begin(), sorted.begin() + n / 2, sorted.end());
    CHECK(std::abs(sorted[n / 2]) <= 0.01);
    // P(|t_3| > 3.182) = 0.05
    const double tail = (t.array().abs() > 3.182446).cast<double>().mean();
    CHECK(std::abs(tail - 0.05) <= 3.0 * std::sqrt(0.05 * 0.95 / n));
}

TEST_CASE("index draws stay in range") {
    RandomSource rng(5);
    std::vector<int> counts(7, 0);
    for (int i = 0; i < 70000; ++i) ++counts[rng.index(7)];
    for (int c : counts) CHECK(std::abs(c - 10000) < 500);
}

}
