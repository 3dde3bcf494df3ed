#include <doctest.h>

#include <cmath>

#include "zipper/errors.hpp"
#include "zipper/learners.hpp"

using namespace zipper;

namespace {

Matrix random_design(RandomSource& rng, Eigen::Index n, Eigen::Index p) {
    Matrix x(n, p);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < p; ++j) x(i, j) = rng.normal();
    return x;
}

Matrix with_intercept(const Matrix& x) {
    Matrix d(x.rows(), x.cols() + 1);
    d.col(0).setOnes();
    d.rightCols(x.cols()) = x;
    return d;
}

// Standardised column j with divisor n, as the lasso sees it.
Vector standard_column(const Matrix& x, Eigen::Index j) {
    const double mu = x.col(j).mean();
    const double sd = std::sqrt((x.col(j).array() - mu).square().mean());
    return (x.col(j).array() - mu) / sd;
}

}  // namespace

TEST_SUITE("learners") {

TEST_CASE("ols hand examples") {
    Matrix x(3, 1);
    x << 1, 2, 3;
    Vector y(3);
    y << 2, 4, 6;
    const auto f = fit_ols(x, y);
    CHECK(f.coefficients[0] == doctest::Approx(2.0));
    CHECK(std::abs(f.intercept) < 1e-12);
    CHECK((f.predict(x) - y).cwiseAbs().maxCoeff() < 1e-12);

    RandomSource rng(1);
    const Matrix x2 = random_design(rng, 30, 4);
    const Vector y2 = sample_normal(rng, 30);
    const auto mean_fit = fit_ols(x2, y2, {0, 1, 2, 3});
    CHECK(mean_fit.intercept == doctest::Approx(y2.mean()));
    CHECK(mean_fit.coefficients.isZero(0.0));
}

TEST_CASE("ols interpolates exact linear responses") {
    RandomSource rng(2);
    const Matrix x = random_design(rng, 40, 5);
    Vector beta(5);
    beta << 1, -2, 0.5, 0, 3;
    const Vector y = (x * beta).array() + 0.7;
    const auto f = fit_ols(x, y);
    CHECK((f.predict(x) - y).cwiseAbs().maxCoeff() < 1e-10);
    CHECK((f.coefficients - beta).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("ols residuals are orthogonal to the design") {
    RandomSource rng(3);
    for (int trial = 0; trial < 25; ++trial) {
        const auto n = static_cast<Eigen::Index>(20 + rng.index(200));
        const auto p = static_cast<Eigen::Index>(1 + rng.index(8));
        const Matrix x = random_design(rng, n, p);
        const Vector y = sample_normal(rng, static_cast<std::size_t>(n)) * 5.0;
        const auto f = fit_ols(x, y);
        const Vector r = y - f.predict(x);
        CHECK((with_intercept(x).transpose() * r).cwiseAbs().maxCoeff() <= 1e-8 * y.norm());
    }
}

TEST_CASE("ols reports the singular column") {
    RandomSource rng(4);
    Matrix x = random_design(rng, 20, 3);
    x.col(2) = 2.0 * x.col(0);
    const Vector y = sample_normal(rng, 20);
    try {
        fit_ols(x, y);
        FAIL("expected SingularDesignError");
    } catch (const SingularDesignError& e) {
        CHECK(e.column() == "x2");
    }
    x.col(2).setConstant(4.0);
    try {
        fit_ols(x, y);
        FAIL("expected SingularDesignError");
    } catch (const SingularDesignError& e) {
        CHECK(e.column() == "x2");
    }
    CHECK_NOTHROW(fit_ols(x, y, {2}));
}

TEST_CASE("logistic intercept-only and zero-column fits") {
    Matrix x = Matrix::Zero(40, 1);
    Vector y = Vector::Zero(40);
    for (int i = 0; i < 10; ++i) y[i] = 1.0;
    const auto f = fit_logistic(x, y);
    CHECK(logistic(f.intercept) == doctest::Approx(0.25));
    CHECK(f.coefficients[0] == 0.0);
    CHECK(f.warnings.empty());

    PredictionFunction zero;
    zero.kind = PredictionKind::logistic;
    zero.coefficients = Vector::Zero(3);
    const Matrix anywhere = Matrix::Random(6, 3);
    CHECK((zero.predict(anywhere).array() == 0.5).all());
}

TEST_CASE("logistic separated data falls back to a ridge fit") {
    Matrix x(4, 1);
    x << -2, -1, 1, 2;
    Vector y(4);
    y << 0, 0, 1, 1;
    const LogisticOptions options;
    const auto f = fit_logistic(x, y, {}, options);
    CHECK(f.coefficients[0] > 0.0);
    CHECK_FALSE(f.warnings.empty());
    CHECK(std::abs(f.intercept) < 1e-8);

    // Scalar Newton oracle on the same penalised objective. The data are
    // symmetric, so the intercept is zero and only the slope remains.
    const double penalty = options.ridge_fallback * 4.0;
    double b = 0.0;
    for (int it = 0; it < 200; ++it) {
        double g = -penalty * b;
        double h = penalty;
        for (int i = 0; i < 4; ++i) {
            const double p = 1.0 / (1.0 + std::exp(-b * x(i, 0)));
            g += x(i, 0) * (y[i] - p);
            h += x(i, 0) * x(i, 0) * p * (1.0 - p);
        }
        b += g / h;
    }
    CHECK(f.coefficients[0] == doctest::Approx(b).epsilon(1e-6));
}

TEST_CASE("logistic score equation at convergence") {
    RandomSource rng(5);
    for (int trial = 0; trial < 10; ++trial) {
        const Matrix x = random_design(rng, 300, 4);
        Vector y(300);
        for (Eigen::Index i = 0; i < 300; ++i) {
            y[i] = rng.uniform() < logistic(0.3 + 0.8 * x(i, 0) - 0.5 * x(i, 2)) ? 1.0 : 0.0;
        }
        const auto f = fit_logistic(x, y);
        CHECK(f.warnings.empty());
        const Vector score = with_intercept(x).transpose() * (y - f.predict(x));
        CHECK(score.lpNorm<Eigen::Infinity>() <= 1e-6);
    }
}

TEST_CASE("logistic input checks") {
    Matrix x = Matrix::Zero(4, 1);
    Vector ones = Vector::Ones(4);
    CHECK_THROWS_AS(fit_logistic(x, ones), DomainError);
    Vector bad(4);
    bad << 0, 1, 2, 0;
    CHECK_THROWS_AS(fit_logistic(x, bad), DomainError);
}

TEST_CASE("soft threshold") {
    CHECK(soft_threshold(3.0, 1.0) == 2.0);
    CHECK(soft_threshold(0.5, 1.0) == 0.0);
    CHECK(soft_threshold(-3.0, 1.0) == -2.0);
}

TEST_CASE("lasso at lambda max is the null model") {
    RandomSource rng(6);
    const Matrix x = random_design(rng, 80, 6);
    const Vector y = x.col(1) * 2.0 + sample_normal(rng, 80);
    LassoOptions options;
    options.lambda = lasso_lambda_max(x, y);
    const auto f = fit_lasso(x, y, Family::linear, {}, options, rng);
    CHECK(f.coefficients.isZero(0.0));
    CHECK(f.intercept == doctest::Approx(y.mean()));
}

TEST_CASE("lasso at lambda zero matches ols") {
    RandomSource rng(7);
    const Matrix x = random_design(rng, 60, 5);
    const Vector y = x * Vector::LinSpaced(5, -1, 1) + sample_normal(rng, 60);
    LassoOptions options;
    options.lambda = 0.0;
    options.tolerance = 1e-12;
    const auto lasso = fit_lasso(x, y, Family::linear, {}, options, rng);
    const auto ols = fit_ols(x, y);
    CHECK((lasso.coefficients - ols.coefficients).cwiseAbs().maxCoeff() <= 1e-6);
    CHECK(lasso.intercept == doctest::Approx(ols.intercept).epsilon(1e-6));
}

TEST_CASE("lasso KKT conditions at the selected lambda") {
    RandomSource rng(8);
    for (int trial = 0; trial < 4; ++trial) {
        const Matrix x = random_design(rng, 120, 30);
        Vector beta = Vector::Zero(30);
        beta.head(3) << 2, -1.5, 1;
        const Vector y = x * beta + sample_normal(rng, 120);
        const auto f = fit_lasso(x, y, Family::linear, {}, LassoOptions{}, rng);
        REQUIRE(f.penalty.has_value());
        const double lambda = *f.penalty;
        const Vector r = y - f.predict(x);
        int active = 0;
        for (Eigen::Index j = 0; j < 30; ++j) {
            const double g = standard_column(x, j).dot(r) / 120.0;
            if (f.coefficients[j] != 0.0) {
                ++active;
                CHECK(std::abs(g - lambda * (f.coefficients[j] > 0 ? 1.0 : -1.0)) <= 1e-6);
            } else {
                CHECK(std::abs(g) <= lambda + 1e-6);
            }
        }
        CHECK(active >= 3);
        CHECK(std::abs(r.mean()) <= 1e-10);
    }
}

TEST_CASE("lasso logistic family") {
    RandomSource rng(9);
    const Matrix x = random_design(rng, 200, 10);
    Vector y(200);
    for (Eigen::Index i = 0; i < 200; ++i) y[i] = rng.uniform() < logistic(1.5 * x(i, 0)) ? 1.0 : 0.0;
    const auto f = fit_lasso(x, y, Family::logistic, {}, LassoOptions{}, rng);
    CHECK(f.kind == PredictionKind::logistic);
    CHECK(f.coefficients[0] > 0.5);
    const Vector p = f.predict(x);
    CHECK(p.minCoeff() > 0.0);
    CHECK(p.maxCoeff() < 1.0);

    // penalised score condition for the weighted problem, on the probability scale
    const double lambda = *f.penalty;
    const Vector r = y - p;
    CHECK(std::abs(r.mean()) <= 1e-5);
    for (Eigen::Index j = 0; j < 10; ++j) {
        const double g = standard_column(x, j).dot(r) / 200.0;
        if (f.coefficients[j] == 0.0) CHECK(std::abs(g) <= lambda + 1e-5);
    }
}

TEST_CASE("lasso degenerate response falls back to a constant") {
    RandomSource rng(10);
    const Matrix x = random_design(rng, 30, 3);
    const Vector y = Vector::Constant(30, 2.5);
    const auto f = fit_lasso(x, y, Family::linear, {}, LassoOptions{}, rng);
    CHECK(f.coefficients.isZero(0.0));
    CHECK(f.intercept == doctest::Approx(2.5));
    CHECK_FALSE(f.warnings.empty());
}

TEST_CASE("best subset recovers the true support") {
    RandomSource rng(11);
    Matrix x = random_design(rng, 50, 4);
    const Vector y = 3.0 * x.col(1) - 2.0 * x.col(3);
    const auto f = fit_best_subset(x, y, 2, Family::linear);
    CHECK(f.support() == std::vector<std::size_t>{1, 3});

    const Vector noisy = 3.0 * x.col(1) - 2.0 * x.col(3) + 0.1 * sample_normal(rng, 50);
    const auto g = fit_best_subset(x, noisy, 2, Family::linear);
    CHECK(g.support() == std::vector<std::size_t>{1, 3});

    // OLS oracle over all six supports
    double best = 1e300;
    std::vector<std::size_t> arg;
    for (std::size_t a = 0; a < 4; ++a) {
        for (std::size_t b = a + 1; b < 4; ++b) {
            Restriction excluded;
            for (std::size_t j = 0; j < 4; ++j)
                if (j != a && j != b) excluded.push_back(j);
            const double rss = (noisy - fit_ols(x, noisy, excluded).predict(x)).squaredNorm();
            if (rss < best) {
                best = rss;
                arg = {a, b};
            }
        }
    }
    CHECK(arg == g.support());
}

TEST_CASE("best subset of size p is the full fit") {
    RandomSource rng(12);
    const Matrix x = random_design(rng, 40, 3);
    const Vector y = sample_normal(rng, 40);
    const auto all = fit_best_subset(x, y, 3, Family::linear);
    const auto ols = fit_ols(x, y);
    CHECK((all.coefficients - ols.coefficients).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("best subset guard") {
    const Matrix x = Matrix::Random(50, 40);
    const Vector y = Vector::Random(50);
    CHECK_THROWS_AS(fit_best_subset(x, y, 5, Family::linear), CapabilityError);
    CHECK_THROWS_AS(fit_best_subset(x, y, 41, Family::linear), ConfigError);
}

TEST_CASE("excluded columns never affect predictions") {
    RandomSource rng(13);
    const Matrix x = random_design(rng, 100, 6);
    Vector yb(100);
    for (Eigen::Index i = 0; i < 100; ++i) yb[i] = rng.uniform() < logistic(x(i, 2)) ? 1.0 : 0.0;
    const Vector y = x.col(0) + x.col(1) + sample_normal(rng, 100);
    const Restriction drop = {0, 4};
    Matrix perturbed = x;
    perturbed.col(0) = sample_normal(rng, 100) * 100.0;
    perturbed.col(4).setConstant(1e6);

    for (const char* spec : {"ols", "logistic", "lasso_linear", "lasso_logistic", "mean_only",
                             "zero", "best_subset(2)"}) {
        CAPTURE(spec);
        const auto learner = make_learner(spec, drop);
        const bool binary = std::string(spec).find("logistic") != std::string::npos;
        RandomSource fit_rng(1);
        const auto f = learner->fit(x, binary ? yb : y, fit_rng);
        for (std::size_t j : drop) CHECK(f.coefficients[static_cast<Eigen::Index>(j)] == 0.0);
        CHECK(f.predict(x) == f.predict(perturbed));

        RandomSource refit_rng(1);
        const auto g = learner->fit(perturbed, binary ? yb : y, refit_rng);
        CHECK(g.coefficients == f.coefficients);
        CHECK(g.intercept == f.intercept);
    }
}

TEST_CASE("learner specs parse and describe themselves") {
    auto spec = LearnerSpec::parse("best_subset(2)");
    CHECK(spec.name == "best_subset");
    CHECK(spec.params.at("s") == "2");
    spec = LearnerSpec::parse("lasso_linear(cv_folds=10, grid=20)");
    CHECK(spec.params.at("cv_folds") == "10");
    CHECK(spec.params.at("grid") == "20");
    CHECK(LearnerSpec::parse(spec.to_string()).params == spec.params);

    CHECK_THROWS_AS(make_learner("forest"), ConfigError);
    CHECK_THROWS_AS(make_learner("ols(alpha=1)"), ConfigError);
    CHECK_THROWS_AS(make_learner("lasso_linear(cv_folds=one)"), ConfigError);
    CHECK_THROWS_AS(make_learner("best_subset"), ConfigError);
    CHECK_THROWS_AS(make_learner("ols("), ConfigError);

    const auto learner = make_learner("ols", {3, 1, 3});
    CHECK(learner->restriction() == Restriction{1, 3});
    CHECK(learner->describe().contains("name"));
}

TEST_CASE("nesting checks") {
    const auto full = make_learner("ols");
    const auto restricted = make_learner("ols", {0, 1});
    CHECK(nested_in(*restricted, *full, 5));
    CHECK_FALSE(nested_in(*full, *restricted, 5));
    CHECK(nested_in(*make_learner("zero"), *make_learner("mean_only"), 0));
    CHECK(nested_in(*make_learner("mean_only"), *full, 5));
    CHECK_FALSE(nested_in(*make_learner("ols"), *make_learner("best_subset(2)"), 5));
    CHECK(nested_in(*make_learner("ols", {2, 3, 4}), *make_learner("best_subset(2)"), 5));
}

TEST_CASE("mean and zero learners") {
    Vector y(4);
    y << 1, 2, 3, 6;
    const auto m = fit_mean(y, 2);
    CHECK(m.predict(Matrix::Zero(3, 2)).isApprox(Vector::Constant(3, 3.0)));
    const auto z = fit_zero(2);
    CHECK(z.predict(Matrix::Ones(3, 2)).isZero(0.0));
}

}
