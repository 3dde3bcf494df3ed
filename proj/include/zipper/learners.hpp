#pragma once

#include <cstddef>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "zipper/core.hpp"

namespace zipper {

enum class Family { linear, logistic };
enum class PredictionKind { linear, logistic, constant };

// Sorted, duplicate-free set of excluded covariate indices.
using Restriction = std::vector<std::size_t>;

Restriction normalize_restriction(Restriction r);

// Indices in [0, p) not listed in the restriction. Throws ConfigError when
// the restriction names a column outside the range.
std::vector<Eigen::Index> active_columns(std::size_t p, const Restriction& excluded);

// A fitted prediction rule. Excluded coefficients are exactly zero and are
// never read at prediction time.
struct PredictionFunction {
    PredictionKind kind = PredictionKind::constant;
    double intercept = 0.0;
    Vector coefficients;
    Restriction excluded;
    std::optional<double> penalty;  // lasso lambda on the standardised scale
    std::vector<std::string> warnings;

    // Linear predictor for linear/logistic kinds, the constant otherwise.
    Vector linear_predictor(const Matrix& x) const;
    // Response-scale prediction (probabilities for the logistic kind).
    Vector predict(const Matrix& x) const;
    std::vector<std::size_t> support() const;
};

double logistic(double t);

PredictionFunction fit_ols(const Matrix& x, const Vector& y, const Restriction& excluded = {});

struct LogisticOptions {
    int max_iterations = 100;
    double gradient_tolerance = 1e-8;
    double ridge_fallback = 1e-6;
};

PredictionFunction fit_logistic(const Matrix& x, const Vector& y, const Restriction& excluded = {},
                                const LogisticOptions& options = {});

// S(z, g) = sign(z) * max(|z| - g, 0).
double soft_threshold(double z, double gamma);

struct LassoOptions {
    std::size_t cv_folds = 5;
    std::size_t grid_size = 50;
    double min_ratio = 1e-3;
    double tolerance = 1e-7;
    int max_sweeps = 100000;
    // When set, skip cross-validation and fit at this lambda.
    std::optional<double> lambda;
};

// Smallest lambda (standardised scale) at which every slope is zero.
double lasso_lambda_max(const Matrix& x, const Vector& y, const Restriction& excluded = {});

PredictionFunction fit_lasso(const Matrix& x, const Vector& y, Family family,
                             const Restriction& excluded, const LassoOptions& options,
                             RandomSource& source);

inline constexpr std::size_t kBestSubsetLimit = 10000;

PredictionFunction fit_best_subset(const Matrix& x, const Vector& y, std::size_t subset_size,
                                   Family family, const Restriction& excluded = {});

PredictionFunction fit_mean(const Vector& y, std::size_t p);
PredictionFunction fit_zero(std::size_t p);

// Name plus key=value hyperparameters, e.g. "lasso_linear(cv_folds=10)",
// "best_subset(2)" or "best_subset(s=2,family=logistic)".
struct LearnerSpec {
    std::string name;
    std::map<std::string, std::string> params;
    Restriction restriction;

    static LearnerSpec parse(std::string_view text);
    std::string to_string() const;
};

// Training-side estimator for one model class. Subclass to plug in other
// algorithms; the engine only calls fit().
class Learner {
public:
    virtual ~Learner() = default;

    virtual PredictionFunction fit(const Matrix& x, const Vector& y, RandomSource& source) const = 0;

    virtual const LearnerSpec& spec() const = 0;
    const Restriction& restriction() const { return spec().restriction; }

    // Rough description of the model class used for nesting checks.
    enum class ClassKind { zero, constant, linear, opaque };
    virtual ClassKind class_kind() const { return ClassKind::opaque; }
    // Upper bound on the number of covariates a fitted rule may use.
    virtual std::optional<std::size_t> max_support() const { return std::nullopt; }

    nlohmann::json describe() const;
};

std::shared_ptr<const Learner> make_learner(const LearnerSpec& spec);
std::shared_ptr<const Learner> make_learner(std::string_view spec_text, Restriction restriction = {});

// True when the restricted class is provably contained in the full class
// (constant classes always are; linear families by support inclusion).
// Opaque learners are trusted.
bool nested_in(const Learner& restricted, const Learner& full, std::size_t p);

}  // namespace zipper
