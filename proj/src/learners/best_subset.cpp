#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "zipper/learners.hpp"

namespace zipper {

namespace {

double choose(std::size_t n, std::size_t k) {
    double c = 1.0;
    for (std::size_t i = 1; i <= k; ++i) {
        c = c * static_cast<double>(n - k + i) / static_cast<double>(i);
    }
    return c;
}

double training_loss(const PredictionFunction& f, const Matrix& x, const Vector& y, Family family) {
    const Vector pred = f.predict(x);
    if (family == Family::linear) return (y - pred).squaredNorm();
    double dev = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        const double p = std::clamp(pred[i], 1e-12, 1.0 - 1e-12);
        dev -= 2.0 * (y[i] * std::log(p) + (1.0 - y[i]) * std::log1p(-p));
    }
    return dev;
}

}  // namespace

PredictionFunction fit_best_subset(const Matrix& x, const Vector& y, std::size_t subset_size,
                                   Family family, const Restriction& excluded_in) {
    const Restriction excluded = normalize_restriction(excluded_in);
    const auto p = static_cast<std::size_t>(x.cols());
    const auto active = active_columns(p, excluded);
    const std::size_t q = active.size();
    if (subset_size < 1 || subset_size > q) {
        throw ConfigError("fit_best_subset: subset size " + std::to_string(subset_size) +
                          " must lie in [1, " + std::to_string(q) + "]");
    }
    if (choose(q, subset_size) > static_cast<double>(kBestSubsetLimit)) {
        throw CapabilityError("fit_best_subset: choose(" + std::to_string(q) + ", " +
                              std::to_string(subset_size) +
                              ") supports exceed the exhaustive-search limit of " +
                              std::to_string(kBestSubsetLimit) + "; restrict the covariates");
    }

    // Lexicographic enumeration of size-s index combinations into `active`.
    std::vector<std::size_t> pick(subset_size);
    for (std::size_t i = 0; i < subset_size; ++i) pick[i] = i;

    PredictionFunction best;
    double best_loss = std::numeric_limits<double>::infinity();
    std::string last_failure;
    while (true) {
        std::vector<bool> keep(p, false);
        for (auto i : pick) keep[static_cast<std::size_t>(active[i])] = true;
        Restriction drop;
        for (std::size_t j = 0; j < p; ++j) {
            if (!keep[j]) drop.push_back(j);
        }
        try {
            PredictionFunction f = family == Family::linear ? fit_ols(x, y, drop)
                                                            : fit_logistic(x, y, drop);
            const double loss = training_loss(f, x, y, family);
            if (loss < best_loss) {
                best_loss = loss;
                best = std::move(f);
            }
        } catch (const SingularDesignError& e) {
            last_failure = e.what();
        }

        std::size_t i = subset_size;
        while (i > 0 && pick[i - 1] == q - subset_size + i - 1) --i;
        if (i == 0) break;
        ++pick[i - 1];
        for (std::size_t j = i; j < subset_size; ++j) pick[j] = pick[j - 1] + 1;
    }
    if (!std::isfinite(best_loss)) {
        throw SingularDesignError("subset", "fit_best_subset: every support failed: " + last_failure);
    }
    return best;
}

}  // namespace zipper
