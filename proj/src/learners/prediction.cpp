#include <algorithm>
#include <cmath>
#include <string>

#include "zipper/learners.hpp"

namespace zipper {

Restriction normalize_restriction(Restriction r) {
    std::sort(r.begin(), r.end());
    r.erase(std::unique(r.begin(), r.end()), r.end());
    return r;
}

std::vector<Eigen::Index> active_columns(std::size_t p, const Restriction& excluded) {
    for (auto j : excluded) {
        if (j >= p) {
            throw ConfigError("restriction index " + std::to_string(j) +
                              " is outside the covariate range [0, " + std::to_string(p) + ")");
        }
    }
    std::vector<Eigen::Index> active;
    for (std::size_t j = 0; j < p; ++j) {
        if (!std::binary_search(excluded.begin(), excluded.end(), j)) {
            active.push_back(static_cast<Eigen::Index>(j));
        }
    }
    return active;
}

double logistic(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    const double e = std::exp(t);
    return e / (1.0 + e);
}

Vector PredictionFunction::linear_predictor(const Matrix& x) const {
    Vector eta = Vector::Constant(x.rows(), intercept);
    if (kind == PredictionKind::constant) return eta;
    if (x.cols() != coefficients.size()) {
        throw DomainError("predict: design has " + std::to_string(x.cols()) +
                          " columns but the rule was fitted on " +
                          std::to_string(coefficients.size()));
    }
    const auto active = active_columns(static_cast<std::size_t>(x.cols()), excluded);
    if (!active.empty()) eta += x(Eigen::all, active) * coefficients(active);
    return eta;
}

Vector PredictionFunction::predict(const Matrix& x) const {
    Vector eta = linear_predictor(x);
    if (kind == PredictionKind::logistic) {
        for (auto& v : eta) v = logistic(v);
    }
    return eta;
}

std::vector<std::size_t> PredictionFunction::support() const {
    std::vector<std::size_t> out;
    for (Eigen::Index j = 0; j < coefficients.size(); ++j) {
        if (coefficients[j] != 0.0) out.push_back(static_cast<std::size_t>(j));
    }
    return out;
}

PredictionFunction fit_mean(const Vector& y, std::size_t p) {
    if (y.size() == 0) throw DegenerateSampleError("fit_mean: empty response");
    PredictionFunction f;
    f.kind = PredictionKind::constant;
    f.intercept = y.mean();
    f.coefficients = Vector::Zero(static_cast<Eigen::Index>(p));
    return f;
}

PredictionFunction fit_zero(std::size_t p) {
    PredictionFunction f;
    f.kind = PredictionKind::constant;
    f.intercept = 0.0;
    f.coefficients = Vector::Zero(static_cast<Eigen::Index>(p));
    return f;
}

}  // namespace zipper
