#include "zipper/criteria.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

namespace zipper {

Criterion::Criterion(std::string name, PredictionDomain domain, Score score)
    : name_(std::move(name)), domain_(domain), score_(std::move(score)) {}

Criterion Criterion::squared_loss() {
    return Criterion("squared", PredictionDomain::real_line, [](double y, double pred) {
        const double r = y - pred;
        return -r * r;
    });
}

Criterion Criterion::cross_entropy(double clip) {
    if (!(clip > 0.0 && clip < 0.5)) throw ConfigError("cross_entropy: clip must lie in (0, 0.5)");
    return Criterion("cross_entropy", PredictionDomain::unit_interval, [clip](double y, double pred) {
        const double p = std::clamp(pred, clip, 1.0 - clip);
        return y * std::log(p) + (1.0 - y) * std::log1p(-p);
    });
}

Criterion Criterion::from_name(std::string_view name) {
    if (name == "squared") return squared_loss();
    if (name == "cross_entropy") return cross_entropy();
    throw ConfigError("unknown criterion '" + std::string(name) +
                      "' (expected squared | cross_entropy)");
}

double Criterion::score(double y, double prediction) const {
    if (!std::isfinite(prediction)) {
        throw DomainError(name_ + ": prediction is not finite");
    }
    if (domain_ == PredictionDomain::unit_interval && (prediction < 0.0 || prediction > 1.0)) {
        throw DomainError(name_ + ": prediction " + std::to_string(prediction) +
                          " lies outside [0, 1]");
    }
    return score_(y, prediction);
}

Vector Criterion::scores(const Vector& y, const Vector& predictions) const {
    if (y.size() != predictions.size()) {
        throw DomainError(name_ + ": response and prediction lengths differ");
    }
    Vector g(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i) g[i] = score(y[i], predictions[i]);
    return g;
}

double empirical_criterion(const Criterion& criterion, const Vector& y, const Vector& predictions) {
    if (y.size() == 0) throw DegenerateSampleError("empirical_criterion: empty sample");
    return criterion.scores(y, predictions).mean();
}

InfluenceVector centre_scores(const Vector& scores) {
    if (scores.size() == 0) return InfluenceVector{Vector()};
    return InfluenceVector{scores.array() - scores.mean()};
}

InfluenceVector influence_values(const Criterion& criterion, const Vector& y,
                                 const Vector& predictions) {
    if (y.size() == 0) throw DegenerateSampleError("influence_values: empty sample");
    return centre_scores(criterion.scores(y, predictions));
}

double influence_variance(const InfluenceVector& influence) {
    const auto n = influence.values.size();
    if (n < 2) throw DegenerateSampleError("influence_variance: need at least 2 values");
    return influence.values.squaredNorm() / static_cast<double>(n);
}

}  // namespace zipper
