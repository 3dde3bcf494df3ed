#pragma once

#include <functional>
#include <string>
#include <string_view>

#include "zipper/core.hpp"

namespace zipper {

enum class PredictionDomain { real_line, unit_interval };

// Predictiveness criterion of mean-of-score form C(f, P) = E[g(Y, f(X))].
// Larger is better, so losses enter negated. Any criterion of this form
// has the centred score as its influence value, which is what the engine
// relies on; new criteria are added by constructing one with a custom g.
class Criterion {
public:
    using Score = std::function<double(double y, double prediction)>;

    Criterion(std::string name, PredictionDomain domain, Score score);

    static Criterion squared_loss();
    // Predictions are clamped to [clip, 1 - clip] before taking logs.
    static Criterion cross_entropy(double clip = 1e-12);
    // "squared" or "cross_entropy".
    static Criterion from_name(std::string_view name);

    const std::string& name() const noexcept { return name_; }
    PredictionDomain domain() const noexcept { return domain_; }

    double score(double y, double prediction) const;
    Vector scores(const Vector& y, const Vector& predictions) const;

private:
    std::string name_;
    PredictionDomain domain_;
    Score score_;
};

// Empirical influence values of a mean-of-score criterion: g_i - mean(g).
struct InfluenceVector {
    Vector values;
};

double empirical_criterion(const Criterion& criterion, const Vector& y, const Vector& predictions);

InfluenceVector influence_values(const Criterion& criterion, const Vector& y,
                                 const Vector& predictions);

// Centres precomputed scores g_i.
InfluenceVector centre_scores(const Vector& scores);

// Mean of squared influence values (divisor n, not n - 1).
double influence_variance(const InfluenceVector& influence);

}  // namespace zipper
