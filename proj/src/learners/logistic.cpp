#include <algorithm>
#include <cmath>
#include <string>

#include "zipper/learners.hpp"

namespace zipper {

namespace {

struct NewtonResult {
    Vector beta;
    bool converged = false;
    bool diverging = false;
};

double penalized_loglik(const Matrix& design, const Vector& y, const Vector& beta, double ridge) {
    const Vector eta = design * beta;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        // log(1 + exp(eta)) computed without overflow.
        const double e = eta[i];
        const double log1pexp = e > 0.0 ? e + std::log1p(std::exp(-e)) : std::log1p(std::exp(e));
        ll += y[i] * e - log1pexp;
    }
    const double n = static_cast<double>(y.size());
    return ll - 0.5 * ridge * n * beta.tail(beta.size() - 1).squaredNorm();
}

// Newton-Raphson on the (optionally ridge-penalised) log-likelihood. The
// intercept, in position 0, is never penalised.
NewtonResult newton(const Matrix& design, const Vector& y, double ridge,
                    const LogisticOptions& options) {
    const Eigen::Index d = design.cols();
    const double n = static_cast<double>(y.size());
    NewtonResult out;
    out.beta = Vector::Zero(d);
    const double rate = std::clamp(y.mean(), 1e-6, 1.0 - 1e-6);
    out.beta[0] = std::log(rate / (1.0 - rate));

    double ll = penalized_loglik(design, y, out.beta, ridge);
    for (int iter = 0; iter < options.max_iterations; ++iter) {
        const Vector eta = design * out.beta;
        Vector p(eta.size());
        Vector w(eta.size());
        for (Eigen::Index i = 0; i < eta.size(); ++i) {
            p[i] = logistic(eta[i]);
            w[i] = p[i] * (1.0 - p[i]);
        }
        Vector grad = design.transpose() * (y - p);
        grad.tail(d - 1) -= ridge * n * out.beta.tail(d - 1);
        if (ridge == 0.0 && eta.cwiseAbs().maxCoeff() > 40.0) {
            out.diverging = true;
            return out;
        }
        Matrix hessian = design.transpose() * w.asDiagonal() * design;
        hessian.diagonal().tail(d - 1).array() += ridge * n;
        const Vector step = hessian.colPivHouseholderQr().solve(grad);
        // Under separation the gradient vanishes while Newton steps stay
        // large, so a small gradient alone does not mean convergence.
        if (grad.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance &&
            step.lpNorm<Eigen::Infinity>() <= 1e-6 * (1.0 + out.beta.lpNorm<Eigen::Infinity>())) {
            out.converged = true;
            return out;
        }

        double scale = 1.0;
        Vector candidate = out.beta + step;
        double candidate_ll = penalized_loglik(design, y, candidate, ridge);
        for (int halving = 0; halving < 40 && !(candidate_ll >= ll - 1e-12 * std::abs(ll));
             ++halving) {
            scale *= 0.5;
            candidate = out.beta + scale * step;
            candidate_ll = penalized_loglik(design, y, candidate, ridge);
        }
        out.beta = candidate;
        ll = candidate_ll;
    }
    const Vector eta = design * out.beta;
    Vector grad = design.transpose() * (y - eta.unaryExpr([](double t) { return logistic(t); }));
    grad.tail(d - 1) -= ridge * n * out.beta.tail(d - 1);
    out.converged = grad.lpNorm<Eigen::Infinity>() <= options.gradient_tolerance;
    out.diverging = !out.converged;
    return out;
}

}  // namespace

PredictionFunction fit_logistic(const Matrix& x, const Vector& y, const Restriction& excluded_in,
                                const LogisticOptions& options) {
    if (x.rows() != y.size()) throw DomainError("fit_logistic: row count mismatch");
    bool has0 = false;
    bool has1 = false;
    for (auto v : y) {
        if (v == 0.0) has0 = true;
        else if (v == 1.0) has1 = true;
        else throw DomainError("fit_logistic: response must be 0/1");
    }
    if (!has0 || !has1) throw DomainError("fit_logistic: both classes must be present");

    const Restriction excluded = normalize_restriction(excluded_in);
    const auto p = static_cast<std::size_t>(x.cols());
    const auto active = active_columns(p, excluded);
    const auto q = static_cast<Eigen::Index>(active.size());

    Matrix design(x.rows(), q + 1);
    design.col(0).setOnes();
    if (q > 0) design.rightCols(q) = x(Eigen::all, active);

    PredictionFunction f;
    f.kind = PredictionKind::logistic;
    f.excluded = excluded;

    NewtonResult fit = newton(design, y, 0.0, options);
    if (!fit.converged) {
        fit = newton(design, y, options.ridge_fallback, options);
        f.warnings.push_back("separation detected: ridge-stabilised fit (penalty " +
                             std::to_string(options.ridge_fallback) + ")");
        if (!fit.converged) f.warnings.push_back("logistic fit did not converge");
    }

    f.intercept = fit.beta[0];
    f.coefficients = Vector::Zero(static_cast<Eigen::Index>(p));
    for (Eigen::Index k = 0; k < q; ++k) f.coefficients[active[k]] = fit.beta[k + 1];
    return f;
}

}  // namespace zipper
