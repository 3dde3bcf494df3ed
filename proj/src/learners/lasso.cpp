#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>

#include "zipper/learners.hpp"

namespace zipper {

double soft_threshold(double z, double gamma) {
    if (z > gamma) return z - gamma;
    if (z < -gamma) return z + gamma;
    return 0.0;
}

namespace {

constexpr double kProbClip = 1e-12;

// Columns of x (restricted to `cols`) centred and scaled to unit variance
// with divisor n. Constant columns are dropped; their slope stays zero.
struct Standardized {
    std::vector<Eigen::Index> cols;  // positions into the caller's column list
    Matrix z;
    Vector mean;
    Vector sd;
};

Standardized standardize(const Matrix& x) {
    const double n = static_cast<double>(x.rows());
    Standardized s;
    std::vector<double> means;
    std::vector<double> sds;
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        const double mu = x.col(j).mean();
        const double var = (x.col(j).array() - mu).square().sum() / n;
        if (var > 1e-24 * std::max(1.0, mu * mu)) {
            s.cols.push_back(j);
            means.push_back(mu);
            sds.push_back(std::sqrt(var));
        }
    }
    const auto q = static_cast<Eigen::Index>(s.cols.size());
    s.mean = Eigen::Map<Vector>(means.data(), q);
    s.sd = Eigen::Map<Vector>(sds.data(), q);
    s.z.resize(x.rows(), q);
    for (Eigen::Index k = 0; k < q; ++k) {
        s.z.col(k) = (x.col(s.cols[k]).array() - s.mean[k]) / s.sd[k];
    }
    return s;
}

// Z^T (y - mean(y)) / n on the standardised scale.
Vector centred_correlation(const Standardized& s, const Vector& y) {
    const double n = static_cast<double>(y.size());
    const Vector yc = y.array() - y.mean();
    return s.z.transpose() * yc / n;
}

double lambda_max_of(const Standardized& s, const Vector& y) {
    if (s.z.cols() == 0) return 0.0;
    return centred_correlation(s, y).lpNorm<Eigen::Infinity>();
}

// A solution on the original scale of the columns handed to lasso_path.
struct PathPoint {
    double intercept = 0.0;
    Vector beta;
    bool converged = true;
};

PathPoint to_original(const Standardized& s, Eigen::Index p, double intercept_std,
                      const Vector& b) {
    PathPoint pt;
    pt.beta = Vector::Zero(p);
    double shift = 0.0;
    for (Eigen::Index k = 0; k < b.size(); ++k) {
        const double coef = b[k] / s.sd[k];
        pt.beta[s.cols[k]] = coef;
        shift += coef * s.mean[k];
    }
    pt.intercept = intercept_std - shift;
    return pt;
}

// Cyclic coordinate descent for (1/2n)|y_c - Z b|^2 + lambda |b|_1 using
// covariance updates: the gradient c - G b is kept current as b changes.
class GramSolver {
public:
    GramSolver(const Standardized& s, const Vector& y)
        : gram_(s.z.transpose() * s.z / static_cast<double>(y.size())),
          corr_(centred_correlation(s, y)),
          grad_(corr_) {}

    bool solve(double lambda, Vector& b, const LassoOptions& options) {
        const Eigen::Index q = b.size();
        grad_ = corr_ - gram_ * b;
        int sweeps = 0;
        while (sweeps < options.max_sweeps) {
            ++sweeps;
            if (sweep_all(lambda, b) < options.tolerance) return true;
            while (sweeps < options.max_sweeps) {
                ++sweeps;
                double delta = 0.0;
                for (Eigen::Index j = 0; j < q; ++j) {
                    if (b[j] != 0.0) delta = std::max(delta, update(j, lambda, b));
                }
                if (delta < options.tolerance) break;
            }
        }
        return false;
    }

private:
    double sweep_all(double lambda, Vector& b) {
        double delta = 0.0;
        for (Eigen::Index j = 0; j < b.size(); ++j) delta = std::max(delta, update(j, lambda, b));
        return delta;
    }

    double update(Eigen::Index j, double lambda, Vector& b) {
        const double gjj = gram_(j, j);
        const double old = b[j];
        const double fresh = soft_threshold(grad_[j] + gjj * old, lambda) / gjj;
        if (fresh == old) return 0.0;
        const double d = fresh - old;
        grad_ -= d * gram_.col(j);
        b[j] = fresh;
        return std::abs(d) * std::sqrt(gjj);
    }

    Matrix gram_;
    Vector corr_;
    Vector grad_;
};

// Penalised IRLS: each outer step forms the quadratic approximation of the
// log-likelihood and minimises it by weighted coordinate descent.
bool solve_logistic(const Standardized& s, const Vector& y, double lambda, double& b0, Vector& b,
                    const LassoOptions& options) {
    const Eigen::Index n = y.size();
    const Eigen::Index q = b.size();
    const double nn = static_cast<double>(n);
    const Matrix& z = s.z;
    Vector eta(n), w(n), r(n), v(q);
    int sweeps = 0;
    for (int outer = 0; outer < 100; ++outer) {
        eta = (z * b).array() + b0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double p = logistic(eta[i]);
            w[i] = std::max(p * (1.0 - p), 1e-5);
            r[i] = (y[i] - p) / w[i];
        }
        v = (z.array().square().colwise() * w.array()).colwise().sum().transpose() / nn;
        const double wsum = w.sum();
        const double b0_start = b0;
        const Vector b_start = b;

        auto update = [&](Eigen::Index j) {
            const double old = b[j];
            const double num = z.col(j).dot(w.cwiseProduct(r)) / nn + v[j] * old;
            const double fresh = soft_threshold(num, lambda) / v[j];
            if (fresh == old) return 0.0;
            const double d = fresh - old;
            r -= d * z.col(j);
            b[j] = fresh;
            return std::abs(d) * std::sqrt(v[j]);
        };
        auto update_intercept = [&]() {
            const double d = w.dot(r) / wsum;
            b0 += d;
            r.array() -= d;
            return std::abs(d);
        };

        while (sweeps < options.max_sweeps) {
            ++sweeps;
            double delta = update_intercept();
            for (Eigen::Index j = 0; j < q; ++j) delta = std::max(delta, update(j));
            if (delta < options.tolerance) break;
            while (sweeps < options.max_sweeps) {
                ++sweeps;
                double d = update_intercept();
                for (Eigen::Index j = 0; j < q; ++j) {
                    if (b[j] != 0.0) d = std::max(d, update(j));
                }
                if (d < options.tolerance) break;
            }
        }

        const double change =
            std::max(std::abs(b0 - b0_start), (b - b_start).lpNorm<Eigen::Infinity>());
        if (change < options.tolerance) return true;
        if (sweeps >= options.max_sweeps) return false;
    }
    return false;
}

std::vector<PathPoint> lasso_path(const Matrix& x, const Vector& y, Family family,
                                  std::span<const double> lambdas, const LassoOptions& options) {
    const Standardized s = standardize(x);
    const Eigen::Index q = s.z.cols();
    std::vector<PathPoint> path;
    path.reserve(lambdas.size());
    Vector b = Vector::Zero(q);

    if (family == Family::linear) {
        const double ybar = y.mean();
        GramSolver solver(s, y);
        for (double lambda : lambdas) {
            const bool ok = q == 0 || solver.solve(lambda, b, options);
            PathPoint pt = to_original(s, x.cols(), ybar, b);
            pt.converged = ok;
            path.push_back(std::move(pt));
        }
        return path;
    }

    const double rate = std::clamp(y.mean(), 1e-6, 1.0 - 1e-6);
    double b0 = std::log(rate / (1.0 - rate));
    for (double lambda : lambdas) {
        const bool ok = solve_logistic(s, y, lambda, b0, b, options);
        PathPoint pt = to_original(s, x.cols(), b0, b);
        pt.converged = ok;
        path.push_back(std::move(pt));
    }
    return path;
}

double holdout_loss(const PathPoint& pt, const Matrix& x, const Vector& y, Family family) {
    const Vector eta = (x * pt.beta).array() + pt.intercept;
    double loss = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        if (family == Family::linear) {
            const double r = y[i] - eta[i];
            loss += r * r;
        } else {
            const double p = std::clamp(logistic(eta[i]), kProbClip, 1.0 - kProbClip);
            loss -= 2.0 * (y[i] * std::log(p) + (1.0 - y[i]) * std::log1p(-p));
        }
    }
    return loss;
}

PredictionFunction assemble(const PathPoint& pt, Family family, std::size_t p,
                            const std::vector<Eigen::Index>& active, const Restriction& excluded,
                            double lambda) {
    PredictionFunction f;
    f.kind = family == Family::linear ? PredictionKind::linear : PredictionKind::logistic;
    f.intercept = pt.intercept;
    f.coefficients = Vector::Zero(static_cast<Eigen::Index>(p));
    for (std::size_t k = 0; k < active.size(); ++k) {
        f.coefficients[active[k]] = pt.beta[static_cast<Eigen::Index>(k)];
    }
    f.excluded = excluded;
    f.penalty = lambda;
    if (!pt.converged) f.warnings.push_back("lasso coordinate descent hit the sweep limit");
    return f;
}

PredictionFunction constant_fallback(const Vector& y, std::size_t p, const Restriction& excluded,
                                     const std::string& why) {
    PredictionFunction f = fit_mean(y, p);
    f.excluded = excluded;
    f.warnings.push_back("lasso fell back to the constant model: " + why);
    return f;
}

}  // namespace

double lasso_lambda_max(const Matrix& x, const Vector& y, const Restriction& excluded_in) {
    const Restriction excluded = normalize_restriction(excluded_in);
    const auto active = active_columns(static_cast<std::size_t>(x.cols()), excluded);
    const Matrix xa = x(Eigen::all, active);
    return lambda_max_of(standardize(xa), y);
}

PredictionFunction fit_lasso(const Matrix& x, const Vector& y, Family family,
                             const Restriction& excluded_in, const LassoOptions& options,
                             RandomSource& source) {
    if (x.rows() != y.size()) throw DomainError("fit_lasso: row count mismatch");
    if (y.size() < 10) throw ConfigError("fit_lasso: need at least 10 rows");
    if (options.cv_folds < 2 || options.grid_size < 1 || !(options.min_ratio > 0.0) ||
        !(options.tolerance > 0.0)) {
        throw ConfigError("fit_lasso: invalid hyperparameters");
    }
    if (family == Family::logistic) {
        for (auto v : y) {
            if (v != 0.0 && v != 1.0) throw DomainError("fit_lasso: logistic response must be 0/1");
        }
    }

    const Restriction excluded = normalize_restriction(excluded_in);
    const auto p = static_cast<std::size_t>(x.cols());
    const auto active = active_columns(p, excluded);
    const Matrix xa = x(Eigen::all, active);

    const double ybar = y.mean();
    if (family == Family::logistic && (ybar == 0.0 || ybar == 1.0)) {
        return constant_fallback(y, p, excluded, "single response class");
    }

    if (options.lambda) {
        if (*options.lambda < 0.0) throw ConfigError("fit_lasso: lambda must be non-negative");
        const double lambda = *options.lambda;
        const auto path = lasso_path(xa, y, family, std::span<const double>(&lambda, 1), options);
        return assemble(path.front(), family, p, active, excluded, lambda);
    }

    const double lmax = lambda_max_of(standardize(xa), y);
    if (!(lmax > 0.0)) return constant_fallback(y, p, excluded, "no usable penalty grid");

    std::vector<double> grid(options.grid_size);
    const double steps = static_cast<double>(std::max<std::size_t>(options.grid_size - 1, 1));
    for (std::size_t g = 0; g < options.grid_size; ++g) {
        grid[g] = lmax * std::pow(options.min_ratio, static_cast<double>(g) / steps);
    }

    const auto n = static_cast<std::size_t>(y.size());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    source.shuffle(order.begin(), order.end());
    std::vector<std::size_t> cv_fold(n);
    for (std::size_t pos = 0; pos < n; ++pos) cv_fold[order[pos]] = pos % options.cv_folds;

    std::vector<double> cv_loss(grid.size(), 0.0);
    std::size_t usable = 0;
    for (std::size_t f = 0; f < options.cv_folds; ++f) {
        std::vector<Eigen::Index> train, test;
        for (std::size_t i = 0; i < n; ++i) {
            (cv_fold[i] == f ? test : train).push_back(static_cast<Eigen::Index>(i));
        }
        const Vector ytr = y(train);
        if (family == Family::logistic && (ytr.minCoeff() == ytr.maxCoeff())) continue;
        const Matrix xtr = xa(train, Eigen::all);
        const Matrix xte = xa(test, Eigen::all);
        const Vector yte = y(test);
        const auto path = lasso_path(xtr, ytr, family, grid, options);
        for (std::size_t g = 0; g < grid.size(); ++g) {
            cv_loss[g] += holdout_loss(path[g], xte, yte, family);
        }
        ++usable;
    }
    if (usable == 0) return constant_fallback(y, p, excluded, "no cross-validation fold was usable");

    const auto best = static_cast<std::size_t>(
        std::min_element(cv_loss.begin(), cv_loss.end()) - cv_loss.begin());
    const auto path =
        lasso_path(xa, y, family, std::span<const double>(grid.data(), best + 1), options);
    return assemble(path.back(), family, p, active, excluded, grid[best]);
}

}  // namespace zipper
