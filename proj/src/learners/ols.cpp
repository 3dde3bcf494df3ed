#include <string>

#include "zipper/learners.hpp"

namespace zipper {

PredictionFunction fit_ols(const Matrix& x, const Vector& y, const Restriction& excluded_in) {
    if (x.rows() != y.size()) throw DomainError("fit_ols: row count mismatch");
    const Restriction excluded = normalize_restriction(excluded_in);
    const auto p = static_cast<std::size_t>(x.cols());
    const auto active = active_columns(p, excluded);
    const auto q = static_cast<Eigen::Index>(active.size());
    if (x.rows() <= q + 1) {
        throw SingularDesignError("rows", "fit_ols: need more rows than active columns + 1");
    }

    Matrix design(x.rows(), q + 1);
    design.col(0).setOnes();
    if (q > 0) design.rightCols(q) = x(Eigen::all, active);

    Eigen::ColPivHouseholderQR<Matrix> qr(design);
    if (qr.rank() < q + 1) {
        // Blame the first column, in input order, that adds nothing new.
        Eigen::Index bad = q;
        for (Eigen::Index k = 1; k <= q; ++k) {
            Eigen::ColPivHouseholderQR<Matrix> prefix(design.leftCols(k + 1));
            prefix.setThreshold(qr.threshold());
            if (prefix.rank() < k + 1) {
                bad = k;
                break;
            }
        }
        const std::string column =
            bad == 0 ? std::string("intercept") : "x" + std::to_string(active[bad - 1]);
        throw SingularDesignError(column, "fit_ols: design is rank deficient at column " + column);
    }
    const Vector beta = qr.solve(y);

    PredictionFunction f;
    f.kind = PredictionKind::linear;
    f.intercept = beta[0];
    f.coefficients = Vector::Zero(static_cast<Eigen::Index>(p));
    for (Eigen::Index k = 0; k < q; ++k) f.coefficients[active[k]] = beta[k + 1];
    f.excluded = excluded;
    return f;
}

}  // namespace zipper
