#include "zipper/stats.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "zipper/core.hpp"

namespace zipper {

double kolmogorov_sf(double x) {
    if (x <= 0.0) return 1.0;
    if (x < 0.2) return 1.0;  // series converges slowly here and the value is 1 to double precision
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 200; ++k) {
        const double term = sign * std::exp(-2.0 * k * k * x * x);
        sum += term;
        if (std::abs(term) < 1e-16 * std::abs(sum)) break;
        sign = -sign;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

KsResult ks_test_normal(std::span<const double> values) {
    KsResult r;
    r.n = values.size();
    if (r.n == 0) throw DegenerateSampleError("ks_test_normal: empty sample");
    std::vector<double> sorted(values.begin(), values.end());
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(r.n);
    double d = 0.0;
    for (std::size_t i = 0; i < r.n; ++i) {
        const double f = std_normal_cdf(sorted[i]);
        d = std::max({d, (static_cast<double>(i) + 1.0) / n - f, f - static_cast<double>(i) / n});
    }
    r.statistic = d;
    const double root = std::sqrt(n);
    r.p_value = kolmogorov_sf((root + 0.12 + 0.11 / root) * d);
    return r;
}

double binomial_se(double rate, std::size_t reps) {
    if (reps == 0) return 0.0;
    return std::sqrt(rate * (1.0 - rate) / static_cast<double>(reps));
}

}  // namespace zipper
