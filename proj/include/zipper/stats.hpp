#pragma once

#include <cstddef>
#include <span>

namespace zipper {

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
};

// P(K > x) for the limiting Kolmogorov distribution.
double kolmogorov_sf(double x);

// One-sample Kolmogorov-Smirnov test of `values` against N(0, 1), with
// Stephens' finite-sample correction for the p-value.
KsResult ks_test_normal(std::span<const double> values);

// Standard error of a binomial proportion, sqrt(rate (1 - rate) / reps).
double binomial_se(double rate, std::size_t reps);

}  // namespace zipper
