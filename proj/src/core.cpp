#include "zipper/core.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace zipper {

Matrix cholesky(const Matrix& s) {
    if (s.rows() != s.cols()) {
        throw DomainError("cholesky: matrix must be square");
    }
    const Eigen::Index p = s.rows();
    Matrix l = Matrix::Zero(p, p);
    for (Eigen::Index j = 0; j < p; ++j) {
        double diag = s(j, j);
        for (Eigen::Index k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
        if (!(diag > 0.0) || !std::isfinite(diag)) {
            throw DefinitenessError(static_cast<std::size_t>(j),
                                    "cholesky: matrix is not positive definite (pivot " +
                                        std::to_string(j) + ")");
        }
        const double ljj = std::sqrt(diag);
        l(j, j) = ljj;
        for (Eigen::Index i = j + 1; i < p; ++i) {
            double v = s(i, j);
            for (Eigen::Index k = 0; k < j; ++k) v -= l(i, k) * l(j, k);
            l(i, j) = v / ljj;
        }
    }
    return l;
}

double std_normal_cdf(double x) {
    return 0.5 * std::erfc(-x / std::numbers::sqrt2);
}

double std_normal_sf(double x) {
    return 0.5 * std::erfc(x / std::numbers::sqrt2);
}

double std_normal_pdf(double x) {
    return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi);
}

double std_normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) {
        throw DomainError("std_normal_quantile: probability must lie in (0, 1)");
    }
    if (p == 0.5) return 0.0;
    // Work in the lower tail where Phi keeps full relative precision.
    if (p > 0.5) return -std_normal_quantile(1.0 - p);

    double lo = -40.0;
    double hi = 0.0;
    while (hi - lo > 1e-3) {
        const double mid = 0.5 * (lo + hi);
        if (std_normal_cdf(mid) < p) lo = mid; else hi = mid;
    }
    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 50; ++iter) {
        const double step = (std_normal_cdf(x) - p) / std_normal_pdf(x);
        double next = x - step;
        if (next <= lo || next >= hi) next = 0.5 * (lo + hi);
        if (std_normal_cdf(next) < p) lo = next; else hi = next;
        if (std::abs(next - x) <= 1e-15 * std::max(1.0, std::abs(x))) {
            x = next;
            break;
        }
        x = next;
    }
    return x;
}

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::mt19937_64 seeded_engine(std::uint64_t seed, std::uint64_t stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

}  // namespace

RandomSource::RandomSource(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream), engine_(seeded_engine(seed, stream)) {}

RandomSource RandomSource::derive(std::uint64_t tag) const {
    return RandomSource(seed_, splitmix64(stream_ ^ splitmix64(tag ^ 0x5851f42d4c957f2dULL)));
}

double RandomSource::uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double RandomSource::normal() { return normal_(engine_); }

double RandomSource::student_t(int df) {
    if (df < 1) throw DomainError("student_t: degrees of freedom must be >= 1");
    const double z = normal();
    double chi2 = 0.0;
    for (int i = 0; i < df; ++i) {
        const double u = normal();
        chi2 += u * u;
    }
    return z / std::sqrt(chi2 / df);
}

std::size_t RandomSource::index(std::size_t n) {
    std::uniform_int_distribution<std::size_t> dist(0, n - 1);
    return dist(engine_);
}

Vector sample_normal(RandomSource& source, std::size_t n) {
    Vector v(static_cast<Eigen::Index>(n));
    for (auto& x : v) x = source.normal();
    return v;
}

Vector sample_uniform(RandomSource& source, std::size_t n) {
    Vector v(static_cast<Eigen::Index>(n));
    for (auto& x : v) x = source.uniform();
    return v;
}

Vector sample_t(RandomSource& source, std::size_t n, int df) {
    if (df < 1) throw DomainError("sample_t: degrees of freedom must be >= 1");
    Vector v(static_cast<Eigen::Index>(n));
    for (auto& x : v) x = source.student_t(df);
    return v;
}

}  // namespace zipper
