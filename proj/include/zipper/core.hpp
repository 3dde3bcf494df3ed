#pragma once

#include <cstddef>
#include <algorithm>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

#include "zipper/errors.hpp"

namespace zipper {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Lower-triangular Cholesky factor L with L * L^T == s.
//
// Throws DefinitenessError carrying the zero-based pivot at which a
// non-positive diagonal was met.
Matrix cholesky(const Matrix& s);

// Standard normal distribution function.
double std_normal_cdf(double x);

// Upper tail 1 - Phi(x), accurate far into the right tail.
double std_normal_sf(double x);

// Inverse of std_normal_cdf on (0, 1); throws DomainError outside it.
double std_normal_quantile(double p);

double std_normal_pdf(double x);

// Seedable random stream. A (seed, stream) pair always reproduces the same
// draw sequence; derive() hands out child streams for concurrent tasks, so a
// single instance is never shared between threads.
class RandomSource {
public:
    explicit RandomSource(std::uint64_t seed, std::uint64_t stream = 0);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream() const noexcept { return stream_; }

    // Child stream keyed by tag. Depends only on (seed, stream, tag), never on
    // how many draws this source has produced.
    RandomSource derive(std::uint64_t tag) const;

    double uniform();  // [0, 1)
    double normal();
    double student_t(int df);
    std::size_t index(std::size_t n);  // uniform on {0, ..., n-1}

    template <class It>
    void shuffle(It first, It last) {
        std::shuffle(first, last, engine_);
    }

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

Vector sample_normal(RandomSource& source, std::size_t n);
Vector sample_uniform(RandomSource& source, std::size_t n);
Vector sample_t(RandomSource& source, std::size_t n, int df);

}  // namespace zipper
