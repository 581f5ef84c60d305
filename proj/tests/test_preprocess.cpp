#include "cyclonids/errors.hpp"
#include "cyclonids/preprocess.hpp"
#include "cyclonids/rng.hpp"

#include <doctest.h>

#include <cmath>

using namespace cyclonids;

namespace {

void check_standardized(const Matrix& z, const Standardizer& s) {
    const double n = static_cast<double>(z.rows());
    for (std::size_t j = 0; j < z.cols(); ++j) {
        if (s.zero_variance[j]) continue;
        double mean = 0.0;
        for (std::size_t i = 0; i < z.rows(); ++i) mean += z(i, j);
        mean /= n;
        double ss = 0.0;
        for (std::size_t i = 0; i < z.rows(); ++i) ss += (z(i, j) - mean) * (z(i, j) - mean);
        CHECK(std::abs(mean) < 1e-9);
        CHECK(std::abs(std::sqrt(ss / (n - 1)) - 1.0) < 1e-9);
    }
}

} // namespace

TEST_CASE("two value column") {
    const auto s = fit_standardizer(Matrix(2, 1, {2, 4}));
    CHECK(s.means[0] == 3.0);
    CHECK(s.stds[0] == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
    CHECK_FALSE(s.zero_variance[0]);
}

TEST_CASE("constant column is flagged") {
    const auto s = fit_standardizer(Matrix(3, 1, {5, 5, 5}));
    CHECK(s.means[0] == 5.0);
    CHECK(s.stds[0] == 1.0);
    CHECK(s.zero_variance[0]);
    CHECK(transform(s, Matrix(3, 1, {5, 5, 5})) == Matrix(3, 1, 0.0));
    const auto t = fit_standardizer(Matrix(3, 1, {0.1, 0.1, 0.1}));
    CHECK(t.zero_variance[0]);
}

TEST_CASE("three by two example") {
    const Matrix m(3, 2, {1, 10, 2, 20, 3, 30});
    const auto z = transform(fit_standardizer(m), m);
    for (std::size_t j = 0; j < 2; ++j) {
        CHECK(z(0, j) == doctest::Approx(-1.0).epsilon(1e-15));
        CHECK(std::abs(z(1, j)) < 1e-15);
        CHECK(z(2, j) == doctest::Approx(1.0).epsilon(1e-15));
    }
}

TEST_CASE("row at the means maps to zeros") {
    const Matrix m(4, 2, {1, 7, 2, 3, 6, 1, 3, 5});
    const auto s = fit_standardizer(m);
    const auto z = transform(s, Matrix(1, 2, {s.means[0], s.means[1]}));
    CHECK(z == Matrix(1, 2, 0.0));
}

TEST_CASE("fitted matrix is standardized and refitting is idempotent") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 2 + rng.index(40);
        const std::size_t p = 1 + rng.index(6);
        Matrix m(n, p);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < p; ++j) m(i, j) = rng.normal() * (1 + j * 100.0) + 1e3 * static_cast<double>(j);
        const auto s = fit_standardizer(m);
        const auto z = transform(s, m);
        check_standardized(z, s);
        const auto again = fit_standardizer(z);
        for (std::size_t j = 0; j < p; ++j) {
            CHECK(std::abs(again.means[j]) < 1e-9);
            CHECK(std::abs(again.stds[j] - 1.0) < 1e-9);
        }
    }
}

TEST_CASE("affine equivariance") {
    Rng rng(8);
    for (int trial = 0; trial < 30; ++trial) {
        const std::size_t n = 3 + rng.index(30);
        Matrix y(n, 1), ay(n, 1);
        const double a = 0.01 + 50.0 * rng.uniform();
        const double b = 200.0 * (rng.uniform() - 0.5);
        for (std::size_t i = 0; i < n; ++i) {
            y(i, 0) = rng.normal();
            ay(i, 0) = a * y(i, 0) + b;
        }
        const auto zy = transform(fit_standardizer(y), y);
        const auto za = transform(fit_standardizer(ay), ay);
        for (std::size_t i = 0; i < n; ++i) CHECK(std::abs(zy(i, 0) - za(i, 0)) < 1e-9);
    }
}

TEST_CASE("errors") {
    CHECK_THROWS_AS(fit_standardizer(Matrix(1, 2, {1, 2})), DataError);
    const auto s = fit_standardizer(Matrix(2, 2, {1, 2, 3, 4}));
    CHECK_THROWS_AS(transform(s, Matrix(2, 3)), DataError);
}
