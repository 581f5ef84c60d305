#pragma once

// Eigenvalues of a small symmetric matrix by bisection on the inertia of
// A - xI: the number of negative pivots of its LDL^T factorization equals the
// number of eigenvalues below x. Independent of the Jacobi solver.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <vector>

namespace oracle {

using Dense = std::vector<std::vector<double>>;

inline std::size_t count_below(const Dense& a, double x) {
    const std::size_t n = a.size();
    Dense m = a;
    for (std::size_t i = 0; i < n; ++i) m[i][i] -= x;
    std::size_t negatives = 0;
    for (std::size_t k = 0; k < n; ++k) {
        double pivot = m[k][k];
        if (pivot == 0.0) pivot = -1e-300;
        if (pivot < 0.0) ++negatives;
        for (std::size_t i = k + 1; i < n; ++i) {
            const double f = m[i][k] / pivot;
            for (std::size_t j = k + 1; j < n; ++j) m[i][j] -= f * m[k][j];
        }
    }
    return negatives;
}

// Ascending eigenvalues.
inline std::vector<double> eigenvalues(const Dense& a) {
    const std::size_t n = a.size();
    double radius = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double r = 0.0;
        for (std::size_t j = 0; j < n; ++j) r += std::abs(a[i][j]);
        radius = std::max(radius, r);
    }
    radius += 1.0;
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        double lo = -radius, hi = radius;
        for (int step = 0; step < 200 && hi - lo > 1e-14 * std::max(1.0, radius); ++step) {
            const double mid = 0.5 * (lo + hi);
            if (count_below(a, mid) > i) hi = mid;
            else lo = mid;
        }
        out[i] = 0.5 * (lo + hi);
    }
    return out;
}

} // namespace oracle
