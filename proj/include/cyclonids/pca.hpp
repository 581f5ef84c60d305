#pragma once

#include "cyclonids/matrix.hpp"
#include "cyclonids/preprocess.hpp"

#include <utility>
#include <vector>

namespace cyclonids {

struct SymmetricEigen {
    std::vector<double> values;  // descending
    Matrix vectors;              // column j pairs with values[j]
};

// Cyclic Jacobi rotations on a symmetric matrix. Eigenvectors are
// orthonormal columns, sorted by descending eigenvalue, with the sign fixed
// so each column's largest-magnitude entry is non-negative.
SymmetricEigen eigen_symmetric(const Matrix& a);

struct PCAModel {
    Standardizer standardizer;
    Matrix loadings;  // p x p, columns are components
    std::vector<double> eigenvalues;
    std::vector<double> explained_variance_ratio;

    std::size_t dimension() const noexcept { return eigenvalues.size(); }
};

// Sample covariance (n-1 divisor) of the column-standardized matrix.
Matrix standardized_covariance(const Standardizer& s, const Matrix& m);

PCAModel fit_pca(const Matrix& m);

// Scores on the first k components.
Matrix transform(const PCAModel& model, const Matrix& m, std::size_t k);

// Smallest k whose cumulative explained-variance ratio reaches the threshold.
std::size_t select_components(const PCAModel& model, double cumulative_threshold);

struct FeatureSalience {
    std::size_t feature;
    double score;
};

// score[l] = sum_j ratio[j] * |loading[l][j]|, sorted descending, ties by index.
std::vector<FeatureSalience> feature_salience(const PCAModel& model);

} // namespace cyclonids
