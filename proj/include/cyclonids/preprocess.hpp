#pragma once

#include "cyclonids/matrix.hpp"

#include <vector>

namespace cyclonids {

// Column-wise z-scoring: x = (y - mean) / std, with the sample (n-1) std.
// Constant columns are flagged, store std = 1 and transform to zeros.
struct Standardizer {
    std::vector<double> means;
    std::vector<double> stds;
    std::vector<bool> zero_variance;

    std::size_t size() const noexcept { return means.size(); }

    friend bool operator==(const Standardizer&, const Standardizer&) = default;
};

Standardizer fit_standardizer(const Matrix& m);

Matrix transform(const Standardizer& s, const Matrix& m);

} // namespace cyclonids
