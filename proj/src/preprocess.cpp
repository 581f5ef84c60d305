#include "cyclonids/preprocess.hpp"

#include "cyclonids/errors.hpp"

#include <cmath>

namespace cyclonids {

Standardizer fit_standardizer(const Matrix& m) {
    if (m.rows() < 2) throw DataError(DataErrorKind::too_few_rows, "standardizer needs at least 2 rows");
    const std::size_t n = m.rows();
    const std::size_t p = m.cols();
    Standardizer s;
    s.means.assign(p, 0.0);
    s.stds.assign(p, 0.0);
    s.zero_variance.assign(p, false);

    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) s.means[j] += m(i, j);
    for (auto& v : s.means) v /= static_cast<double>(n);

    // Two-pass variance.
    std::vector<double> ss(p, 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j) {
            const double d = m(i, j) - s.means[j];
            ss[j] += d * d;
        }
    // A constant column can leave rounding residue in ss; test equality directly.
    std::vector<bool> constant(p, true);
    for (std::size_t i = 1; i < n; ++i)
        for (std::size_t j = 0; j < p; ++j)
            if (m(i, j) != m(0, j)) constant[j] = false;
    for (std::size_t j = 0; j < p; ++j) {
        if (constant[j]) s.means[j] = m(0, j);
        const double sd = std::sqrt(ss[j] / static_cast<double>(n - 1));
        if (!constant[j] && sd > 0.0 && std::isfinite(sd)) {
            s.stds[j] = sd;
        } else {
            s.stds[j] = 1.0;
            s.zero_variance[j] = true;
        }
    }
    return s;
}

Matrix transform(const Standardizer& s, const Matrix& m) {
    if (m.cols() != s.size())
        throw DataError(DataErrorKind::dimension_mismatch,
                        "standardizer fitted on " + std::to_string(s.size()) + " columns, got " +
                            std::to_string(m.cols()));
    Matrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            out(i, j) = s.zero_variance[j] ? 0.0 : (m(i, j) - s.means[j]) / s.stds[j];
    return out;
}

} // namespace cyclonids
