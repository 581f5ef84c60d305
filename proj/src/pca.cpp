#include "cyclonids/pca.hpp"

#include "cyclonids/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace cyclonids {

namespace {

constexpr double kClampNegative = 1e-10;
constexpr int kMaxSweeps = 100;

} // namespace

SymmetricEigen eigen_symmetric(const Matrix& input) {
    const std::size_t p = input.rows();
    if (input.cols() != p) throw NumericError("eigen_symmetric: matrix is not square");
    Matrix a = input;
    Matrix v(p, p, 0.0);
    for (std::size_t i = 0; i < p; ++i) v(i, i) = 1.0;

    double scale = 0.0;
    for (double x : a.data()) scale = std::max(scale, std::abs(x));

    for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < p; ++i)
            for (std::size_t j = i + 1; j < p; ++j) off += a(i, j) * a(i, j);
        if (off == 0.0 || std::sqrt(off) <= 1e-15 * scale) break;

        for (std::size_t q = 0; q < p; ++q) {
            for (std::size_t r = q + 1; r < p; ++r) {
                const double apq = a(q, r);
                if (apq == 0.0) continue;
                // Rotation angle that annihilates a(q, r).
                const double theta = (a(r, r) - a(q, q)) / (2.0 * apq);
                const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t k = 0; k < p; ++k) {
                    const double akq = a(k, q);
                    const double akr = a(k, r);
                    a(k, q) = c * akq - s * akr;
                    a(k, r) = s * akq + c * akr;
                }
                for (std::size_t k = 0; k < p; ++k) {
                    const double aqk = a(q, k);
                    const double ark = a(r, k);
                    a(q, k) = c * aqk - s * ark;
                    a(r, k) = s * aqk + c * ark;
                }
                a(q, r) = 0.0;
                a(r, q) = 0.0;
                for (std::size_t k = 0; k < p; ++k) {
                    const double vkq = v(k, q);
                    const double vkr = v(k, r);
                    v(k, q) = c * vkq - s * vkr;
                    v(k, r) = s * vkq + c * vkr;
                }
            }
        }
    }

    std::vector<std::size_t> order(p);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

    SymmetricEigen out;
    out.values.resize(p);
    out.vectors = Matrix(p, p);
    for (std::size_t j = 0; j < p; ++j) {
        const std::size_t src = order[j];
        out.values[j] = a(src, src);
        std::size_t arg = 0;
        for (std::size_t i = 1; i < p; ++i)
            if (std::abs(v(i, src)) > std::abs(v(arg, src))) arg = i;
        const double sign = v(arg, src) < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < p; ++i) out.vectors(i, j) = sign * v(i, src);
    }
    return out;
}

Matrix standardized_covariance(const Standardizer& s, const Matrix& m) {
    const Matrix z = transform(s, m);
    const std::size_t n = z.rows();
    const std::size_t p = z.cols();
    Matrix cov(p, p, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto r = z.row(i);
        for (std::size_t a = 0; a < p; ++a)
            for (std::size_t b = a; b < p; ++b) cov(a, b) += r[a] * r[b];
    }
    for (std::size_t a = 0; a < p; ++a)
        for (std::size_t b = a; b < p; ++b) {
            cov(a, b) /= static_cast<double>(n - 1);
            cov(b, a) = cov(a, b);
        }
    return cov;
}

PCAModel fit_pca(const Matrix& m) {
    if (m.rows() < 2) throw DataError(DataErrorKind::too_few_rows, "PCA needs at least 2 rows");
    if (m.cols() < 1) throw DataError(DataErrorKind::empty_dataset, "PCA needs at least one column");
    PCAModel model;
    model.standardizer = fit_standardizer(m);
    const Matrix cov = standardized_covariance(model.standardizer, m);
    auto eig = eigen_symmetric(cov);
    for (auto& ev : eig.values) {
        if (ev < 0.0 && ev < -kClampNegative)
            throw NumericError("covariance has a negative eigenvalue " + std::to_string(ev));
        ev = std::max(ev, 0.0);
    }
    model.loadings = std::move(eig.vectors);
    model.eigenvalues = std::move(eig.values);
    const std::size_t p = model.eigenvalues.size();
    const double total = std::accumulate(model.eigenvalues.begin(), model.eigenvalues.end(), 0.0);
    model.explained_variance_ratio.resize(p);
    for (std::size_t j = 0; j < p; ++j)
        model.explained_variance_ratio[j] =
            total > 0.0 ? model.eigenvalues[j] / total : 1.0 / static_cast<double>(p);
    return model;
}

Matrix transform(const PCAModel& model, const Matrix& m, std::size_t k) {
    const std::size_t p = model.dimension();
    if (m.cols() != p)
        throw DataError(DataErrorKind::dimension_mismatch,
                        "PCA fitted on " + std::to_string(p) + " columns, got " + std::to_string(m.cols()));
    if (k < 1 || k > p) throw ConfigError("PCA component count must lie in [1, " + std::to_string(p) + "]");
    const Matrix z = transform(model.standardizer, m);
    Matrix scores(z.rows(), k, 0.0);
    for (std::size_t i = 0; i < z.rows(); ++i)
        for (std::size_t j = 0; j < k; ++j) {
            double s = 0.0;
            for (std::size_t l = 0; l < p; ++l) s += z(i, l) * model.loadings(l, j);
            scores(i, j) = s;
        }
    return scores;
}

std::size_t select_components(const PCAModel& model, double cumulative_threshold) {
    if (!(cumulative_threshold > 0.0 && cumulative_threshold <= 1.0))
        throw ConfigError("PCA threshold must lie in (0, 1]");
    const auto& r = model.explained_variance_ratio;
    double cum = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) {
        cum += r[j];
        // Slack absorbs rounding in the cumulative sum so a threshold of 1 stops
        // at the last component with a nonzero ratio.
        if (cum >= cumulative_threshold - 1e-12) return j + 1;
    }
    return r.size();
}

std::vector<FeatureSalience> feature_salience(const PCAModel& model) {
    const std::size_t p = model.dimension();
    std::vector<FeatureSalience> out(p);
    for (std::size_t l = 0; l < p; ++l) {
        double s = 0.0;
        for (std::size_t j = 0; j < p; ++j) s += model.explained_variance_ratio[j] * std::abs(model.loadings(l, j));
        out[l] = {l, s};
    }
    // Scores lie in [0, 1]; rounding the sort key to 1e-12 lets symmetric columns tie by index.
    auto key = [](double v) { return std::round(v * 1e12); };
    std::stable_sort(out.begin(), out.end(), [&](const auto& a, const auto& b) { return key(a.score) > key(b.score); });
    return out;
}

} // namespace cyclonids
