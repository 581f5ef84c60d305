#include "cyclonids/svm.hpp"

#include "cyclonids/errors.hpp"
#include "cyclonids/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace cyclonids {

void SVMConfig::validate() const {
    if (!(c > 0.0) || !std::isfinite(c)) throw ConfigError("svm: c must be a positive finite number");
    if (max_epochs < 1) throw ConfigError("svm: max_epochs must be >= 1");
    if (!(tolerance > 0.0)) throw ConfigError("svm: tolerance must be positive");
}

double svm_objective(std::span<const double> w, double b, const Matrix& x, std::span<const int> y, double c) {
    double hinge = 0.0;
    for (std::size_t i = 0; i < x.rows(); ++i)
        hinge += std::max(0.0, 1.0 - y[i] * (dot(w, x.row(i)) + b));
    return 0.5 * dot(w, w) + c * hinge;
}

double optimal_bias(std::span<const double> scores, std::span<const int> y) {
    // Term i is active for b < 1 - s_i (y = +1) or b > -1 - s_i (y = -1); both
    // breakpoints are y_i - s_i and each raises the slope by one.
    const std::size_t n = scores.size();
    std::vector<double> bp(n);
    long slope = 0;
    for (std::size_t i = 0; i < n; ++i) {
        bp[i] = y[i] - scores[i];
        if (y[i] > 0) --slope;
    }
    if (slope == 0) {
        // No positives: any b <= min breakpoint is optimal.
        return n == 0 ? 0.0 : *std::min_element(bp.begin(), bp.end()) - 1.0;
    }
    std::sort(bp.begin(), bp.end());
    for (std::size_t i = 0; i < n; ++i) {
        ++slope;
        if (slope > 0) return bp[i];
        if (slope == 0) return i + 1 < n ? 0.5 * (bp[i] + bp[i + 1]) : bp[i] + 1.0;
    }
    return bp.back();
}

namespace {

constexpr std::size_t kPartnerCandidates = 8;

class PairSolver {
public:
    PairSolver(const Matrix& x, std::span<const int> y, const SVMConfig& cfg)
        : x_(x), y_(y), c_(cfg.c), alpha_(x.rows(), 0.0), w_(x.cols(), 0.0) {}

    bool in_up(std::size_t i) const { return y_[i] > 0 ? alpha_[i] < c_ : alpha_[i] > 0.0; }
    bool in_low(std::size_t i) const { return y_[i] > 0 ? alpha_[i] > 0.0 : alpha_[i] < c_; }
    double f(std::size_t i) const { return dot(w_, x_.row(i)) - y_[i]; }

    void recompute_w() {
        std::fill(w_.begin(), w_.end(), 0.0);
        for (std::size_t i = 0; i < x_.rows(); ++i) {
            if (alpha_[i] == 0.0) continue;
            const double a = alpha_[i] * y_[i];
            const auto r = x_.row(i);
            for (std::size_t j = 0; j < w_.size(); ++j) w_[j] += a * r[j];
        }
    }

    double dual() const { return std::accumulate(alpha_.begin(), alpha_.end(), 0.0) - 0.5 * dot(w_, w_); }

    // Ascent step along alpha_i += y_i t, alpha_j -= y_j t; returns whether anything moved.
    bool step(std::size_t i, std::size_t j, double fi, double fj) {
        const auto xi = x_.row(i);
        const auto xj = x_.row(j);
        double eta = 0.0;
        for (std::size_t k = 0; k < xi.size(); ++k) eta += (xi[k] - xj[k]) * (xi[k] - xj[k]);
        eta = std::max(eta, 1e-12);
        const double room_i = y_[i] > 0 ? c_ - alpha_[i] : alpha_[i];
        const double room_j = y_[j] > 0 ? alpha_[j] : c_ - alpha_[j];
        const double t = std::min({(fj - fi) / eta, room_i, room_j});
        if (!(t > 0.0)) return false;
        alpha_[i] = t == room_i ? (y_[i] > 0 ? c_ : 0.0) : alpha_[i] + y_[i] * t;
        alpha_[j] = t == room_j ? (y_[j] > 0 ? 0.0 : c_) : alpha_[j] - y_[j] * t;
        for (std::size_t k = 0; k < w_.size(); ++k) w_[k] += t * (xi[k] - xj[k]);
        return true;
    }

    const std::vector<double>& w() const { return w_; }

private:
    const Matrix& x_;
    std::span<const int> y_;
    double c_;
    std::vector<double> alpha_;
    std::vector<double> w_;
};

} // namespace

BinarySVM train_binary_svm(const Matrix& x, std::span<const int> y, const SVMConfig& cfg) {
    cfg.validate();
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();
    if (y.size() != n) throw DataError(DataErrorKind::dimension_mismatch, "svm: label count mismatch");
    BinarySVM out;
    out.w.assign(p, 0.0);
    const bool has_pos = std::any_of(y.begin(), y.end(), [](int v) { return v > 0; });
    const bool has_neg = std::any_of(y.begin(), y.end(), [](int v) { return v < 0; });
    if (!has_pos || !has_neg) {
        // One-sided problem: w = 0 with the bias on the populated side.
        out.b = has_pos ? 1.0 : -1.0;
        out.objective_history.push_back(0.0);
        return out;
    }

    PairSolver solver(x, y, cfg);
    Rng rng(cfg.seed);
    std::vector<double> scores(n);
    std::vector<double> fs(n);
    double best = std::numeric_limits<double>::infinity();

    for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
        solver.recompute_w();
        for (std::size_t i = 0; i < n; ++i) fs[i] = solver.f(i);

        // Checkpoint: exact bias for the current w, keep the better (w, b).
        for (std::size_t i = 0; i < n; ++i) scores[i] = fs[i] + y[i];
        const double b = optimal_bias(scores, y);
        const double primal = svm_objective(solver.w(), b, x, y, cfg.c);
        if (primal < best) {
            best = primal;
            out.w = solver.w();
            out.b = b;
        }
        out.objective_history.push_back(best);
        out.epochs = epoch;
        out.duality_gap = best - solver.dual();
        if (out.duality_gap <= cfg.tolerance * std::max(1.0, std::abs(best))) break;

        // Partner candidates: the most violating members of each index set.
        std::vector<std::size_t> up, low;
        for (std::size_t i = 0; i < n; ++i) {
            if (solver.in_up(i)) up.push_back(i);
            if (solver.in_low(i)) low.push_back(i);
        }
        const auto take = [&](std::vector<std::size_t>& v, auto better) {
            const auto m = std::min(kPartnerCandidates, v.size());
            std::partial_sort(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(m), v.end(), better);
            v.resize(m);
        };
        take(up, [&](std::size_t a, std::size_t b2) { return fs[a] < fs[b2] || (fs[a] == fs[b2] && a < b2); });
        take(low, [&](std::size_t a, std::size_t b2) { return fs[a] > fs[b2] || (fs[a] == fs[b2] && a < b2); });
        if (up.empty() || low.empty() || fs[low.front()] - fs[up.front()] <= 1e-12) break;

        bool moved = false;
        for (const std::size_t k : rng.permutation(n)) {
            const double fk = solver.f(k);
            if (solver.in_up(k)) {
                for (const std::size_t j : low) {
                    if (j == k || !solver.in_low(j)) continue;
                    const double fj = solver.f(j);
                    if (fj - fk > 1e-12 && solver.step(k, j, fk, fj)) {
                        moved = true;
                        break;
                    }
                }
            } else if (solver.in_low(k)) {
                for (const std::size_t i : up) {
                    if (i == k || !solver.in_up(i)) continue;
                    const double fi = solver.f(i);
                    if (fk - fi > 1e-12 && solver.step(i, k, fi, fk)) {
                        moved = true;
                        break;
                    }
                }
            }
        }
        if (!moved) break;
    }
    return out;
}

SVMModel train_svm(const Matrix& x, std::span<const std::size_t> labels, std::vector<std::string> class_names,
                   const SVMConfig& cfg) {
    cfg.validate();
    if (x.rows() == 0 || x.cols() == 0) throw DataError(DataErrorKind::empty_dataset, "svm: empty training set");
    if (labels.size() != x.rows()) throw DataError(DataErrorKind::dimension_mismatch, "svm: label count mismatch");
    for (double v : x.data())
        if (!std::isfinite(v)) throw DataError(DataErrorKind::non_finite, "svm: non-finite feature value");
    const std::size_t k = class_names.size();
    std::vector<std::size_t> present(k, 0);
    for (auto l : labels) {
        if (l >= k) throw DataError(DataErrorKind::unknown_label, "svm: label index out of range");
        ++present[l];
    }
    if (std::count_if(present.begin(), present.end(), [](auto c) { return c > 0; }) < 2)
        throw DataError(DataErrorKind::single_class, "svm: training data contains a single class");

    SVMModel model;
    model.class_names = std::move(class_names);
    model.weights = Matrix(k, x.cols(), 0.0);
    model.biases.assign(k, 0.0);
    model.objective_history.resize(k);
    std::vector<int> y(x.rows());
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t i = 0; i < x.rows(); ++i) y[i] = labels[i] == c ? 1 : -1;
        SVMConfig ccfg = cfg;
        ccfg.seed = cfg.seed ^ static_cast<std::uint64_t>(c);
        auto bin = train_binary_svm(x, y, ccfg);
        std::copy(bin.w.begin(), bin.w.end(), model.weights.row(c).begin());
        model.biases[c] = bin.b;
        model.objective_history[c] = std::move(bin.objective_history);
    }
    return model;
}

SVMModel train_svm(const Dataset& d, const SVMConfig& cfg) {
    return train_svm(d.features, d.labels, d.class_names, cfg);
}

std::vector<double> decision_function(const SVMModel& model, std::span<const double> row) {
    if (row.size() != model.n_features())
        throw DataError(DataErrorKind::dimension_mismatch,
                        "svm trained on " + std::to_string(model.n_features()) + " features, got " +
                            std::to_string(row.size()));
    std::vector<double> margins(model.biases.size());
    for (std::size_t c = 0; c < margins.size(); ++c) margins[c] = dot(model.weights.row(c), row) + model.biases[c];
    return margins;
}

std::vector<std::size_t> predict(const SVMModel& model, const Matrix& m) {
    if (m.cols() != model.n_features())
        throw DataError(DataErrorKind::dimension_mismatch,
                        "svm trained on " + std::to_string(model.n_features()) + " features, got " +
                            std::to_string(m.cols()));
    std::vector<std::size_t> out(m.rows());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto margins = decision_function(model, m.row(i));
        out[i] = static_cast<std::size_t>(std::max_element(margins.begin(), margins.end()) - margins.begin());
    }
    return out;
}

} // namespace cyclonids
