#include "cyclonids/metrics.hpp"

#include "cyclonids/errors.hpp"

namespace cyclonids {

std::uint64_t ConfusionMatrix::total() const {
    std::uint64_t t = 0;
    for (const auto& row : counts)
        for (auto v : row) t += v;
    return t;
}

ConfusionMatrix confusion_matrix(std::span<const std::size_t> actual, std::span<const std::size_t> predicted,
                                 std::size_t k) {
    if (actual.size() != predicted.size())
        throw DataError(DataErrorKind::dimension_mismatch, "confusion matrix: actual and predicted lengths differ");
    if (actual.empty()) throw DataError(DataErrorKind::empty_dataset, "confusion matrix: no rows");
    ConfusionMatrix cm;
    cm.counts.assign(k, std::vector<std::uint64_t>(k, 0));
    for (std::size_t i = 0; i < actual.size(); ++i) {
        if (actual[i] >= k || predicted[i] >= k)
            throw DataError(DataErrorKind::unknown_label, "confusion matrix: class index out of range");
        ++cm.counts[actual[i]][predicted[i]];
    }
    for (std::size_t c = 0; c < k; ++c) cm.class_names.push_back("c" + std::to_string(c));
    return cm;
}

namespace {

Ratio ratio(std::uint64_t num, std::uint64_t den) {
    if (den == 0) return {0.0, true};
    return {static_cast<double>(num) / static_cast<double>(den), false};
}

} // namespace

Ratio f1(double precision, double recall) {
    const double s = precision + recall;
    if (s == 0.0) return {0.0, true};
    return {2.0 * precision * recall / s, false};
}

ClassMetrics class_metrics(const ConfusionMatrix& cm, std::size_t c) {
    const std::size_t k = cm.classes();
    if (c >= k) throw DataError(DataErrorKind::unknown_label, "class_metrics: class index out of range");
    ClassMetrics m;
    std::uint64_t row = 0, col = 0;
    for (std::size_t j = 0; j < k; ++j) {
        row += cm.counts[c][j];
        col += cm.counts[j][c];
    }
    m.tp = cm.counts[c][c];
    m.fp = col - m.tp;
    m.fn = row - m.tp;
    m.tn = cm.total() - m.tp - m.fp - m.fn;
    m.precision = ratio(m.tp, m.tp + m.fp);
    m.recall = ratio(m.tp, m.tp + m.fn);
    m.f1 = f1(m.precision.value, m.recall.value);
    return m;
}

double accuracy(const ConfusionMatrix& cm) {
    const auto total = cm.total();
    if (total == 0) throw DataError(DataErrorKind::empty_dataset, "accuracy: empty confusion matrix");
    std::uint64_t trace = 0;
    for (std::size_t c = 0; c < cm.classes(); ++c) trace += cm.counts[c][c];
    return static_cast<double>(trace) / static_cast<double>(total);
}

MacroAverages macro_aggregate(std::span<const ClassMetrics> per_class) {
    MacroAverages m;
    if (per_class.empty()) return m;
    for (const auto& c : per_class) {
        m.precision += c.precision.value;
        m.recall += c.recall.value;
        m.f1 += c.f1.value;
    }
    const double k = static_cast<double>(per_class.size());
    m.precision /= k;
    m.recall /= k;
    m.f1 /= k;
    return m;
}

EvaluationReport evaluate(std::span<const std::size_t> actual, std::span<const std::size_t> predicted,
                          std::vector<std::string> class_names) {
    EvaluationReport r;
    r.matrix = confusion_matrix(actual, predicted, class_names.size());
    r.matrix.class_names = std::move(class_names);
    for (std::size_t c = 0; c < r.matrix.classes(); ++c) r.per_class.push_back(class_metrics(r.matrix, c));
    r.accuracy = accuracy(r.matrix);
    r.macro = macro_aggregate(r.per_class);
    return r;
}

} // namespace cyclonids
