#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cyclonids {

// Rows are actual classes, columns are predicted classes.
struct ConfusionMatrix {
    std::vector<std::vector<std::uint64_t>> counts;
    std::vector<std::string> class_names;

    std::size_t classes() const noexcept { return counts.size(); }
    std::uint64_t total() const;
};

ConfusionMatrix confusion_matrix(std::span<const std::size_t> actual, std::span<const std::size_t> predicted,
                                 std::size_t k);

// A ratio whose denominator may be zero; the value is then 0 and `undefined` is set.
struct Ratio {
    double value = 0.0;
    bool undefined = false;
};

struct ClassMetrics {
    std::uint64_t tp = 0, fp = 0, fn = 0, tn = 0;
    Ratio precision;
    Ratio recall;
    Ratio f1;
};

ClassMetrics class_metrics(const ConfusionMatrix& cm, std::size_t c);

// Trace over total.
double accuracy(const ConfusionMatrix& cm);

Ratio f1(double precision, double recall);

struct MacroAverages {
    double precision = 0.0;
    double recall = 0.0;
    double f1 = 0.0;
};

// Unweighted mean over classes; undefined entries count as 0.
MacroAverages macro_aggregate(std::span<const ClassMetrics> per_class);

struct EvaluationReport {
    ConfusionMatrix matrix;
    std::vector<ClassMetrics> per_class;
    double accuracy = 0.0;
    MacroAverages macro;
    double train_seconds = 0.0;
    double predict_seconds = 0.0;
};

EvaluationReport evaluate(std::span<const std::size_t> actual, std::span<const std::size_t> predicted,
                          std::vector<std::string> class_names);

} // namespace cyclonids
