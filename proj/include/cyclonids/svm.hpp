#pragma once

#include "cyclonids/dataset.hpp"
#include "cyclonids/matrix.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace cyclonids {

struct SVMConfig {
    double c = 1.0;
    std::size_t max_epochs = 1000;
    // Training stops once (primal - dual) <= tolerance * max(1, |primal|).
    double tolerance = 1e-6;
    std::uint64_t seed = 42;

    void validate() const;
};

// Soft-margin objective 0.5 * |w|^2 + c * sum_i max(0, 1 - y_i (w.x_i + b)), y_i in {-1, +1}.
double svm_objective(std::span<const double> w, double b, const Matrix& x, std::span<const int> y, double c);

// Bias minimising the objective for a fixed w (exact, by scanning hinge breakpoints).
double optimal_bias(std::span<const double> scores, std::span<const int> y);

struct BinarySVM {
    std::vector<double> w;
    double b = 0.0;
    // Objective of the retained (w, b) after each epoch; never increases.
    std::vector<double> objective_history;
    std::size_t epochs = 0;
    double duality_gap = 0.0;
};

// Binary soft-margin solve by pairwise dual coordinate ascent. The pair
// step keeps sum_i alpha_i y_i = 0, so the bias is not regularised.
BinarySVM train_binary_svm(const Matrix& x, std::span<const int> y, const SVMConfig& cfg);

struct SVMModel {
    // One-vs-rest: row c of `weights` and biases[c] separate class c from the rest.
    Matrix weights;
    std::vector<double> biases;
    std::vector<std::string> class_names;
    std::vector<std::vector<double>> objective_history;

    std::size_t n_features() const noexcept { return weights.cols(); }
};

SVMModel train_svm(const Matrix& x, std::span<const std::size_t> labels, std::vector<std::string> class_names,
                   const SVMConfig& cfg);
SVMModel train_svm(const Dataset& d, const SVMConfig& cfg);

std::vector<double> decision_function(const SVMModel& model, std::span<const double> row);

// Argmax margin; ties go to the lowest class index.
std::vector<std::size_t> predict(const SVMModel& model, const Matrix& m);

} // namespace cyclonids
