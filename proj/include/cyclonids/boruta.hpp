#pragma once

#include "cyclonids/dataset.hpp"
#include "cyclonids/forest.hpp"
#include "cyclonids/rng.hpp"

#include <chrono>
#include <cstdint>
#include <string_view>
#include <vector>

namespace cyclonids {

struct BorutaConfig {
    std::size_t max_iterations = 100;
    double alpha = 0.05;
    ForestConfig forest;
    std::uint64_t seed = 42;
    // Re-verify each iteration that every shadow column is a permutation of its source.
    bool check_shadows = false;

    void validate() const;
};

enum class FeatureDecision { tentative, confirmed, rejected };

std::string_view to_string(FeatureDecision d);

struct BorutaIteration {
    std::vector<double> z;  // one per real feature; NaN for features no longer in the forest
    double max_shadow_z = 0.0;
};

struct BorutaResult {
    std::vector<FeatureDecision> decisions;
    std::vector<BorutaIteration> z_history;
    std::vector<std::size_t> hits;
    std::size_t iterations_used = 0;
    std::chrono::duration<double> elapsed{0};

    std::size_t count(FeatureDecision d) const;
    std::vector<std::size_t> confirmed() const;
};

// Appends one shadow column per input column; shadow j is an independent
// row permutation of column j.
Matrix augment_with_shadows(const Matrix& m, Rng& rng);

// Per column: mean over trees / sample std over trees. A zero std gives
// +infinity for a nonzero mean and 0 for a zero mean.
std::vector<double> z_scores(const Matrix& per_tree_importances);

// Two-sided exact binomial test of `hits` successes in `trials` at p = 1/2.
double binomial_two_sided_p(std::size_t hits, std::size_t trials);

BorutaResult run_boruta(const Dataset& d, const BorutaConfig& cfg);

} // namespace cyclonids
