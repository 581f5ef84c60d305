#pragma once

#include "cyclonids/dataset.hpp"
#include "cyclonids/matrix.hpp"

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace cyclonids {

struct ForestConfig {
    std::size_t n_trees = 100;
    std::size_t max_depth = 0;  // 0 = unlimited
    std::size_t min_samples_split = 2;
    std::size_t mtry = 0;  // 0 = ceil(sqrt(p))
    std::uint64_t seed = 42;
    std::size_t threads = 0;  // 0 = hardware concurrency; results do not depend on it

    void validate() const;
    std::size_t features_per_split(std::size_t p) const;
};

struct TreeNode {
    std::int32_t feature = -1;  // -1 marks a leaf
    double threshold = 0.0;     // rows with value <= threshold go left
    std::uint32_t left = 0;
    std::uint32_t right = 0;
    std::uint32_t samples = 0;
    std::vector<std::uint32_t> class_counts;  // leaves only

    bool is_leaf() const noexcept { return feature < 0; }
};

class DecisionTree {
public:
    // Grows one CART tree on a bootstrap sample of (x, labels) drawn from `seed`.
    static DecisionTree train(const Matrix& x, std::span<const std::size_t> labels, std::size_t n_classes,
                              const ForestConfig& cfg, std::uint64_t seed);

    std::size_t predict(std::span<const double> row) const;

    const std::vector<TreeNode>& nodes() const noexcept { return nodes_; }
    // Sum over split nodes of (node samples / bootstrap size) * Gini decrease.
    const std::vector<double>& importance() const noexcept { return importance_; }
    // Training rows never drawn into this tree's bootstrap sample.
    std::size_t out_of_bag() const noexcept { return out_of_bag_; }

    static DecisionTree from_parts(std::vector<TreeNode> nodes, std::vector<double> importance,
                                   std::size_t out_of_bag);

private:
    std::vector<TreeNode> nodes_;  // preorder; root at 0, left child at index + 1
    std::vector<double> importance_;
    std::size_t out_of_bag_ = 0;
};

struct ForestModel {
    std::vector<DecisionTree> trees;
    std::vector<double> normalized_importance;
    std::vector<std::string> class_names;
    std::size_t n_features = 0;
    // Set when every training label was identical: trees are single leaves.
    bool degenerate = false;

    // T x p matrix of raw per-tree importances.
    Matrix per_tree_importance() const;
};

ForestModel train_forest(const Matrix& x, std::span<const std::size_t> labels,
                         std::vector<std::string> class_names, const ForestConfig& cfg);
ForestModel train_forest(const Dataset& d, const ForestConfig& cfg);

// Plurality vote over trees; ties go to the lowest class index.
std::vector<std::size_t> predict(const ForestModel& model, const Matrix& m);

// Per-tree importances averaged over trees, then scaled to sum 1 (all zeros if no split happened).
const std::vector<double>& feature_importance(const ForestModel& model);

// Text format, one record per line:
//   cyclonids-forest 1
//   features <p>
//   classes <k> <name_0> ... <name_k-1>
//   degenerate <0|1>
//   importance <p reals>
//   trees <T>
//   tree <t> nodes <m> oob <count>
//   tree-importance <p reals>
//   then m node lines in preorder, each either
//     S <feature> <threshold> <samples>      (left subtree follows, then right)
//     L <samples> <count_0> ... <count_k-1>
// Reals use %.17g so a parse/serialize round trip is exact.
std::string serialize(const ForestModel& model);
ForestModel parse_forest(std::string_view text);

} // namespace cyclonids
