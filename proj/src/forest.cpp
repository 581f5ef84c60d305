#include "cyclonids/forest.hpp"

#include "cyclonids/errors.hpp"
#include "cyclonids/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <sstream>
#include <thread>

namespace cyclonids {

void ForestConfig::validate() const {
    if (n_trees < 1) throw ConfigError("forest: n_trees must be >= 1");
    if (min_samples_split < 2) throw ConfigError("forest: min_samples_split must be >= 2");
}

std::size_t ForestConfig::features_per_split(std::size_t p) const {
    if (mtry > 0) return std::min(mtry, p);
    auto m = static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(p))));
    return std::clamp<std::size_t>(m, 1, p);
}

namespace {

struct Split {
    std::int32_t feature = -1;
    double threshold = 0.0;
    double decrease = -1.0;
};

struct Task {
    std::size_t begin;
    std::size_t end;
    std::size_t depth;
    std::uint32_t parent;
    bool is_right;
};

class TreeBuilder {
public:
    TreeBuilder(const Matrix& x, std::span<const std::size_t> labels, std::size_t n_classes,
                const ForestConfig& cfg, std::uint64_t seed)
        : x_(x), labels_(labels), k_(n_classes), cfg_(cfg), rng_(seed), importance_(x.cols(), 0.0) {}

    DecisionTree build() {
        const std::size_t n = x_.rows();
        std::vector<std::uint8_t> drawn(n, 0);
        rows_.resize(n);
        for (auto& r : rows_) {
            r = static_cast<std::uint32_t>(rng_.index(n));
            drawn[r] = 1;
        }
        std::size_t oob = 0;
        for (auto d : drawn) oob += d == 0;
        n_root_ = static_cast<double>(n);

        feature_order_.resize(x_.cols());
        buffer_.reserve(n);

        std::vector<Task> stack;
        stack.push_back({0, n, 0, 0, false});
        while (!stack.empty()) {
            const Task t = stack.back();
            stack.pop_back();
            const auto idx = static_cast<std::uint32_t>(nodes_.size());
            nodes_.emplace_back();
            if (t.is_right) nodes_[t.parent].right = idx;
            else if (idx != 0) nodes_[t.parent].left = idx;

            std::vector<std::uint32_t> counts(k_, 0);
            for (std::size_t i = t.begin; i < t.end; ++i) ++counts[labels_[rows_[i]]];
            const std::size_t m = t.end - t.begin;
            nodes_[idx].samples = static_cast<std::uint32_t>(m);

            const bool pure = std::count_if(counts.begin(), counts.end(), [](auto c) { return c > 0; }) <= 1;
            const bool too_small = m < cfg_.min_samples_split;
            const bool too_deep = cfg_.max_depth > 0 && t.depth >= cfg_.max_depth;
            Split best;
            if (!pure && !too_small && !too_deep) best = find_split(t.begin, t.end, counts);
            if (best.feature < 0) {
                nodes_[idx].class_counts = std::move(counts);
                continue;
            }

            importance_[static_cast<std::size_t>(best.feature)] +=
                static_cast<double>(m) / n_root_ * std::max(best.decrease, 0.0);
            nodes_[idx].feature = best.feature;
            nodes_[idx].threshold = best.threshold;
            const auto f = static_cast<std::size_t>(best.feature);
            const auto mid_it = std::partition(rows_.begin() + static_cast<std::ptrdiff_t>(t.begin),
                                               rows_.begin() + static_cast<std::ptrdiff_t>(t.end),
                                               [&](std::uint32_t r) { return x_(r, f) <= best.threshold; });
            const auto mid = static_cast<std::size_t>(mid_it - rows_.begin());
            // Right pushed first so the left subtree is emitted next (preorder).
            stack.push_back({mid, t.end, t.depth + 1, idx, true});
            stack.push_back({t.begin, mid, t.depth + 1, idx, false});
        }
        return DecisionTree::from_parts(std::move(nodes_), std::move(importance_), oob);
    }

private:
    Split find_split(std::size_t begin, std::size_t end, const std::vector<std::uint32_t>& counts) {
        const std::size_t p = x_.cols();
        const std::size_t mtry = cfg_.features_per_split(p);
        for (std::size_t j = 0; j < p; ++j) feature_order_[j] = j;

        const double m = static_cast<double>(end - begin);
        double sq_node = 0.0;
        for (auto c : counts) sq_node += static_cast<double>(c) * c;
        const double parent_term = sq_node / (m * m);

        Split best;
        std::size_t drawn = 0;
        // Draw mtry features; if none of them can split the node, keep drawing.
        while (drawn < p) {
            const std::size_t batch_end = drawn == 0 ? mtry : drawn + 1;
            for (std::size_t j = drawn; j < batch_end; ++j) {
                const std::size_t pick = j + static_cast<std::size_t>(rng_.index(p - j));
                std::swap(feature_order_[j], feature_order_[pick]);
            }
            std::sort(feature_order_.begin() + static_cast<std::ptrdiff_t>(drawn),
                      feature_order_.begin() + static_cast<std::ptrdiff_t>(batch_end));
            for (std::size_t j = drawn; j < batch_end; ++j)
                evaluate_feature(feature_order_[j], begin, end, counts, parent_term, best);
            drawn = batch_end;
            if (best.feature >= 0) break;
        }
        return best;
    }

    void evaluate_feature(std::size_t f, std::size_t begin, std::size_t end, const std::vector<std::uint32_t>& counts,
                          double parent_term, Split& best) {
        buffer_.clear();
        for (std::size_t i = begin; i < end; ++i) {
            const auto r = rows_[i];
            buffer_.emplace_back(x_(r, f), static_cast<std::uint32_t>(labels_[r]));
        }
        std::sort(buffer_.begin(), buffer_.end());
        if (buffer_.front().first == buffer_.back().first) return;

        const std::size_t m = buffer_.size();
        const double md = static_cast<double>(m);
        left_.assign(k_, 0);
        double sq_left = 0.0;
        double sq_right = 0.0;
        for (auto c : counts) sq_right += static_cast<double>(c) * c;

        for (std::size_t i = 0; i + 1 < m; ++i) {
            const auto c = buffer_[i].second;
            const double lc = left_[c];
            const double rc = static_cast<double>(counts[c]) - lc;
            sq_left += 2.0 * lc + 1.0;
            sq_right -= 2.0 * rc - 1.0;
            ++left_[c];
            const double a = buffer_[i].first;
            const double b = buffer_[i + 1].first;
            if (a == b) continue;
            const double nl = static_cast<double>(i + 1);
            const double nr = md - nl;
            const double decrease = (sq_left / nl + sq_right / nr) / md - parent_term;
            // Strict comparison keeps the lowest feature, then the lowest threshold.
            if (decrease > best.decrease) {
                double thr = a + (b - a) / 2.0;
                if (!(thr < b)) thr = a;
                best.feature = static_cast<std::int32_t>(f);
                best.threshold = thr;
                best.decrease = decrease;
            }
        }
    }

    const Matrix& x_;
    std::span<const std::size_t> labels_;
    std::size_t k_;
    const ForestConfig& cfg_;
    Rng rng_;
    std::vector<double> importance_;
    std::vector<TreeNode> nodes_;
    std::vector<std::uint32_t> rows_;
    std::vector<std::size_t> feature_order_;
    std::vector<std::pair<double, std::uint32_t>> buffer_;
    std::vector<std::uint32_t> left_;
    double n_root_ = 1.0;
};

std::size_t majority(const std::vector<std::uint32_t>& counts) {
    std::size_t best = 0;
    for (std::size_t c = 1; c < counts.size(); ++c)
        if (counts[c] > counts[best]) best = c;
    return best;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

DecisionTree DecisionTree::train(const Matrix& x, std::span<const std::size_t> labels, std::size_t n_classes,
                                 const ForestConfig& cfg, std::uint64_t seed) {
    return TreeBuilder(x, labels, n_classes, cfg, seed).build();
}

DecisionTree DecisionTree::from_parts(std::vector<TreeNode> nodes, std::vector<double> importance,
                                      std::size_t out_of_bag) {
    DecisionTree t;
    t.nodes_ = std::move(nodes);
    t.importance_ = std::move(importance);
    t.out_of_bag_ = out_of_bag;
    return t;
}

std::size_t DecisionTree::predict(std::span<const double> row) const {
    std::size_t i = 0;
    while (!nodes_[i].is_leaf()) {
        const auto& n = nodes_[i];
        i = row[static_cast<std::size_t>(n.feature)] <= n.threshold ? n.left : n.right;
    }
    return majority(nodes_[i].class_counts);
}

Matrix ForestModel::per_tree_importance() const {
    Matrix out(trees.size(), n_features, 0.0);
    for (std::size_t t = 0; t < trees.size(); ++t)
        for (std::size_t j = 0; j < n_features; ++j) out(t, j) = trees[t].importance()[j];
    return out;
}

ForestModel train_forest(const Matrix& x, std::span<const std::size_t> labels,
                         std::vector<std::string> class_names, const ForestConfig& cfg) {
    cfg.validate();
    if (x.rows() == 0 || x.cols() == 0) throw DataError(DataErrorKind::empty_dataset, "forest: empty training set");
    if (labels.size() != x.rows()) throw DataError(DataErrorKind::dimension_mismatch, "forest: label count mismatch");
    if (x.rows() < cfg.min_samples_split)
        throw DataError(DataErrorKind::too_few_rows, "forest: fewer rows than min_samples_split");
    const std::size_t k = class_names.size();
    for (auto l : labels)
        if (l >= k) throw DataError(DataErrorKind::unknown_label, "forest: label index out of range");

    ForestModel model;
    model.class_names = std::move(class_names);
    model.n_features = x.cols();
    model.trees.resize(cfg.n_trees);

    std::size_t workers = cfg.threads > 0 ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
    workers = std::min(workers, cfg.n_trees);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto work = [&] {
        try {
            for (std::size_t t = next++; t < cfg.n_trees; t = next++)
                model.trees[t] = DecisionTree::train(x, labels, k, cfg, cfg.seed ^ static_cast<std::uint64_t>(t));
        } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    };
    if (workers <= 1) {
        work();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    }
    if (failure) std::rethrow_exception(failure);

    model.normalized_importance.assign(model.n_features, 0.0);
    for (const auto& t : model.trees)
        for (std::size_t j = 0; j < model.n_features; ++j) model.normalized_importance[j] += t.importance()[j];
    double total = 0.0;
    for (auto& v : model.normalized_importance) {
        v /= static_cast<double>(model.trees.size());
        total += v;
    }
    if (total > 0.0)
        for (auto& v : model.normalized_importance) v /= total;

    const auto first = labels.front();
    model.degenerate = std::all_of(labels.begin(), labels.end(), [&](auto l) { return l == first; });
    return model;
}

ForestModel train_forest(const Dataset& d, const ForestConfig& cfg) {
    return train_forest(d.features, d.labels, d.class_names, cfg);
}

std::vector<std::size_t> predict(const ForestModel& model, const Matrix& m) {
    if (m.cols() != model.n_features)
        throw DataError(DataErrorKind::dimension_mismatch,
                        "forest trained on " + std::to_string(model.n_features) + " features, got " +
                            std::to_string(m.cols()));
    const std::size_t k = model.class_names.size();
    std::vector<std::size_t> out(m.rows());
    std::vector<std::uint32_t> votes(k);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        std::fill(votes.begin(), votes.end(), 0);
        const auto row = m.row(i);
        for (const auto& t : model.trees) ++votes[t.predict(row)];
        out[i] = majority(votes);
    }
    return out;
}

const std::vector<double>& feature_importance(const ForestModel& model) { return model.normalized_importance; }

std::string serialize(const ForestModel& model) {
    std::string s = "cyclonids-forest 1\n";
    s += "features " + std::to_string(model.n_features) + "\n";
    s += "classes " + std::to_string(model.class_names.size());
    for (const auto& c : model.class_names) {
        if (c.empty() || c.find_first_of(" \t\n") != std::string::npos)
            throw ConfigError("forest: class name '" + c + "' cannot be serialized");
        s += ' ' + c;
    }
    s += "\ndegenerate " + std::string(model.degenerate ? "1" : "0") + "\n";
    auto reals = [&](const char* tag, const std::vector<double>& v) {
        s += tag;
        for (double x : v) s += ' ' + format_double(x);
        s += '\n';
    };
    reals("importance", model.normalized_importance);
    s += "trees " + std::to_string(model.trees.size()) + "\n";
    for (std::size_t t = 0; t < model.trees.size(); ++t) {
        const auto& tree = model.trees[t];
        s += "tree " + std::to_string(t) + " nodes " + std::to_string(tree.nodes().size()) + " oob " +
             std::to_string(tree.out_of_bag()) + "\n";
        reals("tree-importance", tree.importance());
        for (const auto& n : tree.nodes()) {
            if (n.is_leaf()) {
                s += "L " + std::to_string(n.samples);
                for (auto c : n.class_counts) s += ' ' + std::to_string(c);
            } else {
                s += "S " + std::to_string(n.feature) + ' ' + format_double(n.threshold) + ' ' +
                     std::to_string(n.samples);
            }
            s += '\n';
        }
    }
    return s;
}

namespace {

class ForestReader {
public:
    explicit ForestReader(std::string_view text) : in_(std::string(text)) {}

    void expect(std::string_view word) {
        std::string w;
        if (!(in_ >> w) || w != word) fail("expected '" + std::string(word) + "'");
    }
    template <class T>
    T read() {
        T v{};
        if (!(in_ >> v)) fail("malformed value");
        return v;
    }
    double read_real() {
        std::string w = read<std::string>();
        try {
            std::size_t used = 0;
            const double v = std::stod(w, &used);
            if (used != w.size()) fail("malformed real '" + w + "'");
            return v;
        } catch (const std::logic_error&) {
            fail("malformed real '" + w + "'");
        }
    }
    [[noreturn]] void fail(const std::string& what) { throw ConfigError("forest model: " + what); }

private:
    std::istringstream in_;
};

} // namespace

ForestModel parse_forest(std::string_view text) {
    ForestReader r(text);
    ForestModel model;
    r.expect("cyclonids-forest");
    if (r.read<int>() != 1) r.fail("unsupported version");
    r.expect("features");
    model.n_features = r.read<std::size_t>();
    r.expect("classes");
    const auto k = r.read<std::size_t>();
    for (std::size_t c = 0; c < k; ++c) model.class_names.push_back(r.read<std::string>());
    r.expect("degenerate");
    model.degenerate = r.read<int>() != 0;
    r.expect("importance");
    for (std::size_t j = 0; j < model.n_features; ++j) model.normalized_importance.push_back(r.read_real());
    r.expect("trees");
    const auto n_trees = r.read<std::size_t>();
    for (std::size_t t = 0; t < n_trees; ++t) {
        r.expect("tree");
        if (r.read<std::size_t>() != t) r.fail("trees out of order");
        r.expect("nodes");
        const auto m = r.read<std::size_t>();
        r.expect("oob");
        const auto oob = r.read<std::size_t>();
        r.expect("tree-importance");
        std::vector<double> imp;
        for (std::size_t j = 0; j < model.n_features; ++j) imp.push_back(r.read_real());
        std::vector<TreeNode> nodes(m);
        // Preorder: a split's right child starts after its whole left subtree.
        std::vector<std::uint32_t> pending;
        for (std::size_t i = 0; i < m; ++i) {
            if (!pending.empty()) {
                const auto parent = pending.back();
                if (nodes[parent].left == 0) {
                    nodes[parent].left = static_cast<std::uint32_t>(i);
                } else {
                    nodes[parent].right = static_cast<std::uint32_t>(i);
                    pending.pop_back();
                }
            } else if (i != 0) {
                r.fail("node list is not a single preorder tree");
            }
            const auto tag = r.read<std::string>();
            auto& n = nodes[i];
            if (tag == "S") {
                n.feature = r.read<std::int32_t>();
                if (n.feature < 0 || static_cast<std::size_t>(n.feature) >= model.n_features) r.fail("bad feature");
                n.threshold = r.read_real();
                n.samples = r.read<std::uint32_t>();
                pending.push_back(static_cast<std::uint32_t>(i));
            } else if (tag == "L") {
                n.samples = r.read<std::uint32_t>();
                n.class_counts.resize(k);
                for (auto& c : n.class_counts) c = r.read<std::uint32_t>();
            } else {
                r.fail("unknown node tag '" + tag + "'");
            }
        }
        if (!pending.empty()) r.fail("truncated tree");
        model.trees.push_back(DecisionTree::from_parts(std::move(nodes), std::move(imp), oob));
    }
    return model;
}

} // namespace cyclonids
