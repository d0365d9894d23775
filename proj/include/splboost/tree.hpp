#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "splboost/dataset.hpp"

namespace splboost {

enum class SplitCriterion { Gini, Misclassification };

// Node in a flattened tree. feature < 0 marks a leaf; otherwise rows with
// feature value <= threshold go to `left`.
struct TreeNode {
    int feature = -1;
    double threshold = 0.0;
    int prediction = 1;
    int left = -1;
    int right = -1;

    bool is_leaf() const { return feature < 0; }
    bool operator==(const TreeNode&) const = default;
};

class WeakLearner {
public:
    WeakLearner() = default;
    WeakLearner(std::vector<TreeNode> nodes, std::size_t n_features);

    static WeakLearner leaf(int prediction, std::size_t n_features);
    static WeakLearner stump(int feature, double threshold, int left_sign,
                             std::size_t n_features);

    int predict(std::span<const double> x) const;
    std::vector<int> predict_all(const Dataset& data) const;

    // Negates every leaf prediction (used when a fitted learner has
    // weighted error above one half).
    void flip();

    std::size_t n_features() const { return n_features_; }
    const std::vector<TreeNode>& nodes() const { return nodes_; }
    int depth() const;

    bool operator==(const WeakLearner&) const = default;

private:
    std::vector<TreeNode> nodes_;  // nodes_[0] is the root
    std::size_t n_features_ = 0;
};

// Row indices of a dataset sorted per feature by (value, row). Building it
// once and reusing across fits amortizes the sort over boosting rounds.
struct ColumnOrder {
    std::vector<std::vector<std::int32_t>> by_feature;

    static ColumnOrder build(const Dataset& data);
};

WeakLearner fit_tree(const Dataset& data, std::span<const double> weights,
                     int max_depth,
                     SplitCriterion criterion = SplitCriterion::Gini,
                     const ColumnOrder* order = nullptr);

// Normalized weighted misclassification rate of `learner` on `data`.
double weighted_error(const WeakLearner& learner, const Dataset& data,
                      std::span<const double> weights);

// Every depth-1 stump over (feature, midpoint threshold, left sign), ordered
// by feature, then threshold, then left sign +1 before -1, followed by the
// two constant classifiers (+1 then -1).
std::vector<WeakLearner> enumerate_stumps(const Dataset& data);

}  // namespace splboost
