#include "splboost/tree.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace splboost {

namespace {

using IndexList = std::vector<std::int32_t>;

double impurity(SplitCriterion criterion, double w_pos, double w_neg) {
    if (criterion == SplitCriterion::Misclassification)
        return std::min(w_pos, w_neg);
    const double total = w_pos + w_neg;
    if (total <= 0.0) return 0.0;
    return 2.0 * w_pos * w_neg / total;
}

struct BestSplit {
    int feature = -1;
    double threshold = 0.0;
    double score = std::numeric_limits<double>::infinity();
};

class TreeBuilder {
public:
    TreeBuilder(const Dataset& data, std::span<const double> weights,
                int max_depth, SplitCriterion criterion)
        : data_(data), weights_(weights), max_depth_(max_depth), criterion_(criterion) {}

    std::vector<TreeNode> build(std::vector<IndexList> lists) {
        nodes_.clear();
        build_node(std::move(lists), 0);
        return std::move(nodes_);
    }

private:
    int build_node(std::vector<IndexList> lists, int depth) {
        double w_pos = 0.0, w_neg = 0.0;
        for (std::int32_t i : lists[0]) {
            if (data_.label(i) > 0)
                w_pos += weights_[i];
            else
                w_neg += weights_[i];
        }

        const int prediction = w_pos >= w_neg ? 1 : -1;
        const int index = static_cast<int>(nodes_.size());
        nodes_.push_back(TreeNode{-1, 0.0, prediction, -1, -1});

        if (depth >= max_depth_ || std::min(w_pos, w_neg) <= 0.0) return index;

        const BestSplit best = find_split(lists, w_pos, w_neg);
        if (best.feature < 0) return index;

        auto [left, right] = partition(lists, best.feature, best.threshold);
        lists.clear();
        lists.shrink_to_fit();
        const int left_index = build_node(std::move(left), depth + 1);
        const int right_index = build_node(std::move(right), depth + 1);
        // prediction is meaningful only on leaves; split nodes stay canonical
        // so structural equality and serialization round-trips hold.
        nodes_[index] = TreeNode{best.feature, best.threshold, 1,
                                 left_index, right_index};
        return index;
    }

    BestSplit find_split(const std::vector<IndexList>& lists,
                         double w_pos, double w_neg) const {
        BestSplit best;
        best.score = impurity(criterion_, w_pos, w_neg);
        const std::size_t d = data_.n_cols();
        for (std::size_t f = 0; f < d; ++f) {
            const IndexList& order = lists[f];
            double left_pos = 0.0, left_neg = 0.0;
            for (std::size_t k = 0; k + 1 < order.size(); ++k) {
                const std::int32_t i = order[k];
                if (data_.label(i) > 0)
                    left_pos += weights_[i];
                else
                    left_neg += weights_[i];
                const double value = data_.feature(i, f);
                const double next = data_.feature(order[k + 1], f);
                if (next <= value) continue;
                const double score =
                    impurity(criterion_, left_pos, left_neg) +
                    impurity(criterion_, w_pos - left_pos, w_neg - left_neg);
                if (score < best.score) {
                    best.score = score;
                    best.feature = static_cast<int>(f);
                    best.threshold = value + (next - value) / 2.0;
                }
            }
        }
        return best;
    }

    std::pair<std::vector<IndexList>, std::vector<IndexList>> partition(
        const std::vector<IndexList>& lists, int feature, double threshold) const {
        const std::size_t d = lists.size();
        std::vector<IndexList> left(d), right(d);
        for (std::size_t f = 0; f < d; ++f) {
            for (std::int32_t i : lists[f]) {
                if (data_.feature(i, feature) <= threshold)
                    left[f].push_back(i);
                else
                    right[f].push_back(i);
            }
        }
        return {std::move(left), std::move(right)};
    }

    const Dataset& data_;
    std::span<const double> weights_;
    int max_depth_;
    SplitCriterion criterion_;
    std::vector<TreeNode> nodes_;
};

int depth_below(const std::vector<TreeNode>& nodes, int index) {
    const TreeNode& node = nodes[index];
    if (node.is_leaf()) return 0;
    return 1 + std::max(depth_below(nodes, node.left), depth_below(nodes, node.right));
}

}  // namespace

WeakLearner::WeakLearner(std::vector<TreeNode> nodes, std::size_t n_features)
    : nodes_(std::move(nodes)), n_features_(n_features) {
    if (nodes_.empty()) throw std::invalid_argument("tree must have at least one node");
}

WeakLearner WeakLearner::leaf(int prediction, std::size_t n_features) {
    if (prediction != 1 && prediction != -1)
        throw std::invalid_argument("leaf prediction must be +1 or -1");
    return WeakLearner({TreeNode{-1, 0.0, prediction, -1, -1}}, n_features);
}

WeakLearner WeakLearner::stump(int feature, double threshold, int left_sign,
                               std::size_t n_features) {
    if (left_sign != 1 && left_sign != -1)
        throw std::invalid_argument("stump sign must be +1 or -1");
    if (feature < 0 || static_cast<std::size_t>(feature) >= n_features)
        throw std::invalid_argument("stump feature out of range");
    std::vector<TreeNode> nodes{
        TreeNode{feature, threshold, 1, 1, 2},
        TreeNode{-1, 0.0, left_sign, -1, -1},
        TreeNode{-1, 0.0, -left_sign, -1, -1},
    };
    return WeakLearner(std::move(nodes), n_features);
}

int WeakLearner::predict(std::span<const double> x) const {
    if (x.size() != n_features_)
        throw std::invalid_argument("predict: expected " + std::to_string(n_features_) +
                                    " features, got " + std::to_string(x.size()));
    int index = 0;
    while (!nodes_[index].is_leaf()) {
        const TreeNode& node = nodes_[index];
        index = x[node.feature] <= node.threshold ? node.left : node.right;
    }
    return nodes_[index].prediction;
}

std::vector<int> WeakLearner::predict_all(const Dataset& data) const {
    std::vector<int> out(data.n_rows());
    for (std::size_t i = 0; i < data.n_rows(); ++i) out[i] = predict(data.row(i));
    return out;
}

void WeakLearner::flip() {
    for (TreeNode& node : nodes_)
        if (node.is_leaf()) node.prediction = -node.prediction;
}

int WeakLearner::depth() const { return depth_below(nodes_, 0); }

ColumnOrder ColumnOrder::build(const Dataset& data) {
    ColumnOrder order;
    order.by_feature.resize(data.n_cols());
    for (std::size_t f = 0; f < data.n_cols(); ++f) {
        IndexList& idx = order.by_feature[f];
        idx.resize(data.n_rows());
        for (std::size_t i = 0; i < data.n_rows(); ++i)
            idx[i] = static_cast<std::int32_t>(i);
        std::sort(idx.begin(), idx.end(), [&](std::int32_t a, std::int32_t b) {
            const double va = data.feature(a, f);
            const double vb = data.feature(b, f);
            if (va != vb) return va < vb;
            return a < b;
        });
    }
    return order;
}

WeakLearner fit_tree(const Dataset& data, std::span<const double> weights,
                     int max_depth, SplitCriterion criterion,
                     const ColumnOrder* order) {
    if (data.n_rows() == 0) throw std::invalid_argument("fit_tree: empty dataset");
    if (data.n_cols() == 0) throw std::invalid_argument("fit_tree: dataset has no features");
    if (max_depth < 1) throw std::invalid_argument("fit_tree: max_depth must be >= 1");
    if (weights.size() != data.n_rows())
        throw std::invalid_argument("fit_tree: weight count mismatch");
    double total = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0) || !std::isfinite(w))
            throw std::invalid_argument("fit_tree: weights must be finite and >= 0");
        total += w;
    }
    if (total <= 0.0) throw TrainingError(0, "all sample weights are zero");

    ColumnOrder local;
    if (order == nullptr) {
        local = ColumnOrder::build(data);
        order = &local;
    }
    TreeBuilder builder(data, weights, max_depth, criterion);
    return WeakLearner(builder.build(order->by_feature), data.n_cols());
}

double weighted_error(const WeakLearner& learner, const Dataset& data,
                      std::span<const double> weights) {
    if (weights.size() != data.n_rows())
        throw std::invalid_argument("weighted_error: weight count mismatch");
    double total = 0.0, wrong = 0.0;
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        total += weights[i];
        if (learner.predict(data.row(i)) != data.label(i)) wrong += weights[i];
    }
    if (total <= 0.0) throw std::invalid_argument("weighted_error: zero total weight");
    return wrong / total;
}

std::vector<WeakLearner> enumerate_stumps(const Dataset& data) {
    if (data.n_rows() == 0) throw std::invalid_argument("enumerate_stumps: empty dataset");
    std::vector<WeakLearner> stumps;
    const std::size_t d = data.n_cols();
    for (std::size_t f = 0; f < d; ++f) {
        std::vector<double> values(data.n_rows());
        for (std::size_t i = 0; i < data.n_rows(); ++i) values[i] = data.feature(i, f);
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        for (std::size_t k = 0; k + 1 < values.size(); ++k) {
            const double threshold = values[k] + (values[k + 1] - values[k]) / 2.0;
            stumps.push_back(WeakLearner::stump(static_cast<int>(f), threshold, 1, d));
            stumps.push_back(WeakLearner::stump(static_cast<int>(f), threshold, -1, d));
        }
    }
    stumps.push_back(WeakLearner::leaf(1, d));
    stumps.push_back(WeakLearner::leaf(-1, d));
    return stumps;
}

}  // namespace splboost
