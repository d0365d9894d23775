#include "splboost/dataset.hpp"

#include <algorithm>

namespace splboost {

Dataset::Dataset(std::size_t n_rows, std::size_t n_cols,
                 std::vector<double> features, std::vector<int> labels)
    : n_rows_(n_rows),
      n_cols_(n_cols),
      features_(std::move(features)),
      labels_(std::move(labels)) {
    if (features_.size() != n_rows_ * n_cols_)
        throw std::invalid_argument("dataset: feature buffer has " +
                                    std::to_string(features_.size()) +
                                    " values, expected " +
                                    std::to_string(n_rows_ * n_cols_));
    if (labels_.size() != n_rows_)
        throw std::invalid_argument("dataset: " + std::to_string(labels_.size()) +
                                    " labels for " + std::to_string(n_rows_) + " rows");
    for (double x : features_)
        if (!std::isfinite(x))
            throw std::invalid_argument("dataset: non-finite feature value");
    for (int y : labels_)
        if (y != 1 && y != -1)
            throw std::invalid_argument("dataset: label " + std::to_string(y) +
                                        " is not +1 or -1");
}

Dataset Dataset::with_flipped_labels(std::span<const std::size_t> rows) const {
    std::vector<int> labels = labels_;
    for (std::size_t r : rows) {
        if (r >= n_rows_)
            throw std::invalid_argument("flip row " + std::to_string(r) + " out of range");
        labels[r] = -labels[r];
    }
    return Dataset(n_rows_, n_cols_, features_, std::move(labels));
}

Dataset subset(const Dataset& data, std::span<const std::size_t> rows) {
    std::vector<double> features;
    features.reserve(rows.size() * data.n_cols());
    std::vector<int> labels;
    labels.reserve(rows.size());
    for (std::size_t r : rows) {
        if (r >= data.n_rows())
            throw std::invalid_argument("subset row " + std::to_string(r) + " out of range");
        auto row = data.row(r);
        features.insert(features.end(), row.begin(), row.end());
        labels.push_back(data.label(r));
    }
    return Dataset(rows.size(), data.n_cols(), std::move(features), std::move(labels));
}

void WeightState::validate(std::size_t n) const {
    if (w.size() != n || v.size() != n)
        throw std::invalid_argument("weight state size mismatch");
    for (double x : w)
        if (!(x >= 0.0) || !std::isfinite(x))
            throw std::invalid_argument("sample weight must be finite and >= 0");
    for (double x : v)
        if (!(x >= 0.0 && x <= 1.0))
            throw std::invalid_argument("latent weight must lie in [0, 1]");
}

}  // namespace splboost
