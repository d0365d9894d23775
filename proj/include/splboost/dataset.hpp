#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace splboost {

// Dense binary-classification dataset. Features are row-major, labels are +1/-1.
class Dataset {
public:
    Dataset() = default;
    Dataset(std::size_t n_rows, std::size_t n_cols,
            std::vector<double> features, std::vector<int> labels);

    std::size_t n_rows() const { return n_rows_; }
    std::size_t n_cols() const { return n_cols_; }
    bool empty() const { return n_rows_ == 0; }

    double feature(std::size_t row, std::size_t col) const {
        return features_[row * n_cols_ + col];
    }
    std::span<const double> row(std::size_t i) const {
        return {features_.data() + i * n_cols_, n_cols_};
    }
    int label(std::size_t i) const { return labels_[i]; }

    const std::vector<double>& features() const { return features_; }
    const std::vector<int>& labels() const { return labels_; }

    // Returns a copy with the labels at `rows` negated.
    Dataset with_flipped_labels(std::span<const std::size_t> rows) const;

private:
    std::size_t n_rows_ = 0;
    std::size_t n_cols_ = 0;
    std::vector<double> features_;
    std::vector<int> labels_;
};

Dataset subset(const Dataset& data, std::span<const std::size_t> rows);

// Per-sample boosting state: AdaBoost weights w and latent weights v.
struct WeightState {
    std::vector<double> w;
    std::vector<double> v;

    void validate(std::size_t n) const;
};

// Classification margin y * F(x).
struct Margin {
    double value = 0.0;
};

// Raised when the training loop cannot continue (for example every sample
// was rejected by the current lambda). Carries the failing round.
class TrainingError : public std::runtime_error {
public:
    TrainingError(int round, const std::string& what)
        : std::runtime_error("round " + std::to_string(round) + ": " + what),
          round_(round) {}
    int round() const { return round_; }

private:
    int round_;
};

}  // namespace splboost
