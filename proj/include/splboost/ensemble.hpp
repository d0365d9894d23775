#pragma once

#include <span>
#include <vector>

#include "splboost/dataset.hpp"
#include "splboost/tree.hpp"

namespace splboost {

inline constexpr double kDefaultScoreClamp = 50.0;

struct Stage {
    double alpha = 0.0;
    WeakLearner learner;

    bool operator==(const Stage&) const = default;
};

// Additive model F(x) = sum_t alpha_t * f_t(x).
struct Ensemble {
    std::vector<Stage> stages;
    std::size_t n_features = 0;

    bool empty() const { return stages.empty(); }
};

double predict_score(const Ensemble& ensemble, std::span<const double> x);

// sign(F(x)); a score of exactly 0 maps to +1.
int predict_label(const Ensemble& ensemble, std::span<const double> x);

std::vector<double> scores(const Ensemble& ensemble, const Dataset& data);

// e^{-y_i F(x_i)} with the score clamped to [-score_clamp, score_clamp].
std::vector<double> exp_losses(const Ensemble& ensemble, const Dataset& data,
                               double score_clamp = kDefaultScoreClamp);

std::vector<Margin> margins(const Ensemble& ensemble, const Dataset& data);

// Fraction of rows where predict_label disagrees with the dataset label.
double error_rate(const Ensemble& ensemble, const Dataset& data);

}  // namespace splboost
