#include "splboost/ensemble.hpp"

#include <algorithm>
#include <cmath>

namespace splboost {

namespace {

void check_dimension(const Ensemble& ensemble, std::size_t d) {
    if (!ensemble.empty() && ensemble.n_features != d)
        throw std::invalid_argument("ensemble expects " +
                                    std::to_string(ensemble.n_features) +
                                    " features, got " + std::to_string(d));
}

}  // namespace

double predict_score(const Ensemble& ensemble, std::span<const double> x) {
    check_dimension(ensemble, x.size());
    double score = 0.0;
    for (const Stage& stage : ensemble.stages)
        score += stage.alpha * stage.learner.predict(x);
    return score;
}

int predict_label(const Ensemble& ensemble, std::span<const double> x) {
    return predict_score(ensemble, x) >= 0.0 ? 1 : -1;
}

std::vector<double> scores(const Ensemble& ensemble, const Dataset& data) {
    check_dimension(ensemble, data.n_cols());
    std::vector<double> out(data.n_rows(), 0.0);
    for (const Stage& stage : ensemble.stages) {
        const std::vector<int> preds = stage.learner.predict_all(data);
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] += stage.alpha * preds[i];
    }
    return out;
}

std::vector<double> exp_losses(const Ensemble& ensemble, const Dataset& data,
                               double score_clamp) {
    if (!(score_clamp > 0.0))
        throw std::invalid_argument("score_clamp must be > 0");
    std::vector<double> out = scores(ensemble, data);
    for (std::size_t i = 0; i < out.size(); ++i) {
        const double clamped = std::clamp(out[i], -score_clamp, score_clamp);
        out[i] = std::exp(-static_cast<double>(data.label(i)) * clamped);
    }
    return out;
}

std::vector<Margin> margins(const Ensemble& ensemble, const Dataset& data) {
    std::vector<double> s = scores(ensemble, data);
    std::vector<Margin> out(s.size());
    for (std::size_t i = 0; i < s.size(); ++i)
        out[i].value = static_cast<double>(data.label(i)) * s[i];
    return out;
}

double error_rate(const Ensemble& ensemble, const Dataset& data) {
    if (data.n_rows() == 0) throw std::invalid_argument("error_rate: empty dataset");
    const std::vector<double> s = scores(ensemble, data);
    std::size_t wrong = 0;
    for (std::size_t i = 0; i < s.size(); ++i) {
        const int label = s[i] >= 0.0 ? 1 : -1;
        if (label != data.label(i)) ++wrong;
    }
    return static_cast<double>(wrong) / static_cast<double>(data.n_rows());
}

}  // namespace splboost
