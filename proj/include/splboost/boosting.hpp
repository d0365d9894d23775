#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "splboost/dataset.hpp"
#include "splboost/ensemble.hpp"
#include "splboost/regularizer.hpp"
#include "splboost/tree.hpp"

namespace splboost {

// How the weak learner of each round is chosen. GreedyTree is the normal
// mode; ExhaustiveStumps searches every stump from enumerate_stumps and
// guarantees the majorize-minimize descent of the latent objective.
enum class LearnerSearch { GreedyTree, ExhaustiveStumps };

struct BoostConfig {
    int rounds = 100;
    std::optional<SPRegularizer> regularizer;  // nullopt = plain AdaBoost
    int warm_start_rounds = 3;
    double warm_lambda = 1e6;
    int inner_steps = 1;
    int max_depth = 3;
    double err_floor = 1e-10;
    std::uint64_t seed = 0;
    double score_clamp = kDefaultScoreClamp;
    SplitCriterion criterion = SplitCriterion::Gini;
    LearnerSearch search = LearnerSearch::GreedyTree;

    void validate() const;
};

struct RoundRecord {
    double err = 0.0;        // clamped error fed to compute_alpha
    double err_raw = 0.0;    // weighted error after any sign flip, before clamping
    bool err_clamped = false;
    bool warm = false;
    double alpha = 0.0;
    std::vector<double> v;             // latent weights committed this round
    std::vector<double> v_configured;  // same losses, configured regularizer
    double latent_objective = 0.0;     // sum of latent losses at the configured scheme
    int zero_weight_count = 0;         // entries of v equal to 0
    // |sum_i p_i e^{-alpha y_i f(x_i)} - 2 sqrt(err (1-err))| with the
    // pre-update normalized weights p. Exact when err was not clamped.
    double descent_residual = 0.0;
};

struct TrainTrace {
    std::vector<RoundRecord> rounds;
};

struct TrainResult {
    Ensemble ensemble;
    TrainTrace trace;
};

// Clamps a raw weighted error into [floor, 1 - floor].
double clamp_error(double err, double floor);

// 0.5 * log((1 - err) / err); expects err already clamped into (0, 1).
double compute_alpha(double err);

// Element-wise latent_weight over a loss vector.
std::vector<double> update_v(const SPRegularizer& reg, std::span<const double> losses);

// w_i <- w_i * e^{-alpha y_i f(x_i)}, renormalized to sum 1.
std::vector<double> update_w(std::span<const double> w, double alpha,
                             const WeakLearner& learner, const Dataset& data);

TrainResult train(const Dataset& data, const BoostConfig& config);

}  // namespace splboost
