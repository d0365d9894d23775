#include "splboost/boosting.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

namespace splboost {

namespace {

constexpr double kInnerConvergenceTol = 1e-8;

double clamped_loss(double score, int label, double clamp) {
    const double s = std::clamp(score, -clamp, clamp);
    return std::exp(-static_cast<double>(label) * s);
}

// Candidate stumps with cached predictions, for the exhaustive search mode.
struct StumpPool {
    std::vector<WeakLearner> stumps;
    std::vector<std::vector<std::int8_t>> predictions;

    explicit StumpPool(const Dataset& data) : stumps(enumerate_stumps(data)) {
        predictions.reserve(stumps.size());
        for (const WeakLearner& s : stumps) {
            std::vector<std::int8_t> preds(data.n_rows());
            for (std::size_t i = 0; i < data.n_rows(); ++i)
                preds[i] = static_cast<std::int8_t>(s.predict(data.row(i)));
            predictions.push_back(std::move(preds));
        }
    }

    // Stump whose weighted error is farthest from one half, i.e. the
    // minimizer of err * (1 - err), which orders stumps exactly like the
    // per-round descent factor 2 sqrt(err (1 - err)) under the optimal
    // alpha. First minimum wins.
    std::size_t best(const Dataset& data, std::span<const double> p) const {
        std::size_t best_index = 0;
        double best_score = std::numeric_limits<double>::infinity();
        for (std::size_t s = 0; s < stumps.size(); ++s) {
            double err = 0.0;
            const auto& preds = predictions[s];
            for (std::size_t i = 0; i < preds.size(); ++i)
                if (preds[i] != data.label(i)) err += p[i];
            const double score = err * (1.0 - err);
            if (score < best_score) {
                best_score = score;
                best_index = s;
            }
        }
        return best_index;
    }
};

}  // namespace

void BoostConfig::validate() const {
    if (rounds < 1) throw std::invalid_argument("rounds must be >= 1");
    if (warm_start_rounds < 0) throw std::invalid_argument("warm_start_rounds must be >= 0");
    if (regularizer) {
        regularizer->validate();
        if (warm_start_rounds >= rounds)
            throw std::invalid_argument("warm_start_rounds must be < rounds");
    }
    if (!(warm_lambda > 0.0)) throw std::invalid_argument("warm_lambda must be > 0");
    if (inner_steps < 1) throw std::invalid_argument("inner_steps must be >= 1");
    if (max_depth < 1) throw std::invalid_argument("max_depth must be >= 1");
    if (!(err_floor > 0.0 && err_floor < 0.5))
        throw std::invalid_argument("err_floor must lie in (0, 0.5)");
    if (!(score_clamp > 0.0)) throw std::invalid_argument("score_clamp must be > 0");
}

double clamp_error(double err, double floor) {
    if (!(floor > 0.0 && floor < 0.5))
        throw std::invalid_argument("err_floor must lie in (0, 0.5)");
    return std::clamp(err, floor, 1.0 - floor);
}

double compute_alpha(double err) {
    if (!(err > 0.0 && err < 1.0))
        throw std::invalid_argument("compute_alpha: err must lie in (0, 1)");
    return 0.5 * std::log((1.0 - err) / err);
}

std::vector<double> update_v(const SPRegularizer& reg, std::span<const double> losses) {
    std::vector<double> v(losses.size());
    for (std::size_t i = 0; i < losses.size(); ++i)
        v[i] = latent_weight(reg, losses[i]);
    return v;
}

std::vector<double> update_w(std::span<const double> w, double alpha,
                             const WeakLearner& learner, const Dataset& data) {
    if (w.size() != data.n_rows())
        throw std::invalid_argument("update_w: weight count mismatch");
    std::vector<double> out(w.size());
    double total = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
        if (!(w[i] >= 0.0)) throw std::invalid_argument("update_w: negative weight");
        const int f = learner.predict(data.row(i));
        out[i] = w[i] * std::exp(-alpha * data.label(i) * f);
        if (!std::isfinite(out[i])) throw std::runtime_error("update_w: non-finite weight");
        total += out[i];
    }
    if (!(total > 0.0)) throw std::runtime_error("update_w: zero total weight");
    for (double& x : out) x /= total;
    return out;
}

TrainResult train(const Dataset& data, const BoostConfig& config) {
    config.validate();
    const std::size_t n = data.n_rows();
    if (n == 0) throw std::invalid_argument("train: empty dataset");

    ColumnOrder order;
    std::optional<StumpPool> pool;
    if (config.search == LearnerSearch::ExhaustiveStumps)
        pool.emplace(data);
    else
        order = ColumnOrder::build(data);

    std::vector<double> w(n, 1.0 / static_cast<double>(n));
    std::vector<double> v(n, 1.0);
    std::vector<double> scores(n, 0.0);
    const std::vector<double> ones(n, 1.0);

    TrainResult result;
    result.ensemble.n_features = data.n_cols();
    result.ensemble.stages.reserve(config.rounds);

    std::vector<double> p(n), losses(n);
    for (int round = 1; round <= config.rounds; ++round) {
        const bool warm = config.regularizer && round <= config.warm_start_rounds;
        // Warm-start rounds keep every sample: hard weighting at warm_lambda
        // leaves v at 1 wherever the loss stays below warm_lambda.
        std::optional<SPRegularizer> active;
        if (config.regularizer)
            active = warm ? SPRegularizer::hard(config.warm_lambda)
                          : *config.regularizer;

        WeakLearner learner;
        std::vector<int> preds;
        double err = 0.0, err_raw = 0.0, alpha = 0.0, residual = 0.0;
        bool err_clamped = false;
        for (int step = 0; step < config.inner_steps; ++step) {
            double total = 0.0;
            for (std::size_t i = 0; i < n; ++i) {
                p[i] = v[i] * w[i];
                total += p[i];
            }
            if (!(total > 0.0))
                throw TrainingError(round, "lambda rejected all samples");
            for (double& x : p) x /= total;

            if (pool) {
                learner = pool->stumps[pool->best(data, p)];
            } else {
                learner = fit_tree(data, p, config.max_depth, config.criterion, &order);
            }
            preds = learner.predict_all(data);
            err_raw = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                if (preds[i] != data.label(i)) err_raw += p[i];
            if (err_raw > 0.5) {
                learner.flip();
                err_raw = 1.0 - err_raw;
                for (int& q : preds) q = -q;
            }
            err = clamp_error(err_raw, config.err_floor);
            err_clamped = err != err_raw;
            alpha = compute_alpha(err);

            double factor = 0.0;
            for (std::size_t i = 0; i < n; ++i)
                factor += p[i] * std::exp(-alpha * data.label(i) * preds[i]);
            residual = std::abs(factor - 2.0 * std::sqrt(err * (1.0 - err)));

            for (std::size_t i = 0; i < n; ++i) {
                const double s = scores[i] + alpha * preds[i];
                losses[i] = clamped_loss(s, data.label(i), config.score_clamp);
            }
            if (active) {
                std::vector<double> next_v = update_v(*active, losses);
                double delta = 0.0;
                for (std::size_t i = 0; i < n; ++i)
                    delta = std::max(delta, std::abs(next_v[i] - v[i]));
                v = std::move(next_v);
                if (delta < kInnerConvergenceTol) break;
            } else {
                break;  // v stays all-ones; further inner steps change nothing
            }
        }

        for (std::size_t i = 0; i < n; ++i) scores[i] += alpha * preds[i];
        result.ensemble.stages.push_back(Stage{alpha, learner});
        w = update_w(w, alpha, learner, data);

        RoundRecord record;
        record.err = err;
        record.err_raw = err_raw;
        record.err_clamped = err_clamped;
        record.warm = warm;
        record.alpha = alpha;
        record.descent_residual = residual;
        record.v = v;
        if (config.regularizer) {
            record.v_configured =
                warm ? update_v(*config.regularizer, losses) : record.v;
            double objective = 0.0;
            for (double loss : losses)
                objective += latent_loss(*config.regularizer, loss);
            record.latent_objective = objective;
        } else {
            record.v_configured = ones;
            double objective = 0.0;
            for (double loss : losses) objective += loss;
            record.latent_objective = objective;
        }
        record.zero_weight_count =
            static_cast<int>(std::count(v.begin(), v.end(), 0.0));
        result.trace.rounds.push_back(std::move(record));
    }
    return result;
}

}  // namespace splboost
