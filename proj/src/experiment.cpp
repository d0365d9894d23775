#include "splboost/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <ostream>
#include <set>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "splboost/rng.hpp"

namespace splboost {

namespace {

// '#' keeps trailing zeros so every value carries 12 significant digits.
std::string format_value(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%#.12g", x);
    return buf;
}

auto record_key(const ResultRecord& r) {
    return std::tie(r.dataset, r.algorithm, r.noise, r.repetition);
}

}  // namespace

std::vector<double> default_lambda_grid() {
    std::vector<double> grid;
    for (int i = 0; i <= 10; ++i) grid.push_back(1.0 + 0.5 * static_cast<double>(i));
    return grid;
}

std::uint64_t cell_seed(std::uint64_t master, const std::string& dataset,
                        const std::string& algorithm, double noise, int repetition) {
    char noise_buf[32];
    std::snprintf(noise_buf, sizeof(noise_buf), "%.6g", noise);
    const std::string tag = dataset + '\x1f' + algorithm + '\x1f' + noise_buf +
                            '\x1f' + std::to_string(repetition);
    return derive_seed(master, tag);
}

std::vector<double> staged_error_rates(const Ensemble& ensemble, const Dataset& data) {
    if (data.n_rows() == 0)
        throw std::invalid_argument("staged_error_rates: empty dataset");
    std::vector<double> scores(data.n_rows(), 0.0);
    std::vector<double> errors;
    errors.reserve(ensemble.stages.size());
    for (const Stage& stage : ensemble.stages) {
        const std::vector<int> preds = stage.learner.predict_all(data);
        std::size_t wrong = 0;
        for (std::size_t i = 0; i < data.n_rows(); ++i) {
            scores[i] += stage.alpha * preds[i];
            const int label = scores[i] >= 0.0 ? 1 : -1;
            if (label != data.label(i)) ++wrong;
        }
        errors.push_back(static_cast<double>(wrong) /
                         static_cast<double>(data.n_rows()));
    }
    return errors;
}

CvSelection cv_select(const Dataset& data, const BoostConfig& base,
                      const std::vector<double>& lambda_grid, int rounds_max,
                      int n_folds, std::uint64_t seed) {
    if (rounds_max < 1) throw std::invalid_argument("rounds_max must be >= 1");
    const bool tuned = base.regularizer.has_value();
    if (tuned && lambda_grid.empty())
        throw std::invalid_argument("lambda grid must not be empty");
    if (tuned && base.warm_start_rounds >= rounds_max)
        throw std::invalid_argument("rounds_max must exceed warm_start_rounds");

    std::vector<std::optional<double>> grid;
    if (tuned)
        for (double lambda : lambda_grid) grid.emplace_back(lambda);
    else
        grid.emplace_back(std::nullopt);

    const std::vector<FoldPartition> parts =
        folds(data, SplitSpec{0.7, n_folds, seed});
    std::vector<std::vector<double>> err_sum(
        grid.size(), std::vector<double>(static_cast<std::size_t>(rounds_max), 0.0));
    std::vector<char> feasible(grid.size(), 1);

    for (const FoldPartition& part : parts) {
        const Dataset fold_train = subset(data, part.train_rows);
        const Dataset fold_val = subset(data, part.val_rows);
        for (std::size_t g = 0; g < grid.size(); ++g) {
            if (!feasible[g]) continue;
            BoostConfig config = base;
            config.rounds = rounds_max;
            if (grid[g]) config.regularizer = base.regularizer->with_lambda(*grid[g]);
            try {
                const TrainResult result = train(fold_train, config);
                const std::vector<double> staged =
                    staged_error_rates(result.ensemble, fold_val);
                for (std::size_t t = 0; t < staged.size(); ++t)
                    err_sum[g][t] += staged[t];
            } catch (const TrainingError&) {
                feasible[g] = 0;  // this lambda rejects everything on some fold
            }
        }
    }

    // The final retrain must satisfy warm_start_rounds < rounds, so the
    // round search starts after the warm phase for regularized configs.
    const int min_rounds = tuned ? base.warm_start_rounds + 1 : 1;
    CvSelection best;
    double best_err = std::numeric_limits<double>::infinity();
    for (std::size_t g = 0; g < grid.size(); ++g) {
        if (!feasible[g]) continue;
        for (int t = min_rounds; t <= rounds_max; ++t) {
            const double mean =
                err_sum[g][static_cast<std::size_t>(t - 1)] /
                static_cast<double>(parts.size());
            if (mean < best_err) {
                best_err = mean;
                best = CvSelection{grid[g], t, mean};
            }
        }
    }
    if (!std::isfinite(best_err))
        throw TrainingError(0, "every lambda in the grid rejected all samples");
    return best;
}

ResultRecord run_single(const StudyInput& input, const AlgorithmSpec& algorithm,
                        double noise, int repetition, const ExperimentSpec& spec) {
    const auto start = std::chrono::steady_clock::now();
    ResultRecord rec;
    rec.dataset = input.id;
    rec.algorithm = algorithm.name;
    rec.noise = noise;
    rec.repetition = repetition;
    rec.seed = cell_seed(spec.master_seed, input.id, algorithm.name, noise, repetition);

    const SplitSpec split_spec{spec.train_fraction, spec.cv_folds,
                               derive_seed(rec.seed, "split")};
    const TrainTestSplit parts = split(input.data, split_spec);
    const FlippedData noisy =
        inject_noise(parts.train, NoiseSpec{noise, derive_seed(rec.seed, "noise")});

    const std::vector<double> grid =
        spec.lambda_grid.empty() ? default_lambda_grid() : spec.lambda_grid;
    const CvSelection sel = cv_select(noisy.data, algorithm.config, grid,
                                      spec.rounds_max, spec.cv_folds,
                                      derive_seed(rec.seed, "cv"));

    BoostConfig config = algorithm.config;
    config.rounds = sel.rounds;
    config.seed = derive_seed(rec.seed, "final");
    if (sel.lambda) config.regularizer = config.regularizer->with_lambda(*sel.lambda);
    const TrainResult trained = train(noisy.data, config);

    rec.test_error = error_rate(trained.ensemble, parts.test);
    rec.chosen_lambda = sel.lambda;
    rec.chosen_rounds = sel.rounds;
    rec.wall_time = std::chrono::duration<double>(
                        std::chrono::steady_clock::now() - start).count();
    return rec;
}

StudyResult run_study(const ExperimentSpec& spec) {
    if (spec.datasets.empty()) throw std::invalid_argument("no datasets");
    if (spec.algorithms.empty()) throw std::invalid_argument("no algorithms");
    if (spec.repetitions < 1) throw std::invalid_argument("repetitions must be >= 1");
    if (spec.noise_levels.empty()) throw std::invalid_argument("no noise levels");
    if (spec.workers < 1) throw std::invalid_argument("workers must be >= 1");
    for (double rate : spec.noise_levels)
        if (!(rate >= 0.0 && rate <= 0.5))
            throw std::invalid_argument("noise level must lie in [0, 0.5]");

    struct Cell {
        std::size_t dataset, algorithm, noise;
        int repetition;
    };
    std::vector<Cell> cells;
    for (std::size_t d = 0; d < spec.datasets.size(); ++d)
        for (std::size_t a = 0; a < spec.algorithms.size(); ++a)
            for (std::size_t k = 0; k < spec.noise_levels.size(); ++k)
                for (int r = 0; r < spec.repetitions; ++r)
                    cells.push_back({d, a, k, r});

    std::vector<ResultRecord> records(cells.size());
    std::atomic<std::size_t> next{0};
    const auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= cells.size()) return;
            const Cell& cell = cells[i];
            const StudyInput& input = spec.datasets[cell.dataset];
            const AlgorithmSpec& algorithm = spec.algorithms[cell.algorithm];
            const double noise = spec.noise_levels[cell.noise];
            ResultRecord& rec = records[i];
            rec.dataset = input.id;
            rec.algorithm = algorithm.name;
            rec.noise = noise;
            rec.repetition = cell.repetition;
            rec.seed = cell_seed(spec.master_seed, input.id, algorithm.name, noise,
                                 cell.repetition);
            try {
                rec = run_single(input, algorithm, noise, cell.repetition, spec);
            } catch (const std::exception& e) {
                rec.error = e.what();
            }
        }
    };
    const std::size_t n_threads =
        std::min<std::size_t>(static_cast<std::size_t>(spec.workers), cells.size());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        for (std::size_t i = 0; i < n_threads; ++i) threads.emplace_back(worker);
        for (std::thread& t : threads) t.join();
    }

    std::sort(records.begin(), records.end(),
              [](const ResultRecord& a, const ResultRecord& b) {
                  return record_key(a) < record_key(b);
              });

    StudyResult result;
    result.records = std::move(records);
    std::map<std::tuple<std::string, std::string, double>, std::vector<double>> groups;
    for (const ResultRecord& rec : result.records)
        if (!rec.error)
            groups[{rec.dataset, rec.algorithm, rec.noise}].push_back(rec.test_error);
    for (const auto& [key, errors] : groups) {
        SummaryRow row;
        row.dataset = std::get<0>(key);
        row.algorithm = std::get<1>(key);
        row.noise = std::get<2>(key);
        row.n_reps = static_cast<int>(errors.size());
        double sum = 0.0;
        for (double e : errors) sum += e;
        row.mean_err = sum / static_cast<double>(errors.size());
        double ss = 0.0;
        for (double e : errors) ss += (e - row.mean_err) * (e - row.mean_err);
        row.std_err = errors.size() > 1
                          ? std::sqrt(ss / static_cast<double>(errors.size() - 1))
                          : 0.0;
        result.summary.push_back(std::move(row));
    }
    return result;
}

RankTable rank_table(const std::vector<SummaryRow>& summaries) {
    std::set<std::string> algo_set;
    std::set<std::pair<std::string, double>> cell_set;
    std::map<std::pair<std::string, double>, std::map<std::string, double>> cells;
    for (const SummaryRow& row : summaries) {
        algo_set.insert(row.algorithm);
        cell_set.insert({row.dataset, row.noise});
        cells[{row.dataset, row.noise}][row.algorithm] = row.mean_err;
    }
    if (algo_set.size() < 2)
        throw std::invalid_argument("rank_table needs at least 2 algorithms");
    if (cell_set.empty())
        throw std::invalid_argument("rank_table needs at least 1 cell");

    RankTable table;
    table.algorithms.assign(algo_set.begin(), algo_set.end());
    const std::size_t n_algos = table.algorithms.size();
    std::vector<std::vector<int>> rank_counts(n_algos, std::vector<int>(n_algos, 0));
    for (const auto& cell : cell_set) {
        const auto& entry = cells[cell];
        if (entry.size() != n_algos) {
            ++table.cells_skipped;
            continue;
        }
        ++table.cells_used;
        for (std::size_t a = 0; a < n_algos; ++a) {
            const double err = entry.at(table.algorithms[a]);
            int rank = 1;
            for (const auto& [other, other_err] : entry)
                if (other_err < err) ++rank;
            ++rank_counts[a][static_cast<std::size_t>(rank - 1)];
        }
    }
    if (table.cells_used == 0)
        throw std::invalid_argument("rank_table: no cell covers every algorithm");

    table.top_n_ratio.assign(n_algos, std::vector<double>(n_algos, 0.0));
    for (std::size_t a = 0; a < n_algos; ++a) {
        int cumulative = 0;
        for (std::size_t n = 0; n < n_algos; ++n) {
            cumulative += rank_counts[a][n];
            table.top_n_ratio[a][n] =
                static_cast<double>(cumulative) / static_cast<double>(table.cells_used);
        }
    }
    return table;
}

void write_records_jsonl(std::ostream& out, const std::vector<ResultRecord>& records,
                         bool include_timing) {
    using nlohmann::json;
    for (const ResultRecord& rec : records) {
        json j;
        j["dataset"] = rec.dataset;
        j["algorithm"] = rec.algorithm;
        j["noise"] = rec.noise;
        j["repetition"] = rec.repetition;
        j["seed"] = rec.seed;
        if (rec.error) {
            j["error"] = *rec.error;
            j["test_error"] = nullptr;
            j["chosen_lambda"] = nullptr;
            j["chosen_rounds"] = nullptr;
        } else {
            j["test_error"] = rec.test_error;
            if (rec.chosen_lambda)
                j["chosen_lambda"] = *rec.chosen_lambda;
            else
                j["chosen_lambda"] = nullptr;
            j["chosen_rounds"] = rec.chosen_rounds;
        }
        if (include_timing)
            j["wall_time"] = rec.wall_time;
        else
            j["wall_time"] = nullptr;
        out << j.dump() << '\n';
    }
}

void write_summary_tsv(std::ostream& out, const std::vector<SummaryRow>& summary) {
    out << "dataset\talgorithm\tnoise\tmean_err\tstd_err\tn_reps\n";
    for (const SummaryRow& row : summary)
        out << row.dataset << '\t' << row.algorithm << '\t'
            << format_value(row.noise) << '\t' << format_value(row.mean_err) << '\t'
            << format_value(row.std_err) << '\t' << row.n_reps << '\n';
}

void write_rank_tsv(std::ostream& out, const RankTable& table) {
    out << "algorithm";
    for (std::size_t n = 1; n <= table.algorithms.size(); ++n) out << "\ttop" << n;
    out << '\n';
    for (std::size_t a = 0; a < table.algorithms.size(); ++a) {
        out << table.algorithms[a];
        for (double ratio : table.top_n_ratio[a]) out << '\t' << format_value(ratio);
        out << '\n';
    }
}

}  // namespace splboost
