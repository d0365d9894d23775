#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "splboost/boosting.hpp"
#include "splboost/data_io.hpp"

namespace splboost {

struct StudyInput {
    std::string id;
    Dataset data;
};

struct AlgorithmSpec {
    std::string name;
    BoostConfig config;
};

struct ExperimentSpec {
    std::vector<StudyInput> datasets;
    std::vector<AlgorithmSpec> algorithms;
    std::vector<double> noise_levels{0.0, 0.05, 0.10, 0.20, 0.30};
    int repetitions = 10;
    std::vector<double> lambda_grid;  // empty = default_lambda_grid()
    int rounds_max = 200;
    int cv_folds = 5;
    double train_fraction = 0.7;
    std::uint64_t master_seed = 0;
    int workers = 1;
};

struct ResultRecord {
    std::string dataset;
    std::string algorithm;
    double noise = 0.0;
    int repetition = 0;
    double test_error = 0.0;
    std::optional<double> chosen_lambda;  // absent for plain AdaBoost
    int chosen_rounds = 0;
    double wall_time = 0.0;  // seconds
    std::uint64_t seed = 0;
    std::optional<std::string> error;  // set when the cell failed
};

struct SummaryRow {
    std::string dataset;
    std::string algorithm;
    double noise = 0.0;
    double mean_err = 0.0;
    double std_err = 0.0;
    int n_reps = 0;
};

struct StudyResult {
    std::vector<ResultRecord> records;
    std::vector<SummaryRow> summary;
};

// 11 points: 1.0, 1.5, ..., 6.0.
std::vector<double> default_lambda_grid();

// Seed for one (dataset, algorithm, noise, repetition) cell.
std::uint64_t cell_seed(std::uint64_t master, const std::string& dataset,
                        const std::string& algorithm, double noise, int repetition);

// Test error of every ensemble prefix: element t-1 is the error using the
// first t stages.
std::vector<double> staged_error_rates(const Ensemble& ensemble, const Dataset& data);

struct CvSelection {
    std::optional<double> lambda;
    int rounds = 0;
    double mean_val_error = 0.0;
};

// Joint (lambda, rounds) selection by k-fold cross validation: each fold is
// trained once per lambda to rounds_max and every prefix is scored on the
// validation part. Ties prefer smaller lambda, then fewer rounds. For a
// config without regularizer only the round count is selected.
CvSelection cv_select(const Dataset& train, const BoostConfig& base,
                      const std::vector<double>& lambda_grid, int rounds_max,
                      int n_folds, std::uint64_t seed);

ResultRecord run_single(const StudyInput& input, const AlgorithmSpec& algorithm,
                        double noise, int repetition, const ExperimentSpec& spec);

StudyResult run_study(const ExperimentSpec& spec);

struct RankTable {
    std::vector<std::string> algorithms;           // sorted names
    std::vector<std::vector<double>> top_n_ratio;  // [algorithm][n-1]
    int cells_used = 0;
    int cells_skipped = 0;  // (dataset, noise) cells missing some algorithm
};

// Competition ranking of mean test errors per (dataset, noise) cell: ties
// share the lower rank and the next rank is skipped.
RankTable rank_table(const std::vector<SummaryRow>& summaries);

void write_records_jsonl(std::ostream& out, const std::vector<ResultRecord>& records,
                         bool include_timing = false);
void write_summary_tsv(std::ostream& out, const std::vector<SummaryRow>& summary);
void write_rank_tsv(std::ostream& out, const RankTable& table);

}  // namespace splboost
