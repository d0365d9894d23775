#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "splboost/boosting.hpp"
#include "splboost/data_io.hpp"
#include "splboost/diagnostics.hpp"
#include "splboost/experiment.hpp"
#include "splboost/model_io.hpp"
#include "splboost/rng.hpp"

namespace {

using namespace splboost;

std::vector<double> parse_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ',')) {
        if (item.empty()) continue;
        values.push_back(std::stod(item));
    }
    if (values.empty()) throw CLI::ValidationError("expected a comma-separated list");
    return values;
}

LabelColumn parse_label_column(const std::string& text) {
    if (text.empty()) return LabelColumn{};
    if (text.find_first_not_of("0123456789") == std::string::npos)
        return LabelColumn::by_index(std::stoul(text));
    return LabelColumn::by_name(text);
}

struct DataFlags {
    std::string label_column;
    std::string positive_label = "1";
};

void add_data_flags(CLI::App* cmd, DataFlags& flags) {
    cmd->add_option("--label-column", flags.label_column,
                    "Label column name or 0-based index (default: last column)");
    cmd->add_option("--positive-label", flags.positive_label,
                    "Label value mapped to +1 (default: 1)");
}

// A dataset source is either a CSV path or the literal "synth", which
// generates the built-in two-Gaussian data (200 clean rows).
Dataset load_source(const std::string& source, const DataFlags& flags,
                    std::uint64_t seed) {
    if (source == "synth")
        return synth_gaussian(100, 0.0, derive_seed(seed, "source-synth")).data;
    return load_csv(source, parse_label_column(flags.label_column),
                    flags.positive_label);
}

std::string source_id(const std::string& source) {
    if (source == "synth") return "synth";
    return std::filesystem::path(source).stem().string();
}

struct BoostFlags {
    std::string algo = "splboost";
    std::string regularizer = "hard";
    double lambda = 2.0;
    double gamma = 1.0;
    double t_param = 2.0;
    int rounds = 100;
    int warm_rounds = 3;
    double warm_lambda = 1e6;
    int max_depth = 3;
};

void add_boost_flags(CLI::App* cmd, BoostFlags& flags, bool multi_algo) {
    auto* algo = cmd->add_option("--algo", flags.algo,
                                 "Algorithm: adaboost or splboost");
    algo->check(CLI::IsMember({"adaboost", "splboost"}));
    if (multi_algo) algo->description("Restrict the study to one algorithm");
    cmd->add_option("--regularizer", flags.regularizer,
                    "Self-paced scheme: hard, linear, mixture, polynomial")
        ->check(CLI::IsMember({"hard", "linear", "mixture", "polynomial"}));
    cmd->add_option("--lambda", flags.lambda, "Age parameter lambda");
    cmd->add_option("--gamma", flags.gamma, "Mixture gamma");
    cmd->add_option("--t-param", flags.t_param, "Polynomial exponent t (> 1)");
    cmd->add_option("--rounds", flags.rounds, "Boosting rounds");
    cmd->add_option("--warm-rounds", flags.warm_rounds, "Warm-start rounds");
    cmd->add_option("--warm-lambda", flags.warm_lambda, "Warm-start lambda");
    cmd->add_option("--max-depth", flags.max_depth, "Tree depth");
}

SPRegularizer make_regularizer(const BoostFlags& flags) {
    const std::optional<SPKind> kind = parse_kind(flags.regularizer);
    if (!kind) throw CLI::ValidationError("unknown regularizer " + flags.regularizer);
    switch (*kind) {
        case SPKind::Hard: return SPRegularizer::hard(flags.lambda);
        case SPKind::LinearSoft: return SPRegularizer::linear_soft(flags.lambda);
        case SPKind::Mixture: return SPRegularizer::mixture(flags.lambda, flags.gamma);
        case SPKind::PolynomialSoft:
            return SPRegularizer::polynomial_soft(flags.lambda, flags.t_param);
    }
    throw std::logic_error("unreachable");
}

BoostConfig make_config(const BoostFlags& flags, bool adaboost) {
    BoostConfig config;
    config.rounds = flags.rounds;
    config.warm_start_rounds = flags.warm_rounds;
    config.warm_lambda = flags.warm_lambda;
    config.max_depth = flags.max_depth;
    if (!adaboost) config.regularizer = make_regularizer(flags);
    config.validate();
    return config;
}

std::ofstream open_output(const std::string& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw std::runtime_error("cannot write " + path);
    return file;
}

int run_train(const std::string& source, const DataFlags& data_flags,
              const BoostFlags& boost_flags, double noise, std::uint64_t seed,
              const std::string& out) {
    Dataset data = load_source(source, data_flags, seed);
    std::vector<std::size_t> flipped;
    if (noise > 0.0) {
        FlippedData noisy = inject_noise(data, NoiseSpec{noise, derive_seed(seed, "noise")});
        data = std::move(noisy.data);
        flipped = std::move(noisy.flipped);
    }
    BoostConfig config = make_config(boost_flags, boost_flags.algo == "adaboost");
    config.seed = seed;
    const TrainResult result = train(data, config);

    save_model(result.ensemble, out + ".model.json");
    auto trace_file = open_output(out + ".trace.tsv");
    write_trajectory_tsv(trace_file, objective_trajectory(result.trace));

    std::cout << "trained " << result.ensemble.stages.size() << " rounds on "
              << data.n_rows() << " rows (" << flipped.size()
              << " labels flipped)\n"
              << "training error: " << error_rate(result.ensemble, data) << "\n"
              << "model: " << out << ".model.json\n"
              << "trace: " << out << ".trace.tsv\n";
    if (config.regularizer) {
        const auto rejected =
            rejected_samples(result.ensemble, data, *config.regularizer);
        std::cout << "rejected samples: " << rejected.size() << "\n";
    }
    return 0;
}

int run_study_cmd(const std::vector<std::string>& sources, const DataFlags& data_flags,
                  const BoostFlags& boost_flags, bool algo_set,
                  const std::string& noise_levels, int reps, int cv_folds,
                  const std::string& lambda_grid, std::uint64_t seed, int workers,
                  bool timing, const std::string& out) {
    ExperimentSpec spec;
    for (const std::string& source : sources)
        spec.datasets.push_back({source_id(source), load_source(source, data_flags, seed)});
    if (!noise_levels.empty()) spec.noise_levels = parse_list(noise_levels);
    if (!lambda_grid.empty()) spec.lambda_grid = parse_list(lambda_grid);
    spec.repetitions = reps;
    spec.cv_folds = cv_folds;
    spec.rounds_max = boost_flags.rounds;
    spec.master_seed = seed;
    spec.workers = workers;

    if (!algo_set || boost_flags.algo == "adaboost")
        spec.algorithms.push_back({"adaboost", make_config(boost_flags, true)});
    if (!algo_set || boost_flags.algo == "splboost")
        spec.algorithms.push_back({"splboost", make_config(boost_flags, false)});

    const StudyResult result = run_study(spec);

    auto records_file = open_output(out + ".records.jsonl");
    write_records_jsonl(records_file, result.records, timing);
    auto summary_file = open_output(out + ".summary.tsv");
    write_summary_tsv(summary_file, result.summary);
    write_summary_tsv(std::cout, result.summary);

    std::size_t failed = 0;
    for (const ResultRecord& rec : result.records)
        if (rec.error) ++failed;
    if (failed > 0)
        std::cerr << failed << " of " << result.records.size()
                  << " cells failed; see " << out << ".records.jsonl\n";

    if (spec.algorithms.size() >= 2) {
        try {
            const RankTable table = rank_table(result.summary);
            auto ranks_file = open_output(out + ".ranks.tsv");
            write_rank_tsv(ranks_file, table);
            if (table.cells_skipped > 0)
                std::cerr << "rank table skipped " << table.cells_skipped
                          << " incomplete cells\n";
        } catch (const std::invalid_argument& e) {
            std::cerr << "rank table not written: " << e.what() << "\n";
        }
    }
    return 0;
}

int run_curves(const std::string& regularizer, const BoostFlags& boost_flags,
               const std::string& out) {
    std::optional<SPRegularizer> reg;
    if (regularizer != "none") {
        BoostFlags flags = boost_flags;
        flags.regularizer = regularizer;
        reg = make_regularizer(flags);
    }
    const std::vector<double> grid = default_margin_grid();
    auto weights_file = open_output(out + ".weights.tsv");
    write_curve_tsv(weights_file, "effective_weight", weight_curve(reg, grid));
    auto losses_file = open_output(out + ".losses.tsv");
    write_curve_tsv(losses_file, "latent_loss", loss_curve(reg, grid));
    std::cout << "wrote " << out << ".weights.tsv and " << out << ".losses.tsv\n";
    return 0;
}

int run_synth(std::size_t n_per_class, double flip_rate, std::uint64_t seed,
              const std::string& out) {
    const FlippedData result = synth_gaussian(n_per_class, flip_rate, seed);
    save_csv(result.data, std::filesystem::path(out));
    std::cout << "wrote " << result.data.n_rows() << " rows ("
              << result.flipped.size() << " labels flipped) to " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-paced boosting for binary classification"};
    app.require_subcommand(1);

    DataFlags data_flags;
    BoostFlags boost_flags;
    std::uint64_t seed = 0;
    std::string out;
    double noise = 0.0;

    auto* train_cmd = app.add_subcommand("train", "Train one model on a dataset");
    std::string train_source;
    train_cmd->add_option("source", train_source, "CSV path or 'synth'")->required();
    add_data_flags(train_cmd, data_flags);
    add_boost_flags(train_cmd, boost_flags, false);
    train_cmd->add_option("--noise", noise, "Training label-flip rate")
        ->check(CLI::Range(0.0, 0.5));
    train_cmd->add_option("--seed", seed, "Seed");
    train_cmd->add_option("--out", out, "Output prefix")->required();

    auto* study_cmd = app.add_subcommand(
        "study", "Noise-robustness study: split, inject noise, CV, retrain, test");
    std::vector<std::string> study_sources;
    std::string noise_levels, lambda_grid;
    int reps = 10, cv_folds = 5, workers = 1;
    bool timing = false;
    study_cmd->add_option("sources", study_sources, "CSV paths and/or 'synth'")
        ->required();
    add_data_flags(study_cmd, data_flags);
    add_boost_flags(study_cmd, boost_flags, true);
    study_cmd->add_option("--noise-levels", noise_levels,
                          "Comma-separated rates (default 0,0.05,0.1,0.2,0.3)");
    study_cmd->add_option("--reps", reps, "Repetitions per cell");
    study_cmd->add_option("--cv-folds", cv_folds, "Cross-validation folds");
    study_cmd->add_option("--lambda-grid", lambda_grid,
                          "Comma-separated lambda grid (default 1.0..6.0 step 0.5)");
    study_cmd->add_option("--seed", seed, "Master seed");
    study_cmd->add_option("--workers", workers, "Concurrent study cells");
    study_cmd->add_flag("--timing", timing, "Record wall_time in the JSONL output");
    study_cmd->add_option("--out", out, "Output prefix")->required();

    auto* curves_cmd =
        app.add_subcommand("curves", "Write weight/loss curve TSVs for a scheme");
    std::string curve_reg = "hard";
    curves_cmd->add_option("--regularizer", curve_reg,
                           "hard, linear, mixture, polynomial, or none")
        ->check(CLI::IsMember({"hard", "linear", "mixture", "polynomial", "none"}));
    curves_cmd->add_option("--lambda", boost_flags.lambda, "Age parameter lambda");
    curves_cmd->add_option("--gamma", boost_flags.gamma, "Mixture gamma");
    curves_cmd->add_option("--t-param", boost_flags.t_param, "Polynomial exponent");
    curves_cmd->add_option("--out", out, "Output prefix")->required();

    auto* synth_cmd =
        app.add_subcommand("synth", "Generate the two-Gaussian dataset as CSV");
    std::size_t n_per_class = 100;
    double flip_rate = 0.15;
    synth_cmd->add_option("--n-per-class", n_per_class, "Rows per class");
    synth_cmd->add_option("--noise", flip_rate, "Per-class label-flip rate")
        ->check(CLI::Range(0.0, 0.5));
    synth_cmd->add_option("--seed", seed, "Seed");
    synth_cmd->add_option("--out", out, "Output CSV path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (train_cmd->parsed())
            return run_train(train_source, data_flags, boost_flags, noise, seed, out);
        if (study_cmd->parsed())
            return run_study_cmd(study_sources, data_flags, boost_flags,
                                 study_cmd->count("--algo") > 0, noise_levels, reps,
                                 cv_folds, lambda_grid, seed, workers, timing, out);
        if (curves_cmd->parsed()) return run_curves(curve_reg, boost_flags, out);
        if (synth_cmd->parsed()) return run_synth(n_per_class, flip_rate, seed, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
