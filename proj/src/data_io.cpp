#include "splboost/data_io.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "splboost/rng.hpp"

namespace splboost {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream stream(line);
    while (std::getline(stream, cell, ',')) cells.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') cells.push_back("");
    return cells;
}

bool parse_double(const std::string& s, double& out) {
    if (s.empty()) return false;
    const char* begin = s.data();
    const char* end = begin + s.size();
    const auto result = std::from_chars(begin, end, out);
    return result.ec == std::errc() && result.ptr == end && std::isfinite(out);
}

[[noreturn]] void fail(const std::filesystem::path& path, std::size_t row,
                       const std::string& message) {
    throw FormatError(path.string() + ":" + std::to_string(row) + ": " + message);
}

std::size_t flip_count(double rate, std::size_t n) {
    return static_cast<std::size_t>(std::llround(rate * static_cast<double>(n)));
}

std::vector<std::size_t> sorted_sample(Rng& rng, std::size_t n, std::size_t k) {
    std::vector<std::size_t> picked = rng.sample_without_replacement(n, k);
    std::sort(picked.begin(), picked.end());
    return picked;
}

}  // namespace

Dataset load_csv(const std::filesystem::path& path, const LabelColumn& label,
                 const std::string& positive_label) {
    std::ifstream file(path);
    if (!file) throw FormatError("cannot open " + path.string());

    std::vector<std::string> lines;
    std::string line;
    while (std::getline(file, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (!trim(line).empty()) lines.push_back(line);
    }
    if (lines.empty()) fail(path, 0, "empty file");

    const std::vector<std::string> first = split_line(lines[0]);
    const std::size_t n_cols_total = first.size();
    if (n_cols_total < 2) fail(path, 1, "need at least one feature and a label column");

    std::size_t label_index = 0;
    std::size_t first_data_row = 0;  // index into `lines`
    if (label.name) {
        const auto it = std::find(first.begin(), first.end(), *label.name);
        if (it == first.end())
            fail(path, 1, "no column named '" + *label.name + "' in header");
        label_index = static_cast<std::size_t>(it - first.begin());
        first_data_row = 1;
    } else {
        label_index = label.index.value_or(n_cols_total - 1);
        if (label_index >= n_cols_total)
            fail(path, 1, "label column index " + std::to_string(label_index) +
                              " out of range for " + std::to_string(n_cols_total) +
                              " columns");
        // Header sniffing: if any non-label cell of the first row is not
        // numeric, treat the row as a header.
        double ignored;
        for (std::size_t c = 0; c < n_cols_total; ++c) {
            if (c == label_index) continue;
            if (!parse_double(first[c], ignored)) {
                first_data_row = 1;
                break;
            }
        }
    }
    if (first_data_row >= lines.size()) fail(path, lines.size(), "no data rows");

    const std::size_t d = n_cols_total - 1;
    std::vector<double> features;
    std::vector<std::string> raw_labels;
    features.reserve((lines.size() - first_data_row) * d);
    for (std::size_t r = first_data_row; r < lines.size(); ++r) {
        const std::vector<std::string> cells = split_line(lines[r]);
        if (cells.size() != n_cols_total)
            fail(path, r + 1, "expected " + std::to_string(n_cols_total) +
                                  " columns, got " + std::to_string(cells.size()));
        for (std::size_t c = 0; c < n_cols_total; ++c) {
            if (c == label_index) {
                raw_labels.push_back(cells[c]);
                continue;
            }
            double value;
            if (!parse_double(cells[c], value))
                fail(path, r + 1, "column " + std::to_string(c + 1) +
                                      ": '" + cells[c] + "' is not numeric");
            features.push_back(value);
        }
    }

    std::vector<std::string> distinct;
    for (const std::string& value : raw_labels)
        if (std::find(distinct.begin(), distinct.end(), value) == distinct.end())
            distinct.push_back(value);
    if (distinct.size() != 2)
        fail(path, lines.size(),
             "label column has " + std::to_string(distinct.size()) +
                 " distinct values, expected exactly 2");
    if (std::find(distinct.begin(), distinct.end(), positive_label) == distinct.end())
        fail(path, lines.size(),
             "positive label '" + positive_label + "' not present (values: '" +
                 distinct[0] + "', '" + distinct[1] + "')");

    std::vector<int> labels;
    labels.reserve(raw_labels.size());
    for (const std::string& value : raw_labels)
        labels.push_back(value == positive_label ? 1 : -1);
    const std::size_t n_rows = labels.size();
    return Dataset(n_rows, d, std::move(features), std::move(labels));
}

void save_csv(const Dataset& data, std::ostream& out) {
    for (std::size_t c = 0; c < data.n_cols(); ++c) out << 'f' << c << ',';
    out << "label\n";
    char buf[40];
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        for (std::size_t c = 0; c < data.n_cols(); ++c) {
            std::snprintf(buf, sizeof(buf), "%.17g", data.feature(i, c));
            out << buf << ',';
        }
        out << data.label(i) << '\n';
    }
}

void save_csv(const Dataset& data, const std::filesystem::path& path) {
    std::ofstream file(path, std::ios::binary);
    if (!file) throw FormatError("cannot write " + path.string());
    save_csv(data, file);
}

FlippedData synth_gaussian(std::size_t n_per_class, double flip_rate,
                           std::uint64_t seed) {
    if (n_per_class == 0) throw std::invalid_argument("n_per_class must be >= 1");
    if (!(flip_rate >= 0.0 && flip_rate <= 0.5))
        throw std::invalid_argument("flip_rate must lie in [0, 0.5]");

    Eigen::Matrix2d cov_pos, cov_neg;
    cov_pos << 2.5, 1.5, 1.5, 5.0;
    cov_neg << 2.3, -0.7, -0.7, 2.3;
    const Eigen::Vector2d mean_pos(2.0, -2.0);
    const Eigen::Vector2d mean_neg(-2.0, 2.0);
    const Eigen::Matrix2d l_pos = Eigen::LLT<Eigen::Matrix2d>(cov_pos).matrixL();
    const Eigen::Matrix2d l_neg = Eigen::LLT<Eigen::Matrix2d>(cov_neg).matrixL();

    const std::size_t n = 2 * n_per_class;
    std::vector<double> features(n * 2);
    std::vector<int> labels(n);
    const auto draw_class = [&](const Eigen::Vector2d& mean, const Eigen::Matrix2d& l,
                                int label, std::size_t offset, Rng& rng) {
        for (std::size_t i = 0; i < n_per_class; ++i) {
            const auto [z0, z1] = rng.normal_pair();
            const Eigen::Vector2d x = mean + l * Eigen::Vector2d(z0, z1);
            features[(offset + i) * 2] = x(0);
            features[(offset + i) * 2 + 1] = x(1);
            labels[offset + i] = label;
        }
    };
    Rng rng_pos(derive_seed(seed, "synth-pos"));
    Rng rng_neg(derive_seed(seed, "synth-neg"));
    draw_class(mean_pos, l_pos, 1, 0, rng_pos);
    draw_class(mean_neg, l_neg, -1, n_per_class, rng_neg);

    const std::size_t k = flip_count(flip_rate, n_per_class);
    Rng rng_flip_pos(derive_seed(seed, "synth-flip-pos"));
    Rng rng_flip_neg(derive_seed(seed, "synth-flip-neg"));
    std::vector<std::size_t> flipped = sorted_sample(rng_flip_pos, n_per_class, k);
    for (std::size_t i : sorted_sample(rng_flip_neg, n_per_class, k))
        flipped.push_back(n_per_class + i);
    for (std::size_t i : flipped) labels[i] = -labels[i];

    return {Dataset(n, 2, std::move(features), std::move(labels)), std::move(flipped)};
}

FlippedData inject_noise(const Dataset& data, const NoiseSpec& spec) {
    if (!(spec.rate >= 0.0 && spec.rate <= 0.5))
        throw std::invalid_argument("noise rate must lie in [0, 0.5]");
    const std::size_t k = flip_count(spec.rate, data.n_rows());
    Rng rng(derive_seed(spec.seed, "noise"));
    std::vector<std::size_t> flipped = sorted_sample(rng, data.n_rows(), k);
    return {data.with_flipped_labels(flipped), std::move(flipped)};
}

TrainTestSplit split(const Dataset& data, const SplitSpec& spec) {
    if (!(spec.train_fraction > 0.0 && spec.train_fraction < 1.0))
        throw std::invalid_argument("train_fraction must lie in (0, 1)");
    const std::size_t n = data.n_rows();
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    Rng rng(derive_seed(spec.seed, "split"));
    rng.shuffle(perm);

    const std::size_t n_train =
        static_cast<std::size_t>(std::llround(spec.train_fraction * static_cast<double>(n)));
    if (n_train == 0 || n_train >= n)
        throw std::invalid_argument("split would leave an empty partition");
    TrainTestSplit result;
    result.train_rows.assign(perm.begin(), perm.begin() + n_train);
    result.test_rows.assign(perm.begin() + n_train, perm.end());
    result.train = subset(data, result.train_rows);
    result.test = subset(data, result.test_rows);
    return result;
}

std::vector<FoldPartition> folds(const Dataset& data, const SplitSpec& spec) {
    if (spec.folds < 2) throw std::invalid_argument("folds must be >= 2");
    const std::size_t n = data.n_rows();
    if (n < static_cast<std::size_t>(spec.folds))
        throw std::invalid_argument("need at least one row per fold");
    std::vector<std::size_t> perm(n);
    for (std::size_t i = 0; i < n; ++i) perm[i] = i;
    Rng rng(derive_seed(spec.seed, "folds"));
    rng.shuffle(perm);

    const std::size_t n_folds = static_cast<std::size_t>(spec.folds);
    const std::size_t base = n / n_folds;
    const std::size_t extra = n % n_folds;
    std::vector<FoldPartition> parts(n_folds);
    std::size_t start = 0;
    for (std::size_t g = 0; g < n_folds; ++g) {
        const std::size_t size = base + (g < extra ? 1 : 0);
        parts[g].val_rows.assign(perm.begin() + start, perm.begin() + start + size);
        start += size;
    }
    for (std::size_t g = 0; g < n_folds; ++g) {
        for (std::size_t other = 0; other < n_folds; ++other)
            if (other != g)
                parts[g].train_rows.insert(parts[g].train_rows.end(),
                                           parts[other].val_rows.begin(),
                                           parts[other].val_rows.end());
        std::sort(parts[g].train_rows.begin(), parts[g].train_rows.end());
        std::sort(parts[g].val_rows.begin(), parts[g].val_rows.end());
    }
    return parts;
}

}  // namespace splboost
