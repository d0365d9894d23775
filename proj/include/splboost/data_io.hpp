#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "splboost/dataset.hpp"

namespace splboost {

// Label-flip noise: flips round(rate * n) labels chosen uniformly without
// replacement. Applied to training partitions only; callers keep test clean.
struct NoiseSpec {
    double rate = 0.0;
    std::uint64_t seed = 0;
};

struct SplitSpec {
    double train_fraction = 0.7;
    int folds = 5;
    std::uint64_t seed = 0;
};

class FormatError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct LabelColumn {
    std::optional<std::string> name;
    std::optional<std::size_t> index;

    static LabelColumn by_name(std::string n) { return {std::move(n), std::nullopt}; }
    static LabelColumn by_index(std::size_t i) { return {std::nullopt, i}; }
};

// Comma-separated, '.' decimal, optional header row (required when the label
// column is referenced by name). The label column must hold exactly two
// distinct values; positive_label maps to +1, the other value to -1.
Dataset load_csv(const std::filesystem::path& path, const LabelColumn& label,
                 const std::string& positive_label);

void save_csv(const Dataset& data, std::ostream& out);
void save_csv(const Dataset& data, const std::filesystem::path& path);

struct FlippedData {
    Dataset data;
    std::vector<std::size_t> flipped;  // sorted row indices
};

// Two overlapping 2-D Gaussians, n_per_class rows each: rows [0, n) are the
// positive class N([2,-2], [[2.5,1.5],[1.5,5]]), rows [n, 2n) the negative
// class N([-2,2], [[2.3,-0.7],[-0.7,2.3]]). Exactly round(flip_rate * n)
// labels per class are flipped.
FlippedData synth_gaussian(std::size_t n_per_class, double flip_rate,
                           std::uint64_t seed);

FlippedData inject_noise(const Dataset& data, const NoiseSpec& spec);

struct TrainTestSplit {
    Dataset train;
    Dataset test;
    std::vector<std::size_t> train_rows;  // original row indices
    std::vector<std::size_t> test_rows;
};

// Seeded shuffle; the first round(train_fraction * n) rows become train.
TrainTestSplit split(const Dataset& data, const SplitSpec& spec);

struct FoldPartition {
    std::vector<std::size_t> train_rows;
    std::vector<std::size_t> val_rows;
};

// Partitions rows into `spec.folds` near-equal validation groups.
std::vector<FoldPartition> folds(const Dataset& data, const SplitSpec& spec);

}  // namespace splboost
