#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "splboost/boosting.hpp"
#include "splboost/ensemble.hpp"
#include "splboost/regularizer.hpp"

namespace splboost {

struct CurvePoint {
    double margin = 0.0;
    double value = 0.0;
};

// 601 evenly spaced margins on [-3, 3].
std::vector<double> default_margin_grid();

// Effective weight v*(lambda; e^{-m}) * e^{-m} a sample with margin m
// receives. With no regularizer this is the AdaBoost weight e^{-m}.
std::vector<CurvePoint> weight_curve(const std::optional<SPRegularizer>& reg,
                                     std::span<const double> margin_grid);

// Latent loss at e^{-m}; without a regularizer, the exponential loss itself.
std::vector<CurvePoint> loss_curve(const std::optional<SPRegularizer>& reg,
                                   std::span<const double> margin_grid);

struct TrajectoryRow {
    int round = 0;
    double latent_objective = 0.0;
    double err = 0.0;
    double alpha = 0.0;
    int zero_weight_count = 0;
};

std::vector<TrajectoryRow> objective_trajectory(const TrainTrace& trace);

// Indices whose latent weight is exactly 0 under the ensemble's losses.
std::vector<std::size_t> rejected_samples(const Ensemble& ensemble,
                                          const Dataset& data,
                                          const SPRegularizer& reg);

void write_curve_tsv(std::ostream& out, std::string_view value_name,
                     const std::vector<CurvePoint>& curve);
void write_trajectory_tsv(std::ostream& out,
                          const std::vector<TrajectoryRow>& rows);

}  // namespace splboost
