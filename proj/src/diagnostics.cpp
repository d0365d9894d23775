#include "splboost/diagnostics.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>

namespace splboost {

namespace {

void check_grid(std::span<const double> grid) {
    for (double m : grid)
        if (!std::isfinite(m))
            throw std::invalid_argument("margin grid must be finite");
}

// '#' keeps trailing zeros so every value carries 12 significant digits.
std::string format_value(double x) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%#.12g", x);
    return buf;
}

}  // namespace

std::vector<double> default_margin_grid() {
    std::vector<double> grid(601);
    for (std::size_t i = 0; i < grid.size(); ++i)
        grid[i] = -3.0 + static_cast<double>(i) * 0.01;
    return grid;
}

std::vector<CurvePoint> weight_curve(const std::optional<SPRegularizer>& reg,
                                     std::span<const double> margin_grid) {
    check_grid(margin_grid);
    std::vector<CurvePoint> curve;
    curve.reserve(margin_grid.size());
    for (double m : margin_grid) {
        const double loss = std::exp(-m);
        const double v = reg ? latent_weight(*reg, loss) : 1.0;
        curve.push_back({m, v * loss});
    }
    return curve;
}

std::vector<CurvePoint> loss_curve(const std::optional<SPRegularizer>& reg,
                                   std::span<const double> margin_grid) {
    check_grid(margin_grid);
    std::vector<CurvePoint> curve;
    curve.reserve(margin_grid.size());
    for (double m : margin_grid) {
        const double loss = std::exp(-m);
        curve.push_back({m, reg ? latent_loss(*reg, loss) : loss});
    }
    return curve;
}

std::vector<TrajectoryRow> objective_trajectory(const TrainTrace& trace) {
    std::vector<TrajectoryRow> rows;
    rows.reserve(trace.rounds.size());
    for (std::size_t t = 0; t < trace.rounds.size(); ++t) {
        const RoundRecord& r = trace.rounds[t];
        rows.push_back({static_cast<int>(t) + 1, r.latent_objective, r.err,
                        r.alpha, r.zero_weight_count});
    }
    return rows;
}

std::vector<std::size_t> rejected_samples(const Ensemble& ensemble,
                                          const Dataset& data,
                                          const SPRegularizer& reg) {
    const std::vector<double> losses = exp_losses(ensemble, data);
    std::vector<std::size_t> rejected;
    for (std::size_t i = 0; i < losses.size(); ++i)
        if (latent_weight(reg, losses[i]) == 0.0) rejected.push_back(i);
    return rejected;
}

void write_curve_tsv(std::ostream& out, std::string_view value_name,
                     const std::vector<CurvePoint>& curve) {
    out << "margin\t" << value_name << "\n";
    for (const CurvePoint& point : curve)
        out << format_value(point.margin) << '\t' << format_value(point.value) << '\n';
}

void write_trajectory_tsv(std::ostream& out,
                          const std::vector<TrajectoryRow>& rows) {
    out << "round\tlatent_objective\terr\talpha\tzero_weight_count\n";
    for (const TrajectoryRow& r : rows)
        out << r.round << '\t' << format_value(r.latent_objective) << '\t'
            << format_value(r.err) << '\t' << format_value(r.alpha) << '\t'
            << r.zero_weight_count << '\n';
}

}  // namespace splboost
