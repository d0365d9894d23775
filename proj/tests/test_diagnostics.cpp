#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "splboost/boosting.hpp"
#include "splboost/diagnostics.hpp"
#include "support/datasets.hpp"

using namespace splboost;

TEST_CASE("margin grid covers [-3, 3] at 0.01 steps") {
    const std::vector<double> grid = default_margin_grid();
    REQUIRE(grid.size() == 601);
    CHECK(grid.front() == doctest::Approx(-3.0).epsilon(1e-15));
    CHECK(grid.back() == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(grid[300] == doctest::Approx(0.0).epsilon(1e-12));
    for (std::size_t i = 1; i < grid.size(); ++i)
        CHECK(grid[i] - grid[i - 1] == doctest::Approx(0.01).epsilon(1e-9));
}

TEST_CASE("weight curve without a regularizer is the exponential weight") {
    const std::vector<double> grid = default_margin_grid();
    const std::vector<CurvePoint> curve = weight_curve(std::nullopt, grid);
    REQUIRE(curve.size() == grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        CHECK(curve[i].margin == grid[i]);
        CHECK(curve[i].value ==
              doctest::Approx(std::exp(-grid[i])).epsilon(1e-14));
    }
    CHECK(curve[300].value == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("hard threshold silences the weight curve at low margins") {
    const SPRegularizer reg = SPRegularizer::hard(3.0);
    const std::vector<double> grid = default_margin_grid();
    const std::vector<CurvePoint> curve = weight_curve(reg, grid);
    const std::vector<CurvePoint> plain = weight_curve(std::nullopt, grid);
    const double cutoff = -std::log(3.0);  // e^{-m} = 3 at m = -ln 3
    for (std::size_t i = 0; i < grid.size(); ++i) {
        if (grid[i] < cutoff - 1e-9)
            CHECK(curve[i].value == 0.0);
        else if (grid[i] > cutoff + 1e-9)
            CHECK(curve[i].value == plain[i].value);
    }
    CHECK(weight_curve(reg, std::vector<double>{-2.0})[0].value == 0.0);
    CHECK(weight_curve(reg, std::vector<double>{0.0})[0].value ==
          doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("soft schemes taper the weight curve instead of cutting it") {
    const SPRegularizer reg = SPRegularizer::linear_soft(3.0);
    const std::vector<CurvePoint> curve = weight_curve(reg, default_margin_grid());
    for (const CurvePoint& point : curve) {
        const double loss = std::exp(-point.margin);
        const double expected = loss < 3.0 ? (1.0 - loss / 3.0) * loss : 0.0;
        CHECK(point.value == doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("loss curve saturates at the rejection plateau") {
    const SPRegularizer reg = SPRegularizer::hard(3.0);
    const std::vector<double> probes{-3.0, -std::log(3.0) - 0.5, 0.0, 2.9};
    const std::vector<CurvePoint> curve = loss_curve(reg, probes);
    CHECK(curve[0].value == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(curve[1].value == doctest::Approx(3.0).epsilon(1e-14));
    CHECK(curve[2].value == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(curve[3].value == doctest::Approx(std::exp(-2.9)).epsilon(1e-12));

    const std::vector<CurvePoint> plain = loss_curve(std::nullopt, probes);
    CHECK(plain[0].value == doctest::Approx(std::exp(3.0)).epsilon(1e-12));
}

TEST_CASE("loss curves are non-increasing in the margin") {
    const std::vector<double> grid = default_margin_grid();
    const std::vector<std::optional<SPRegularizer>> schemes{
        std::nullopt, SPRegularizer::hard(2.0), SPRegularizer::linear_soft(2.0),
        SPRegularizer::mixture(2.0, 1.0), SPRegularizer::polynomial_soft(2.0, 4.0)};
    for (const auto& scheme : schemes) {
        const std::vector<CurvePoint> curve = loss_curve(scheme, grid);
        for (std::size_t i = 1; i < curve.size(); ++i)
            CHECK(curve[i].value <= curve[i - 1].value + 1e-12);
    }
}

TEST_CASE("objective trajectory mirrors the trace") {
    CHECK(objective_trajectory(TrainTrace{}).empty());

    const Dataset data = test_support::random_dataset(2500, 30, 2);
    BoostConfig config;
    config.rounds = 5;
    config.regularizer = SPRegularizer::hard(3.0);
    config.warm_start_rounds = 2;
    config.max_depth = 1;
    const TrainResult result = train(data, config);
    const std::vector<TrajectoryRow> rows = objective_trajectory(result.trace);
    REQUIRE(rows.size() == 5);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows[i].round == static_cast<int>(i) + 1);
        CHECK(rows[i].latent_objective == result.trace.rounds[i].latent_objective);
        CHECK(rows[i].err == result.trace.rounds[i].err);
        CHECK(rows[i].alpha == result.trace.rounds[i].alpha);
        CHECK(rows[i].zero_weight_count == result.trace.rounds[i].zero_weight_count);
    }
}

TEST_CASE("rejected_samples matches the zero set of the latent weights") {
    const Dataset data = test_support::random_dataset(2600, 40, 2, 0.3);
    BoostConfig config;
    config.rounds = 10;
    config.max_depth = 1;
    const TrainResult result = train(data, config);

    CHECK(rejected_samples(result.ensemble, data, SPRegularizer::hard(1e12)).empty());

    const std::vector<std::size_t> all =
        rejected_samples(Ensemble{}, data, SPRegularizer::hard(0.5));
    REQUIRE(all.size() == data.n_rows());  // empty ensemble: every loss is 1

    const std::vector<double> losses = exp_losses(result.ensemble, data);
    const std::vector<std::size_t> rejected =
        rejected_samples(result.ensemble, data, SPRegularizer::hard(2.0));
    for (std::size_t i = 0; i < data.n_rows(); ++i) {
        const bool in = std::find(rejected.begin(), rejected.end(), i) != rejected.end();
        CHECK(in == (latent_weight(SPRegularizer::hard(2.0), losses[i]) == 0.0));
    }

    // Raising lambda can only shrink the rejected set.
    std::vector<std::size_t> previous =
        rejected_samples(result.ensemble, data, SPRegularizer::hard(1.2));
    for (double lambda : {2.0, 3.5, 6.0}) {
        const std::vector<std::size_t> current =
            rejected_samples(result.ensemble, data, SPRegularizer::hard(lambda));
        CHECK(std::includes(previous.begin(), previous.end(), current.begin(),
                            current.end()));
        previous = current;
    }
}

TEST_CASE("curve TSV layout") {
    std::ostringstream out;
    write_curve_tsv(out, "weight",
                    {{-3.0, 1.0}, {0.5, 0.125}});
    const std::string text = out.str();
    CHECK(text.find("margin\tweight\n") == 0);
    CHECK(text.find("\r") == std::string::npos);
    CHECK(text.find("-3.00000000000\t1.00000000000\n") != std::string::npos);
    CHECK(text.find("0.500000000000\t0.125000000000\n") != std::string::npos);
    CHECK(text.back() == '\n');
}

TEST_CASE("trajectory TSV layout") {
    std::ostringstream out;
    write_trajectory_tsv(out, {{1, 2.5, 0.25, 0.5493, 3}});
    const std::string text = out.str();
    CHECK(text.find("round\tlatent_objective\terr\talpha\tzero_weight_count\n") == 0);
    CHECK(text.find("\n1\t2.50000000000\t0.250000000000\t0.549300000000\t3\n") !=
          std::string::npos);
}
