#pragma once

#include <optional>
#include <string>
#include <string_view>

namespace splboost {

// Self-paced penalty family. Each kind has a closed-form minimizer
//   v*(lambda; loss) = argmin_{v in [0,1]}  v * loss + penalty(v)
// and a latent loss, the integral of v* from 0 to `loss`.
enum class SPKind { Hard, LinearSoft, Mixture, PolynomialSoft };

struct SPRegularizer {
    SPKind kind = SPKind::Hard;
    double lambda = 1.0;
    double gamma = 1.0;  // Mixture only
    double t = 2.0;      // PolynomialSoft only, t > 1

    static SPRegularizer hard(double lambda);
    static SPRegularizer linear_soft(double lambda);
    static SPRegularizer mixture(double lambda, double gamma);
    static SPRegularizer polynomial_soft(double lambda, double t);

    // Same scheme with the age parameter replaced.
    SPRegularizer with_lambda(double lambda) const;

    void validate() const;
};

// Penalty value f(v) for v in [0, 1].
double penalty(const SPRegularizer& reg, double v);

// Closed-form minimizer of v * loss + penalty(v) over [0, 1].
double latent_weight(const SPRegularizer& reg, double loss);

// Integral of latent_weight over [0, loss].
double latent_loss(const SPRegularizer& reg, double loss);

// Grid argmin of v * loss + penalty(v) over {0, step, 2*step, ..., 1}.
// Reference implementation for cross-checking latent_weight; requires
// grid_step in (0, 0.01]. Ties keep the smallest v.
double oracle_weight(const SPRegularizer& reg, double loss, double grid_step);

std::string to_string(SPKind kind);
std::optional<SPKind> parse_kind(std::string_view name);

}  // namespace splboost
