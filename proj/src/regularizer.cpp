#include "splboost/regularizer.hpp"

#include <cmath>
#include <stdexcept>

namespace splboost {

namespace {

void check_loss(double loss) {
    if (!(loss >= 0.0) || !std::isfinite(loss))
        throw std::invalid_argument("loss must be finite and >= 0");
}

// Lower breakpoint of the mixture scheme: full weight is kept up to this loss.
double mixture_knee(const SPRegularizer& reg) {
    const double r = reg.lambda * reg.gamma / (reg.lambda + reg.gamma);
    return r * r;
}

}  // namespace

SPRegularizer SPRegularizer::hard(double lambda) {
    SPRegularizer reg{SPKind::Hard, lambda, 1.0, 2.0};
    reg.validate();
    return reg;
}

SPRegularizer SPRegularizer::linear_soft(double lambda) {
    SPRegularizer reg{SPKind::LinearSoft, lambda, 1.0, 2.0};
    reg.validate();
    return reg;
}

SPRegularizer SPRegularizer::mixture(double lambda, double gamma) {
    SPRegularizer reg{SPKind::Mixture, lambda, gamma, 2.0};
    reg.validate();
    return reg;
}

SPRegularizer SPRegularizer::polynomial_soft(double lambda, double t) {
    SPRegularizer reg{SPKind::PolynomialSoft, lambda, 1.0, t};
    reg.validate();
    return reg;
}

SPRegularizer SPRegularizer::with_lambda(double lambda) const {
    SPRegularizer reg = *this;
    reg.lambda = lambda;
    reg.validate();
    return reg;
}

void SPRegularizer::validate() const {
    if (!(lambda > 0.0) || !std::isfinite(lambda))
        throw std::invalid_argument("lambda must be finite and > 0");
    if (kind == SPKind::Mixture && (!(gamma > 0.0) || !std::isfinite(gamma)))
        throw std::invalid_argument("gamma must be finite and > 0");
    if (kind == SPKind::PolynomialSoft && (!(t > 1.0) || !std::isfinite(t)))
        throw std::invalid_argument("t must be finite and > 1");
}

double penalty(const SPRegularizer& reg, double v) {
    if (!(v >= 0.0 && v <= 1.0))
        throw std::invalid_argument("penalty argument must lie in [0, 1]");
    switch (reg.kind) {
        case SPKind::Hard:
            return -reg.lambda * v;
        case SPKind::LinearSoft:
            return reg.lambda * (0.5 * v * v - v);
        case SPKind::Mixture:
            return reg.gamma * reg.gamma / (v + reg.gamma / reg.lambda);
        case SPKind::PolynomialSoft:
            return reg.lambda * (std::pow(v, reg.t) / reg.t - v);
    }
    throw std::logic_error("unreachable");
}

double latent_weight(const SPRegularizer& reg, double loss) {
    check_loss(loss);
    const double lam = reg.lambda;
    switch (reg.kind) {
        case SPKind::Hard:
            return loss < lam ? 1.0 : 0.0;
        case SPKind::LinearSoft:
            return loss < lam ? 1.0 - loss / lam : 0.0;
        case SPKind::Mixture: {
            if (loss <= mixture_knee(reg)) return 1.0;
            if (loss >= lam * lam) return 0.0;
            return reg.gamma * (1.0 / std::sqrt(loss) - 1.0 / lam);
        }
        case SPKind::PolynomialSoft: {
            if (loss >= lam) return 0.0;
            return std::pow(1.0 - loss / lam, 1.0 / (reg.t - 1.0));
        }
    }
    throw std::logic_error("unreachable");
}

double latent_loss(const SPRegularizer& reg, double loss) {
    check_loss(loss);
    const double lam = reg.lambda;
    switch (reg.kind) {
        case SPKind::Hard:
            return std::min(loss, lam);
        case SPKind::LinearSoft:
            if (loss < lam) return loss - loss * loss / (2.0 * lam);
            return 0.5 * lam;
        case SPKind::Mixture: {
            const double knee = mixture_knee(reg);
            if (loss <= knee) return loss;
            const double upper = std::min(loss, lam * lam);
            return knee + 2.0 * reg.gamma * (std::sqrt(upper) - std::sqrt(knee)) -
                   reg.gamma * (upper - knee) / lam;
        }
        case SPKind::PolynomialSoft: {
            const double plateau = lam * (reg.t - 1.0) / reg.t;
            if (loss >= lam) return plateau;
            const double u = 1.0 - loss / lam;
            return plateau * (1.0 - std::pow(u, reg.t / (reg.t - 1.0)));
        }
    }
    throw std::logic_error("unreachable");
}

double oracle_weight(const SPRegularizer& reg, double loss, double grid_step) {
    check_loss(loss);
    if (!(grid_step > 0.0 && grid_step <= 0.01))
        throw std::invalid_argument("grid_step must lie in (0, 0.01]");
    double best_v = 0.0;
    double best_obj = penalty(reg, 0.0);
    const auto consider = [&](double v) {
        const double obj = v * loss + penalty(reg, v);
        if (obj < best_obj) {
            best_obj = obj;
            best_v = v;
        }
    };
    const auto n_steps = static_cast<long long>(std::floor(1.0 / grid_step));
    double v = 0.0;
    for (long long i = 1; i <= n_steps; ++i) {
        v = static_cast<double>(i) * grid_step;
        if (v > 1.0) {
            v = 1.0;
            consider(v);
            break;
        }
        consider(v);
    }
    if (v < 1.0) consider(1.0);
    return best_v;
}

std::string to_string(SPKind kind) {
    switch (kind) {
        case SPKind::Hard: return "hard";
        case SPKind::LinearSoft: return "linear";
        case SPKind::Mixture: return "mixture";
        case SPKind::PolynomialSoft: return "polynomial";
    }
    throw std::logic_error("unreachable");
}

std::optional<SPKind> parse_kind(std::string_view name) {
    if (name == "hard") return SPKind::Hard;
    if (name == "linear") return SPKind::LinearSoft;
    if (name == "mixture") return SPKind::Mixture;
    if (name == "polynomial") return SPKind::PolynomialSoft;
    return std::nullopt;
}

}  // namespace splboost
