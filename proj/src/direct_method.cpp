#include "modstab/direct_method.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "modstab/error.hpp"

namespace modstab {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr int max_series_terms = 4000;

struct Scaling {
    double arg, out, shift;
};

Scaling scaling_for(LimitMode mode, const FunctionHandle& phi, const EquationParams& params, int n) {
    if (n < 0) throw ArgumentError("approximant order must be nonnegative");
    const double step = static_cast<double>(n) / params.s;
    if (mode == LimitMode::contract) return {std::exp2(-step), std::ldexp(1.0, n), 0.0};
    return {std::exp2(step), std::ldexp(1.0, -n), params.q * phi(0.0)};
}

double apply(const FunctionHandle& phi, const Scaling& sc, int n, double x) {
    const double v = sc.out * (phi(sc.arg * x) - sc.shift);
    if (!std::isfinite(v)) throw SaturationError("approximant left the finite range", n);
    return v;
}

}  // namespace

const char* to_string(LimitMode mode) { return mode == LimitMode::contract ? "contract" : "expand"; }

double approximant_contract(const FunctionHandle& phi, const EquationParams& params, int n, double x) {
    return apply(phi, scaling_for(LimitMode::contract, phi, params, n), n, x);
}

double approximant_expand(const FunctionHandle& phi, const EquationParams& params, int n, double x) {
    return apply(phi, scaling_for(LimitMode::expand, phi, params, n), n, x);
}

FunctionHandle approximant_function(LimitMode mode, const FunctionHandle& phi, const EquationParams& params, int n) {
    const auto sc = scaling_for(mode, phi, params, n);
    return FunctionHandle::rescaled(phi, sc.arg, sc.out, sc.shift);
}

LimitResult construct_limit(LimitMode mode, const FunctionHandle& phi, const EquationParams& params,
                            const ModularSpec& rho, const SampleGrid& grid, const LimitOptions& options) {
    if (!(options.tol > 0.0)) throw ArgumentError("limit tolerance must be positive");
    if (options.n_max < 1) throw ArgumentError("n_max must be at least 1");
    if (options.window < 1) throw ArgumentError("stability window must be at least 1");
    if (mode == LimitMode::contract && !rho.delta2_tau())
        throw ContractViolation("the contracting construction requires a modular with a Delta_2 constant");

    auto approx = [&](int n, double x) {
        return mode == LimitMode::contract ? approximant_contract(phi, params, n, x)
                                           : approximant_expand(phi, params, n, x);
    };

    LimitResult result;
    result.mode = mode;
    result.grid = grid;
    const std::size_t m = grid.size();
    result.values.resize(m);
    result.cauchy_gap.assign(m, inf);
    result.frozen.assign(m, false);
    for (std::size_t i = 0; i < m; ++i) {
        try {
            result.values[i] = approx(0, grid[i]);
        } catch (const SaturationError&) {
            throw EvaluationError("function is not finite on the grid", grid[i]);
        }
    }

    int streak = 0;
    for (int n = 0; n < options.n_max && streak < options.window; ++n) {
        bool all_under = true;
        for (std::size_t i = 0; i < m; ++i) {
            if (result.frozen[i]) continue;
            double next = 0.0;
            try {
                next = approx(n + 1, grid[i]);
            } catch (const SaturationError&) {
                result.frozen[i] = true;
                result.saturated = true;
                continue;
            }
            const double gap = rho_saturating(rho, next - result.values[i]);
            result.cauchy_gap[i] = gap;
            result.values[i] = next;
            if (!(gap < options.tol)) all_under = false;
        }
        streak = all_under ? streak + 1 : 0;
        result.achieved_n = n + 1;
    }
    if (streak < options.window) result.saturated = true;
    result.mapping = approximant_function(mode, phi, params, result.achieved_n);
    return result;
}

double SeriesBound::certified() const { return converged ? value + tail_estimate : inf; }

double series_ratio_contract(const ControlFunction& alpha, double tau, int s) {
    const double growth = tau * tau / 2.0;
    if (alpha.kind() == ControlFunction::Kind::constant) return growth;
    return growth * std::exp2(-alpha.exponent() / s);
}

double series_ratio_expand(const ControlFunction& alpha, int s) {
    if (alpha.kind() == ControlFunction::Kind::constant) return 0.5;
    return std::exp2(alpha.exponent() / s) / 2.0;
}

namespace {

// Sums term(j) for j = first, first+1, ... until the geometric tail
// term * r / (1 - r) drops below tol * partial sum.
template <typename Term>
SeriesBound sum_geometric(double ratio, int first, double tol, Term term) {
    SeriesBound out;
    out.ratio = ratio;
    if (!std::isfinite(ratio)) throw TailUnknownError("control function has no finite geometric decay ratio");
    if (!(ratio < 1.0)) {
        out.converged = false;
        out.value = inf;
        out.tail_estimate = inf;
        return out;
    }
    out.converged = true;
    for (int j = first; j < first + max_series_terms; ++j) {
        const double t = term(j);
        if (!std::isfinite(t)) break;  // keep the previous tail, which already bounds the rest
        out.value += t;
        out.terms_used = j - first + 1;
        out.tail_estimate = t * ratio / (1.0 - ratio);
        if (out.tail_estimate <= tol * out.value) break;
    }
    return out;
}

}  // namespace

SeriesBound series_bound_contract(const ControlFunction& alpha, double tau, int s, double x, double tol) {
    validate_exponent(s);
    if (!(tau >= 2.0)) throw ArgumentError("Delta_2 constant tau must be >= 2 for a convex modular");
    if (!(tol > 0.0)) throw ArgumentError("series tolerance must be positive");
    const double growth = tau * tau / 2.0;
    return sum_geometric(series_ratio_contract(alpha, tau, s), 1, tol, [&](int j) {
        const double a = x * std::exp2(-static_cast<double>(j) / s);
        const double b = x * std::exp2(-static_cast<double>(j - 1) / s);
        return 0.5 * std::pow(growth, j) * alpha(a, a, -b);
    });
}

SeriesBound series_bound_expand(const ControlFunction& alpha, int s, double x, double tol) {
    validate_exponent(s);
    if (!(tol > 0.0)) throw ArgumentError("series tolerance must be positive");
    return sum_geometric(series_ratio_expand(alpha, s), 0, tol, [&](int j) {
        const double a = x * std::exp2(static_cast<double>(j) / s);
        const double b = x * std::exp2(static_cast<double>(j + 1) / s);
        return std::ldexp(0.5, -j) * alpha(a, a, -b);
    });
}

double corollary_bound(double theta, double p, int s, double tau, double x) {
    validate_exponent(s);
    const double threshold = s * std::log2(tau * tau / 2.0);
    if (!(p > threshold))
        throw RegimeError("closed-form bound needs p > s*log2(tau^2/2) = " + std::to_string(threshold), threshold);
    const double k = std::exp2(p / s);
    return theta * (2.0 + k) * tau * tau / (2.0 * (2.0 * k - tau * tau)) * std::pow(std::fabs(x), p);
}

VanishingCheck check_vanishing_control(LimitMode mode, const ControlFunction& alpha, double tau, int s,
                                       const SampleGrid& grid, int steps, double rel_tol) {
    validate_exponent(s);
    const double c = std::exp2(1.0 / s);
    auto at = [&](int n) {
        double worst = 0.0;
        for (double x : grid) {
            double v;
            if (mode == LimitMode::contract) {
                const double y = x * std::exp2(-static_cast<double>(n) / s);
                v = std::pow(tau, n) * alpha(y, y, -c * y);
            } else {
                const double y = x * std::exp2(static_cast<double>(n) / s);
                v = std::ldexp(alpha(y, y, -c * y), -n);
            }
            worst = std::max(worst, std::isnan(v) ? inf : v);
        }
        return worst;
    };
    VanishingCheck out;
    out.steps = std::max(steps, 1);
    out.initial = at(0);
    out.final = at(out.steps);
    // Strict decrease, with a relative margin so that a ratio of exactly one
    // is not accepted through round-off.
    out.holds = (out.initial == 0.0 && out.final == 0.0) || out.final < (1.0 - rel_tol) * out.initial;
    return out;
}

}  // namespace modstab
