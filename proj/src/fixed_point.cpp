#include "modstab/fixed_point.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "format.hpp"
#include "modstab/error.hpp"

namespace modstab {

double lambda_apply(const FunctionHandle& g, int s, double x) {
    validate_exponent(s);
    return g(std::exp2(1.0 / s) * x) / 2.0;
}

FunctionHandle lambda_power(const FunctionHandle& g, int s, int n) {
    validate_exponent(s);
    if (n < 0) throw ArgumentError("iteration count must be nonnegative");
    return FunctionHandle::rescaled(g, std::exp2(static_cast<double>(n) / s), std::ldexp(1.0, -n), 0.0);
}

ContractionCertificate estimate_L(const ControlFunction& alpha, int s, std::span<const double> samples) {
    validate_exponent(s);
    if (samples.empty()) throw ArgumentError("estimate_L needs at least one sample");
    const double c = std::exp2(1.0 / s);
    const double c2 = std::exp2(2.0 / s);
    ContractionCertificate cert;
    for (double x : samples) {
        const double denom = 2.0 * alpha(x, x, -c * x);
        if (!(denom > 0.0)) {
            ++cert.samples_skipped;
            continue;
        }
        double ratio = alpha(c * x, c * x, -c2 * x) / denom;
        if (std::fabs(ratio - 1.0) <= 1e-12) ratio = 1.0;
        if (cert.samples_checked == 0 || ratio > cert.L_hat) {
            cert.L_hat = ratio;
            cert.worst_sample = x;
        }
        ++cert.samples_checked;
    }
    if (cert.samples_checked == 0) throw ArgumentError("estimate_L: control function vanishes at every sample");
    cert.valid = cert.L_hat < 1.0;
    return cert;
}

namespace {

template <typename F, typename G>
RhoHatEstimate rho_hat_generic(F&& f, G&& g, const ControlFunction& alpha, const ModularSpec& rho, int s,
                               std::span<const double> samples) {
    RhoHatEstimate est;
    for (std::size_t i = 0; i < samples.size(); ++i) {
        const double x = samples[i];
        const double w = diagonal_control(alpha, s, x);
        if (!(w > 0.0)) {
            ++est.skipped;
            continue;
        }
        const double r = rho_saturating(rho, f(i, x) - g(i, x)) / w;
        if (est.used == 0 || r > est.value) {
            est.value = r;
            est.worst_sample = x;
        }
        ++est.used;
    }
    if (est.used == 0) throw ArgumentError("rho-hat estimate: control weight vanishes at every sample");
    return est;
}

}  // namespace

RhoHatEstimate rho_hat_estimate(const FunctionHandle& f, const FunctionHandle& g, const ControlFunction& alpha,
                                const ModularSpec& rho, int s, std::span<const double> samples) {
    validate_exponent(s);
    return rho_hat_generic([&](std::size_t, double x) { return f(x); }, [&](std::size_t, double x) { return g(x); },
                           alpha, rho, s, samples);
}

std::vector<double> rho_hat_sample_set(const SampleGrid& grid) {
    std::vector<double> out(grid.begin(), grid.end());
    for (double v : signed_ladder()) {
        if (v >= grid.lo() && v <= grid.hi()) out.push_back(v);
    }
    std::ranges::sort(out);
    const auto [first, last] = std::ranges::unique(out);
    out.erase(first, last);
    return out;
}

FixedPointResult fixed_point_solve(const FunctionHandle& phi, const EquationParams& params, const ModularSpec& rho,
                                   const ControlFunction& alpha, const SampleGrid& grid,
                                   const FixedPointOptions& options) {
    if (!(options.tol > 0.0)) throw ArgumentError("fixed-point tolerance must be positive");
    if (options.n_max < 1) throw ArgumentError("n_max must be at least 1");
    const int s = params.s;

    FixedPointResult result;
    result.grid = grid;
    const auto samples = rho_hat_sample_set(grid);
    result.certificate = estimate_L(alpha, s, samples);
    if (!result.certificate.valid) {
        throw RegimeError("contraction constant L_hat = " + detail::fixed17(result.certificate.L_hat) +
                              " >= 1: the fixed-point stability bound does not apply",
                          result.certificate.L_hat);
    }
    if (!rho.delta2_tau()) throw ContractViolation("the fixed-point route requires a modular with a Delta_2 constant");

    const auto triples = options.triples.empty() ? sample_triples(grid.lo(), grid.hi(), 500, options.seed)
                                                 : options.triples;
    result.audit = audit_defect(params, phi, rho, alpha, triples);
    if (!result.audit.holds) {
        const auto& t = result.audit.worst_triple;
        std::ostringstream msg;
        msg << "defect exceeds alpha on the audit sample; worst triple (" << detail::fixed17(t[0]) << ", "
            << detail::fixed17(t[1]) << ", " << detail::fixed17(t[2]) << "), relative excess "
            << detail::fixed17(result.audit.max_excess);
        throw PreconditionError(msg.str());
    }

    const double L = result.certificate.L_hat;
    const std::size_t ns = samples.size();

    // Iterates on the rho-hat sample set; the grid is a subset of it.
    auto iterate = [&](int n) {
        std::vector<double> v(ns);
        const auto g = lambda_power(phi, s, n);
        for (std::size_t i = 0; i < ns; ++i) v[i] = g(samples[i]);
        return v;
    };
    auto finite = [](const std::vector<double>& v) { return std::ranges::all_of(v, [](double a) { return std::isfinite(a); }); };
    auto distance = [&](const std::vector<double>& a, const std::vector<double>& b) {
        return rho_hat_generic([&](std::size_t i, double) { return a[i]; }, [&](std::size_t i, double) { return b[i]; },
                               alpha, rho, s, samples)
            .value;
    };

    std::vector<std::vector<double>> history;
    history.push_back(iterate(0));
    int n = 0;
    for (; n < options.n_max; ++n) {
        auto next = iterate(n + 1);
        if (!finite(next)) {
            result.saturated = true;
            break;
        }
        const double gap = distance(next, history.back());
        result.gap_history.push_back(gap);
        if (history.size() >= 2) {
            // x = Lambda^{n-1} phi, y = Lambda^n phi, so Tx = y and Ty = next.
            const auto& x = history[history.size() - 2];
            const auto& y = history.back();
            const double num = gap;
            const double den = std::max({distance(x, y), distance(y, next), distance(x, next)});
            result.quasi_ratio.push_back(den > 0.0 ? num / den : 0.0);
        }
        history.push_back(std::move(next));
        if (gap < options.tol) {
            ++n;
            break;
        }
    }
    result.iterations = n;
    if (result.gap_history.empty() || !(result.gap_history.back() < options.tol)) result.saturated = true;
    result.rho_hat_gap = result.gap_history.empty() ? std::numeric_limits<double>::infinity() : result.gap_history.back();

    for (std::size_t i = 0; i + 1 < result.gap_history.size(); ++i) {
        result.worst_decay_excess =
            std::max(result.worst_decay_excess, result.gap_history[i + 1] - L * result.gap_history[i]);
    }
    for (std::size_t i = 0; i < history.size(); ++i) {
        for (std::size_t j = i + 1; j < history.size(); ++j)
            result.delta_window = std::max(result.delta_window, distance(history[i], history[j]));
    }

    result.mapping = lambda_power(phi, s, static_cast<int>(history.size()) - 1);
    const auto& last = history.back();
    const auto& before = history.size() >= 2 ? history[history.size() - 2] : last;
    for (double x : grid) {
        const auto idx = static_cast<std::size_t>(std::ranges::lower_bound(samples, x) - samples.begin());
        const double value = last[idx];
        result.point_gap.push_back(rho_saturating(rho, value - before[idx]));
        const double bound = diagonal_control(alpha, s, x) / (2.0 * (1.0 - L));
        const double residual = rho_saturating(rho, phi(x) - value);
        result.values.push_back(value);
        result.bound.push_back(bound);
        result.residual.push_back(residual);
        result.bound_ok.push_back(residual <= bound + options.bound_slack);
    }
    return result;
}

}  // namespace modstab
