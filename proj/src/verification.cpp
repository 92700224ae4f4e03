#include "modstab/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "modstab/error.hpp"

namespace modstab {

CheckAccumulator::CheckAccumulator(std::string name, double tolerance) {
    outcome_.name = std::move(name);
    outcome_.tolerance = tolerance;
}

void CheckAccumulator::observe(double value, std::vector<double> point) {
    if (std::isnan(value)) value = std::numeric_limits<double>::infinity();
    if (!seen_ || value > outcome_.worst_value) {
        outcome_.worst_value = value;
        outcome_.worst_point = std::move(point);
        seen_ = true;
    }
}

CheckOutcome CheckAccumulator::finish() const {
    CheckOutcome out = outcome_;
    out.passed = out.worst_value <= out.tolerance;
    return out;
}

std::vector<std::pair<double, double>> pair_grid(const SampleGrid& grid, std::size_t max_pairs) {
    const std::size_t n = grid.size();
    const std::size_t total = n * n;
    const std::size_t stride = max_pairs == 0 ? 1 : std::max<std::size_t>(1, (total + max_pairs - 1) / max_pairs);
    std::vector<std::pair<double, double>> out;
    out.reserve(total / stride + 1);
    for (std::size_t k = 0; k < total; k += stride) out.emplace_back(grid[k / n], grid[k % n]);
    return out;
}

CheckOutcome verify_radical_additivity(const FunctionHandle& A, const ModularSpec& rho, int s,
                                       const SampleGrid& grid, double tol) {
    CheckAccumulator acc("radical_additivity", tol);
    for (const auto& [x, y] : pair_grid(grid)) {
        double d;
        try {
            d = pair_additivity_defect(A, rho, s, x, y);
        } catch (const EvaluationError&) {
            d = std::numeric_limits<double>::infinity();
        }
        acc.observe(d, {x, y});
    }
    return acc.finish();
}

CheckOutcome verify_oddness(const FunctionHandle& A, const ModularSpec& rho, const SampleGrid& grid, double tol) {
    CheckAccumulator acc("oddness", tol);
    acc.observe(rho_saturating(rho, A(0.0)), {0.0});
    for (double x : grid) acc.observe(rho_saturating(rho, A(x) + A(-x)), {x});
    return acc.finish();
}

namespace {

void require_matching(std::span<const double> bound, const SampleGrid& grid) {
    if (bound.size() != grid.size())
        throw ArgumentError("bound has " + std::to_string(bound.size()) + " entries but the grid has " +
                            std::to_string(grid.size()) + " points");
}

}  // namespace

CheckOutcome verify_stability_bound(const FunctionHandle& phi, const FunctionHandle& A, const ModularSpec& rho,
                                    std::span<const double> bound_per_point, const SampleGrid& grid, double tol,
                                    double shift) {
    require_matching(bound_per_point, grid);
    CheckAccumulator acc("stability_bound", tol);
    acc.observe(0.0, {grid[0]});
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid[i];
        const double lhs = rho_saturating(rho, phi(x) - shift - A(x));
        acc.observe(std::max(0.0, lhs - bound_per_point[i]), {x});
    }
    return acc.finish();
}

double worst_bound_slack(const FunctionHandle& phi, const FunctionHandle& A, const ModularSpec& rho,
                         std::span<const double> bound_per_point, const SampleGrid& grid, double shift) {
    require_matching(bound_per_point, grid);
    double slack = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        const double x = grid[i];
        slack = std::min(slack, bound_per_point[i] - rho_saturating(rho, phi(x) - shift - A(x)));
    }
    return slack;
}

CheckOutcome cross_check(const FunctionHandle& A1, const FunctionHandle& A2, const ModularSpec& rho,
                         const SampleGrid& grid, double tol) {
    CheckAccumulator acc("cross_check", tol);
    for (double x : grid) acc.observe(rho_saturating(rho, A1(x) - A2(x)), {x});
    return acc.finish();
}

CheckOutcome verify_radical_equation(const FunctionHandle& A, const EquationParams& params, const ModularSpec& rho,
                                     std::span<const Triple> triples, double tol) {
    CheckAccumulator acc("radical_equation", tol);
    for (const auto& t : triples) {
        double d;
        try {
            d = defect(params, A, rho, t[0], t[1], t[2]);
        } catch (const Error&) {
            d = std::numeric_limits<double>::infinity();
        }
        acc.observe(d, {t[0], t[1], t[2]});
    }
    return acc.finish();
}

}  // namespace modstab
