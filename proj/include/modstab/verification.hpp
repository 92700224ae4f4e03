#pragma once

#include <span>
#include <string>
#include <vector>

#include "modstab/expression.hpp"
#include "modstab/grid.hpp"
#include "modstab/modular.hpp"
#include "modstab/radical.hpp"

namespace modstab {

/// Result of one named check. `passed` iff worst_value <= tolerance.
struct CheckOutcome {
    std::string name;
    bool passed = true;
    std::vector<double> worst_point;  // x, (x, y) or (x, y, z)
    double worst_value = 0.0;
    double tolerance = 0.0;
};

/// Builds an outcome from a running maximum; keeps the first point attaining it.
class CheckAccumulator {
public:
    CheckAccumulator(std::string name, double tolerance);
    void observe(double value, std::vector<double> point);
    CheckOutcome finish() const;

private:
    CheckOutcome outcome_;
    bool seen_ = false;
};

/// Cartesian square of the grid, thinned by a constant stride to at most `max_pairs`.
std::vector<std::pair<double, double>> pair_grid(const SampleGrid& grid, std::size_t max_pairs = 2000);

/// max over pair_grid of rho(A((x^s + y^s)^(1/s)) - A(x) - A(y)).
CheckOutcome verify_radical_additivity(const FunctionHandle& A, const ModularSpec& rho, int s,
                                       const SampleGrid& grid, double tol = 1e-6);

/// max of rho(A(0)) and rho(A(x) + A(-x)) over the grid.
CheckOutcome verify_oddness(const FunctionHandle& A, const ModularSpec& rho, const SampleGrid& grid, double tol = 1e-6);

/// max over the grid of rho(phi(x) - shift - A(x)) - bound(x), floored at 0.
/// `shift` is q phi(0) for the expanding construction and 0 otherwise.
/// Throws ArgumentError when bound_per_point does not match the grid.
CheckOutcome verify_stability_bound(const FunctionHandle& phi, const FunctionHandle& A, const ModularSpec& rho,
                                    std::span<const double> bound_per_point, const SampleGrid& grid,
                                    double tol = 1e-6, double shift = 0.0);

/// Smallest bound(x) - rho(phi(x) - shift - A(x)) over the grid.
double worst_bound_slack(const FunctionHandle& phi, const FunctionHandle& A, const ModularSpec& rho,
                         std::span<const double> bound_per_point, const SampleGrid& grid, double shift = 0.0);

/// max over the grid of rho(A1(x) - A2(x)).
CheckOutcome cross_check(const FunctionHandle& A1, const FunctionHandle& A2, const ModularSpec& rho,
                         const SampleGrid& grid, double tol = 1e-6);

/// max over triples of the equation defect of A.
CheckOutcome verify_radical_equation(const FunctionHandle& A, const EquationParams& params, const ModularSpec& rho,
                                     std::span<const Triple> triples, double tol = 1e-6);

}  // namespace modstab
