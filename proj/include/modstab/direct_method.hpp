#pragma once

#include <vector>

#include "modstab/expression.hpp"
#include "modstab/grid.hpp"
#include "modstab/modular.hpp"
#include "modstab/radical.hpp"

namespace modstab {

/// Which scaling limit builds the radical mapping:
///   contract: A(x) = lim 2^n f(x / 2^(n/s))          (needs a Delta_2 modular)
///   expand:   A(x) = lim (f(2^(n/s) x) - q f(0)) / 2^n
enum class LimitMode { contract, expand };

const char* to_string(LimitMode mode);

/// 2^n f(x / 2^(n/s)). Throws SaturationError carrying n on a non-finite result.
double approximant_contract(const FunctionHandle& phi, const EquationParams& params, int n, double x);

/// (f(2^(n/s) x) - q f(0)) / 2^n. Throws SaturationError carrying n on a non-finite result.
double approximant_expand(const FunctionHandle& phi, const EquationParams& params, int n, double x);

/// The n-th approximant as a function of x, bit-identical to the scalar forms above.
FunctionHandle approximant_function(LimitMode mode, const FunctionHandle& phi, const EquationParams& params, int n);

struct LimitResult {
    LimitMode mode = LimitMode::expand;
    SampleGrid grid{0.0, 1.0, 2};
    std::vector<double> values;      // approximant at achieved_n, or last finite one
    std::vector<double> cauchy_gap;  // rho(A_{n+1}(x) - A_n(x)) at termination
    std::vector<bool> frozen;        // point hit a non-finite intermediate
    int achieved_n = 0;
    bool saturated = false;

    /// The limit as an evaluable map: the approximant of order achieved_n.
    FunctionHandle mapping;
};

struct LimitOptions {
    double tol = 1e-9;
    int n_max = 60;
    int window = 2;  // consecutive steps under tol required to stop
};

/// Iterates n upward until rho(A_{n+1} - A_n) < tol at every unfrozen grid
/// point for `window` consecutive n, or n_max is reached (saturated).
/// The contracting mode requires `rho` to declare a Delta_2 constant and
/// throws ContractViolation otherwise.
LimitResult construct_limit(LimitMode mode, const FunctionHandle& phi, const EquationParams& params,
                            const ModularSpec& rho, const SampleGrid& grid, const LimitOptions& options = {});

/// Truncated geometric series bound. `value` is the partial sum over
/// `terms_used` terms; value + tail_estimate bounds the full series.
struct SeriesBound {
    double value = 0.0;
    int terms_used = 0;
    double tail_estimate = 0.0;
    bool converged = false;
    double ratio = 0.0;

    /// value + tail_estimate, +inf when the series diverges.
    double certified() const;
};

/// (1/2) sum_{j>=1} (tau^2/2)^j alpha(x/2^(j/s), x/2^(j/s), -x/2^((j-1)/s)).
SeriesBound series_bound_contract(const ControlFunction& alpha, double tau, int s, double x, double tol = 1e-12);

/// (1/2) sum_{j>=0} 2^-j alpha(2^(j/s) x, 2^(j/s) x, -2^((j+1)/s) x).
SeriesBound series_bound_expand(const ControlFunction& alpha, int s, double x, double tol = 1e-12);

/// Geometric ratio of the series terms, as used for convergence and the tail.
double series_ratio_contract(const ControlFunction& alpha, double tau, int s);
double series_ratio_expand(const ControlFunction& alpha, int s);

/// Closed form of the contracting series for a power control:
///   theta (2 + 2^(p/s)) tau^2 / (2 (2^(p/s+1) - tau^2)) |x|^p,
/// valid for p > s log2(tau^2/2); throws RegimeError carrying that threshold otherwise.
double corollary_bound(double theta, double p, int s, double tau, double x);

/// Largest value over the grid of the vanishing-control sequence at step n:
///   contract: tau^n alpha(x/2^(n/s), x/2^(n/s), -2^(1/s) x/2^(n/s))
///   expand:   alpha(2^(n/s) x, 2^(n/s) x, -2^((n+1)/s) x) / 2^n
struct VanishingCheck {
    double initial = 0.0;  // at n = 0
    double final = 0.0;    // at n = steps
    int steps = 0;
    bool holds = false;    // final < (1 - rel_tol) * initial, or both zero
};

VanishingCheck check_vanishing_control(LimitMode mode, const ControlFunction& alpha, double tau, int s,
                                       const SampleGrid& grid, int steps, double rel_tol = 1e-6);

}  // namespace modstab
