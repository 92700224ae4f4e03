#pragma once

#include <span>
#include <vector>

#include "modstab/expression.hpp"
#include "modstab/grid.hpp"
#include "modstab/modular.hpp"
#include "modstab/radical.hpp"

namespace modstab {

/// Lambda g(x) = g(2^(1/s) x) / 2.
double lambda_apply(const FunctionHandle& g, int s, double x);

/// Lambda^n g(x) = g(2^(n/s) x) / 2^n.
FunctionHandle lambda_power(const FunctionHandle& g, int s, int n);

/// Sampled estimate of the contraction constant L of Lambda under rho-hat:
/// max over samples of alpha(2^(1/s)x, 2^(1/s)x, -2^(2/s)x) / (2 alpha(x, x, -2^(1/s)x)).
struct ContractionCertificate {
    double L_hat = 0.0;
    double worst_sample = 0.0;
    bool valid = false;  // L_hat < 1
    int samples_checked = 0;
    int samples_skipped = 0;  // zero denominator
};

/// Ratios within 1e-12 of one are reported as exactly one, so that the
/// excluded boundary L = 1 is not crossed by round-off.
ContractionCertificate estimate_L(const ControlFunction& alpha, int s, std::span<const double> samples);

struct RhoHatEstimate {
    double value = 0.0;
    double worst_sample = 0.0;
    int used = 0;
    int skipped = 0;
};

/// max over samples of rho(f(x) - g(x)) / alpha(x, x, -2^(1/s) x), a sampled
/// lower estimate of rho-hat(f - g). Samples with a zero weight are skipped;
/// throws ArgumentError if every sample is skipped.
RhoHatEstimate rho_hat_estimate(const FunctionHandle& f, const FunctionHandle& g, const ControlFunction& alpha,
                                const ModularSpec& rho, int s, std::span<const double> samples);

inline double rho_hat_distance(const FunctionHandle& f, const FunctionHandle& g, const ControlFunction& alpha,
                               const ModularSpec& rho, int s, std::span<const double> samples) {
    return rho_hat_estimate(f, g, alpha, rho, s, samples).value;
}

/// Grid points plus the signed ladder +-2^k (k = -3..10) clipped to the grid range.
std::vector<double> rho_hat_sample_set(const SampleGrid& grid);

struct FixedPointOptions {
    double tol = 1e-9;
    int n_max = 60;
    /// Triples for the defect-hypothesis audit; empty means 500 seeded
    /// triples in the grid box plus its corners.
    std::vector<Triple> triples;
    std::uint64_t seed = 42;
    double bound_slack = 1e-9;
};

struct FixedPointResult {
    SampleGrid grid{0.0, 1.0, 2};
    std::vector<double> values;  // Lambda^iterations phi on the grid
    int iterations = 0;
    double rho_hat_gap = 0.0;          // gap of the last step
    std::vector<double> gap_history;   // rho-hat(Lambda^{n+1} phi - Lambda^n phi), n = 0..iterations-1
    std::vector<double> quasi_ratio;   // five-term quasi-contraction ratio per step (n >= 1)
    double delta_window = 0.0;         // sup rho-hat distance between any two computed iterates
    double worst_decay_excess = 0.0;   // max gap(n+1) - L_hat gap(n)
    bool saturated = false;
    ContractionCertificate certificate;
    DefectAudit audit;
    std::vector<double> bound;         // alpha(x, x, -2^(1/s) x) / (2 (1 - L_hat))
    std::vector<double> residual;      // rho(phi(x) - limit(x))
    std::vector<double> point_gap;     // rho of the last step at each grid point
    std::vector<bool> bound_ok;
    FunctionHandle mapping;            // Lambda^iterations phi
};

/// Iterates Lambda on phi until successive iterates are within `tol` in the
/// sampled rho-hat distance, then checks the pointwise stability bound.
///
/// Preconditions, checked in this order:
///   - the sampled contraction constant is < 1   (RegimeError carrying L_hat)
///   - rho declares a Delta_2 constant            (ContractViolation)
///   - rho(defect) <= alpha on the audit triples  (PreconditionError naming the worst triple)
FixedPointResult fixed_point_solve(const FunctionHandle& phi, const EquationParams& params, const ModularSpec& rho,
                                   const ControlFunction& alpha, const SampleGrid& grid,
                                   const FixedPointOptions& options = {});

}  // namespace modstab
