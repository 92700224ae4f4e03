#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace modstab {

/// A modular functional on the real line.
///
/// Two families are built in: the power modular rho(u) = |u|^p (p >= 1),
/// which satisfies the Delta_2 condition with tau = 2^p, and the exponential
/// modular rho(u) = e^|u| - 1, which is convex but has no Delta_2 constant.
/// Both are continuous, so both have the Fatou property.
class ModularSpec {
public:
    enum class Kind { power, exp };

    /// |u|^p. `tau` overrides the Delta_2 constant; it must be >= 2^p.
    static ModularSpec power(double p, std::optional<double> tau = std::nullopt);
    static ModularSpec exp();

    /// Parses "power:p=2", "power:p=1,tau=4" or "exp".
    static ModularSpec parse(const std::string& text);

    Kind kind() const noexcept { return kind_; }
    double exponent() const noexcept { return p_; }
    bool is_convex() const noexcept { return convex_; }
    bool has_fatou() const noexcept { return fatou_; }
    const std::optional<double>& delta2_tau() const noexcept { return tau_; }

    /// Canonical config string, round-trips through parse().
    std::string to_string() const;

private:
    ModularSpec() = default;

    Kind kind_ = Kind::power;
    double p_ = 1.0;
    bool convex_ = true;
    bool fatou_ = true;
    std::optional<double> tau_;
};

/// rho(u). Throws EvaluationError for non-finite input or an overflowing result.
double rho_eval(const ModularSpec& spec, double u);

/// rho(u) with overflow mapped to +inf instead of an error. NaN input still throws.
double rho_saturating(const ModularSpec& spec, double u);

struct Delta2Estimate {
    double tau_hat = 0.0;
    bool diverged = false;
};

/// max rho(2u)/rho(u) over the samples. `diverged` is set when the ratio at the
/// largest |u| exceeds the ratio at the smallest |u| by more than
/// `divergence_factor`.
Delta2Estimate estimate_delta2(const ModularSpec& spec, std::span<const double> samples,
                               double divergence_factor = 10.0);

/// {2^k : k = -3..10}.
std::vector<double> standard_ladder();

/// Same ladder with both signs.
std::vector<double> signed_ladder();

struct AxiomEntry {
    std::string name;
    bool passed = true;
    double worst_violation = 0.0;  // (lhs - rhs) / (1 + |rhs|), clamped below at 0
    std::vector<double> worst_sample;
};

struct AxiomReport {
    std::vector<AxiomEntry> entries;
    bool all_passed() const;
    const AxiomEntry* find(const std::string& name) const;
};

/// Checks zero-at-zero, symmetry, the (convex) combination inequality,
/// monotonicity under scaling, convex scaling rho(lu) <= l rho(u) and, when a
/// Delta_2 constant is declared, rho(2u) <= tau rho(u). Failures are entries,
/// never exceptions.
AxiomReport check_modular_axioms(const ModularSpec& spec, std::span<const double> samples,
                                 double rel_tol = 1e-9);

}  // namespace modstab
