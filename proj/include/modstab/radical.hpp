#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "modstab/expression.hpp"
#include "modstab/modular.hpp"

namespace modstab {

/// Parameters of  f(x) + f(y) + f(z) = q f( ((x^s + y^s + z^s) / q)^(1/s) ).
struct EquationParams {
    int s = 3;     // odd, >= 3
    double q = 1;  // 0 < |q| <= 1

    EquationParams() = default;
    EquationParams(int s_, double q_);  // validates
};

void validate_exponent(int s);

/// The bound alpha(x, y, z) on the equation defect of a perturbed map.
class ControlFunction {
public:
    enum class Kind { power, constant };

    /// theta * (|x|^p + |y|^p + |z|^p), theta >= 0, p > 0.
    static ControlFunction power(double theta, double p);
    /// eps, eps >= 0.
    static ControlFunction constant(double eps);

    /// Parses "power:theta=0.02,p=1" or "const:eps=0.1".
    static ControlFunction parse(const std::string& text);

    Kind kind() const noexcept { return kind_; }
    double theta() const noexcept { return theta_; }
    double exponent() const noexcept { return p_; }
    double epsilon() const noexcept { return eps_; }

    double operator()(double x, double y, double z) const;

    std::string to_string() const;

private:
    ControlFunction() = default;

    Kind kind_ = Kind::constant;
    double theta_ = 0.0;
    double p_ = 0.0;
    double eps_ = 0.0;
};

using Triple = std::array<double, 3>;

/// Real s-th root, sign(t) |t|^(1/s), for odd s >= 3.
double radical_root(double t, int s);

/// radical_root((x^s + y^s + z^s) / q, s). Throws RangeError naming the
/// coordinate whose power overflows.
double radical_combine(const EquationParams& params, double x, double y, double z);

/// rho(f(x) + f(y) + f(z) - q f(radical_combine(x, y, z))).
double defect(const EquationParams& params, const FunctionHandle& phi, const ModularSpec& rho,
              double x, double y, double z);

/// rho(f(radical_root(x^s + y^s, s)) - f(x) - f(y)).
double pair_additivity_defect(const FunctionHandle& phi, const ModularSpec& rho, int s, double x, double y);

inline double control_eval(const ControlFunction& alpha, double x, double y, double z) {
    return alpha(x, y, z);
}

/// alpha(x, x, -2^(1/s) x), the weight used by both stability bounds of the
/// fixed-point route.
double diagonal_control(const ControlFunction& alpha, int s, double x);

/// `count` seeded pseudo-random triples in [lo, hi]^3 followed by the eight
/// corners of the box.
std::vector<Triple> sample_triples(double lo, double hi, std::size_t count, std::uint64_t seed);

struct DefectAudit {
    std::size_t triples = 0;
    double max_defect = 0.0;
    /// max defect / alpha over triples with alpha > 0 (the slack factor K).
    double max_ratio = 0.0;
    /// max (defect - alpha) / (1 + alpha).
    double max_excess = 0.0;
    Triple worst_triple{};
    bool holds = true;  // defect <= alpha (within rel_tol) at every triple
};

/// Checks rho(defect) <= alpha(x, y, z) on the supplied triples.
DefectAudit audit_defect(const EquationParams& params, const FunctionHandle& phi, const ModularSpec& rho,
                         const ControlFunction& alpha, std::span<const Triple> triples,
                         double rel_tol = 1e-9);

}  // namespace modstab
