#pragma once

#include <cstdint>
#include <memory>
#include <string>

namespace modstab {

struct ExprNode;

/// An evaluable map R -> R built from a small closed set of primitives:
///
///   mono(c,k)          c * x^k                  (k a nonnegative integer)
///   sine(a,b)          a * sin(b x)
///   envnoise(a,p,seed) a * |x|^p * u(x), u a seeded oscillation in [-1, 1]
///   e1 + e2, e1 - e2, c * e, e * c, (e)
///
/// plus an internal rescaling node used to represent approximants of the
/// constructed mapping, out * (f(arg * x) - shift).
///
/// Handles are immutable and cheap to copy. Evaluation is deterministic: the
/// same expression, seed and x give the same bit pattern.
class FunctionHandle {
public:
    FunctionHandle();  // the zero function

    static FunctionHandle parse(const std::string& text);

    static FunctionHandle monomial(double c, int k);
    static FunctionHandle sine(double a, double b);
    static FunctionHandle envelope_noise(double a, double p, std::uint64_t seed);
    static FunctionHandle constant(double c) { return monomial(c, 0); }

    /// out * (f(arg * x) - shift), evaluated in exactly that order.
    static FunctionHandle rescaled(const FunctionHandle& f, double arg, double out, double shift);

    friend FunctionHandle operator+(const FunctionHandle& a, const FunctionHandle& b);
    friend FunctionHandle operator-(const FunctionHandle& a, const FunctionHandle& b);
    friend FunctionHandle operator*(double c, const FunctionHandle& f);

    double operator()(double x) const;

    /// Canonical expression text. Parses back to an equal function, except
    /// for rescaled nodes which have no surface syntax.
    std::string to_string() const;

    /// Seed of the first noise primitive in the tree, 0 if there is none.
    std::uint64_t seed() const;

    /// Free-form label, defaults to to_string().
    const std::string& description() const { return description_; }
    FunctionHandle with_description(std::string text) const;

private:
    explicit FunctionHandle(std::shared_ptr<const ExprNode> node);

    std::shared_ptr<const ExprNode> node_;
    std::string description_;
};

}  // namespace modstab
