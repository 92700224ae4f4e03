#include "modstab/expression.hpp"

#include <cctype>
#include <cmath>
#include <numbers>
#include <optional>
#include <random>
#include <variant>

#include "format.hpp"
#include "modstab/error.hpp"
#include "parse_util.hpp"

namespace modstab {

namespace {

struct Monomial {
    double c;
    int k;
};

struct Sine {
    double a;
    double b;
};

// a * |x|^p * (w sin(f1 x + ph1) + (1 - w) sin(f2 x + ph2))
struct EnvNoise {
    double a;
    double p;
    std::uint64_t seed;
    double w, f1, f2, ph1, ph2;
};

struct Sum {
    std::shared_ptr<const ExprNode> lhs, rhs;
};

struct Scale {
    double c;
    std::shared_ptr<const ExprNode> inner;
};

struct Rescale {
    std::shared_ptr<const ExprNode> inner;
    double arg, out, shift;
};

// Uniform double in [0, 1) from the top 53 bits; portable across standard libraries.
double unit(std::mt19937_64& gen) {
    return static_cast<double>(gen() >> 11) * 0x1.0p-53;
}

EnvNoise make_noise(double a, double p, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    EnvNoise n{a, p, seed, 0, 0, 0, 0, 0};
    n.w = 0.3 + 0.4 * unit(gen);
    n.f1 = 0.5 + 2.5 * unit(gen);
    n.f2 = 0.5 + 2.5 * unit(gen);
    n.ph1 = 2.0 * std::numbers::pi * unit(gen);
    n.ph2 = 2.0 * std::numbers::pi * unit(gen);
    return n;
}

}  // namespace

struct ExprNode {
    std::variant<Monomial, Sine, EnvNoise, Sum, Scale, Rescale> v;
};

namespace {

double eval(const ExprNode& node, double x) {
    return std::visit(
        [x](const auto& n) -> double {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Monomial>) {
                return n.c * std::pow(x, n.k);
            } else if constexpr (std::is_same_v<T, Sine>) {
                return n.a * std::sin(n.b * x);
            } else if constexpr (std::is_same_v<T, EnvNoise>) {
                const double u = n.w * std::sin(n.f1 * x + n.ph1) + (1.0 - n.w) * std::sin(n.f2 * x + n.ph2);
                return n.a * std::pow(std::fabs(x), n.p) * u;
            } else if constexpr (std::is_same_v<T, Sum>) {
                return eval(*n.lhs, x) + eval(*n.rhs, x);
            } else if constexpr (std::is_same_v<T, Scale>) {
                return n.c * eval(*n.inner, x);
            } else {
                return n.out * (eval(*n.inner, n.arg * x) - n.shift);
            }
        },
        node.v);
}

std::string render(const ExprNode& node) {
    using detail::short_number;
    return std::visit(
        [](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Monomial>) {
                return "mono(" + short_number(n.c) + "," + std::to_string(n.k) + ")";
            } else if constexpr (std::is_same_v<T, Sine>) {
                return "sine(" + short_number(n.a) + "," + short_number(n.b) + ")";
            } else if constexpr (std::is_same_v<T, EnvNoise>) {
                return "envnoise(" + short_number(n.a) + "," + short_number(n.p) + "," + std::to_string(n.seed) + ")";
            } else if constexpr (std::is_same_v<T, Sum>) {
                return render(*n.lhs) + " + " + render(*n.rhs);
            } else if constexpr (std::is_same_v<T, Scale>) {
                return short_number(n.c) + "*(" + render(*n.inner) + ")";
            } else {
                return "rescale(" + render(*n.inner) + ";arg=" + short_number(n.arg) +
                       ";out=" + short_number(n.out) + ";shift=" + short_number(n.shift) + ")";
            }
        },
        node.v);
}

std::uint64_t first_seed(const ExprNode& node) {
    return std::visit(
        [](const auto& n) -> std::uint64_t {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, EnvNoise>) {
                return n.seed;
            } else if constexpr (std::is_same_v<T, Sum>) {
                const auto s = first_seed(*n.lhs);
                return s != 0 ? s : first_seed(*n.rhs);
            } else if constexpr (std::is_same_v<T, Scale> || std::is_same_v<T, Rescale>) {
                return first_seed(*n.inner);
            } else {
                return 0;
            }
        },
        node.v);
}

template <typename T>
std::shared_ptr<const ExprNode> make(T value) {
    return std::make_shared<const ExprNode>(ExprNode{std::move(value)});
}

}  // namespace

FunctionHandle::FunctionHandle() : FunctionHandle(make(Monomial{0.0, 0})) {}

FunctionHandle::FunctionHandle(std::shared_ptr<const ExprNode> node)
    : node_(std::move(node)), description_(render(*node_)) {}

FunctionHandle FunctionHandle::monomial(double c, int k) {
    if (k < 0) throw ParameterError("monomial degree must be nonnegative");
    return FunctionHandle(make(Monomial{c, k}));
}

FunctionHandle FunctionHandle::sine(double a, double b) { return FunctionHandle(make(Sine{a, b})); }

FunctionHandle FunctionHandle::envelope_noise(double a, double p, std::uint64_t seed) {
    if (!(p >= 0.0)) throw ParameterError("noise envelope exponent must be nonnegative");
    return FunctionHandle(make(make_noise(a, p, seed)));
}

FunctionHandle FunctionHandle::rescaled(const FunctionHandle& f, double arg, double out, double shift) {
    return FunctionHandle(make(Rescale{f.node_, arg, out, shift}));
}

FunctionHandle operator+(const FunctionHandle& a, const FunctionHandle& b) {
    return FunctionHandle(make(Sum{a.node_, b.node_}));
}

FunctionHandle operator-(const FunctionHandle& a, const FunctionHandle& b) {
    return a + (-1.0) * b;
}

FunctionHandle operator*(double c, const FunctionHandle& f) {
    return FunctionHandle(make(Scale{c, f.node_}));
}

double FunctionHandle::operator()(double x) const { return eval(*node_, x); }

std::string FunctionHandle::to_string() const { return render(*node_); }

std::uint64_t FunctionHandle::seed() const { return first_seed(*node_); }

FunctionHandle FunctionHandle::with_description(std::string text) const {
    FunctionHandle copy = *this;
    copy.description_ = std::move(text);
    return copy;
}

// ---------------------------------------------------------------------------
// Parser

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    FunctionHandle parse() {
        auto result = expr();
        skip_ws();
        if (pos_ != text_.size()) fail("unexpected trailing input");
        return as_function(result);
    }

private:
    // A parsed operand is either a plain number or a function.
    struct Operand {
        std::optional<double> number;
        FunctionHandle fn;
    };

    static FunctionHandle as_function(const Operand& op) {
        return op.number ? FunctionHandle::constant(*op.number) : op.fn;
    }

    Operand expr() {
        Operand acc = term();
        for (;;) {
            skip_ws();
            if (accept('+')) {
                acc = add(acc, term(), 1.0);
            } else if (accept('-')) {
                acc = add(acc, term(), -1.0);
            } else {
                return acc;
            }
        }
    }

    static Operand add(const Operand& a, const Operand& b, double sign) {
        if (a.number && b.number) return {*a.number + sign * *b.number, {}};
        const auto rhs = sign == 1.0 ? as_function(b) : (-1.0) * as_function(b);
        return {std::nullopt, as_function(a) + rhs};
    }

    Operand term() {
        Operand acc = factor();
        for (;;) {
            skip_ws();
            if (!accept('*')) return acc;
            Operand rhs = factor();
            if (acc.number && rhs.number) {
                acc = {*acc.number * *rhs.number, {}};
            } else if (acc.number) {
                acc = {std::nullopt, *acc.number * rhs.fn};
            } else if (rhs.number) {
                acc = {std::nullopt, *rhs.number * acc.fn};
            } else {
                fail("product of two functions is not supported; '*' takes a scalar factor");
            }
        }
    }

    Operand factor() {
        skip_ws();
        if (accept('-')) {
            Operand inner = factor();
            if (inner.number) return {-*inner.number, {}};
            return {std::nullopt, (-1.0) * inner.fn};
        }
        if (accept('(')) {
            Operand inner = expr();
            expect(')');
            return inner;
        }
        if (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) return call();
        return {number(), {}};
    }

    Operand call() {
        const auto start = pos_;
        while (pos_ < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        const std::string name(text_.substr(start, pos_ - start));
        expect('(');
        std::vector<std::string_view> args;
        const auto args_start = pos_;
        const auto close = text_.find(')', pos_);
        if (close == std::string_view::npos) fail("missing ')'");
        auto inner = text_.substr(args_start, close - args_start);
        pos_ = close + 1;
        while (true) {
            const auto comma = inner.find(',');
            args.push_back(detail::trim(inner.substr(0, comma)));
            if (comma == std::string_view::npos) break;
            inner = inner.substr(comma + 1);
        }
        auto want = [&](std::size_t n) {
            if (args.size() != n) fail(name + " expects " + std::to_string(n) + " arguments");
        };
        if (name == "mono") {
            want(2);
            const double c = detail::parse_double(args[0], "mono coefficient");
            const auto k = detail::parse_integer(args[1], "mono degree");
            if (k < 0 || k > 64) fail("mono degree must be in 0..64");
            return {std::nullopt, FunctionHandle::monomial(c, static_cast<int>(k))};
        }
        if (name == "sine") {
            want(2);
            return {std::nullopt, FunctionHandle::sine(detail::parse_double(args[0], "sine amplitude"),
                                                       detail::parse_double(args[1], "sine frequency"))};
        }
        if (name == "envnoise") {
            want(3);
            const double a = detail::parse_double(args[0], "envnoise amplitude");
            const double p = detail::parse_double(args[1], "envnoise exponent");
            const auto seed = detail::parse_integer(args[2], "envnoise seed");
            if (seed < 0) fail("envnoise seed must be nonnegative");
            if (!(p >= 0.0)) fail("envnoise exponent must be nonnegative");
            return {std::nullopt, FunctionHandle::envelope_noise(a, p, static_cast<std::uint64_t>(seed))};
        }
        fail("unknown primitive '" + name + "'");
    }

    double number() {
        const auto start = pos_;
        while (pos_ < text_.size()) {
            const char c = text_[pos_];
            const bool exp_sign = (c == '+' || c == '-') && pos_ > start &&
                                  (text_[pos_ - 1] == 'e' || text_[pos_ - 1] == 'E');
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == 'e' || c == 'E' || exp_sign)
                ++pos_;
            else
                break;
        }
        if (pos_ == start) fail("expected a number, primitive or '('");
        return detail::parse_double(text_.substr(start, pos_ - start), "number");
    }

    void skip_ws() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    }

    bool accept(char c) {
        skip_ws();
        if (pos_ < text_.size() && text_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }

    void expect(char c) {
        if (!accept(c)) fail(std::string("expected '") + c + "'");
    }

    [[noreturn]] void fail(const std::string& msg) const {
        throw ConfigError("function expression: " + msg + " at offset " + std::to_string(pos_) + " in '" +
                          std::string(text_) + "'");
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

}  // namespace

FunctionHandle FunctionHandle::parse(const std::string& text) { return Parser(text).parse(); }

}  // namespace modstab
