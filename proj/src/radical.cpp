#include "modstab/radical.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "format.hpp"
#include "modstab/error.hpp"
#include "parse_util.hpp"

namespace modstab {

void validate_exponent(int s) {
    if (s < 3 || s % 2 == 0) throw ParameterError("radical exponent s must be an odd integer >= 3, got " + std::to_string(s));
}

EquationParams::EquationParams(int s_, double q_) : s(s_), q(q_) {
    validate_exponent(s);
    if (!std::isfinite(q) || q == 0.0 || std::fabs(q) > 1.0)
        throw ParameterError("equation parameter q must satisfy 0 < |q| <= 1");
}

ControlFunction ControlFunction::power(double theta, double p) {
    if (!std::isfinite(theta) || theta < 0.0) throw ParameterError("control theta must be finite and >= 0");
    if (!std::isfinite(p) || p <= 0.0) throw ParameterError("control exponent p must be finite and > 0");
    ControlFunction a;
    a.kind_ = Kind::power;
    a.theta_ = theta;
    a.p_ = p;
    return a;
}

ControlFunction ControlFunction::constant(double eps) {
    if (!std::isfinite(eps) || eps < 0.0) throw ParameterError("control eps must be finite and >= 0");
    ControlFunction a;
    a.kind_ = Kind::constant;
    a.eps_ = eps;
    return a;
}

ControlFunction ControlFunction::parse(const std::string& text) {
    const auto parsed = detail::split_kind_spec(text);
    auto get = [&](const char* key) {
        auto it = parsed.params.find(key);
        if (it == parsed.params.end())
            throw ConfigError("control function '" + parsed.kind + "' requires " + key + "=...");
        return detail::parse_double(it->second, std::string("control ") + key);
    };
    auto only = [&](std::initializer_list<std::string_view> keys) {
        for (const auto& [key, value] : parsed.params) {
            if (std::find(keys.begin(), keys.end(), key) == keys.end())
                throw ConfigError("unknown control parameter '" + key + "'");
        }
    };
    try {
        if (parsed.kind == "power") {
            only({"theta", "p"});
            return power(get("theta"), get("p"));
        }
        if (parsed.kind == "const") {
            only({"eps"});
            return constant(get("eps"));
        }
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    throw ConfigError("unknown control kind '" + parsed.kind + "'");
}

double ControlFunction::operator()(double x, double y, double z) const {
    if (kind_ == Kind::constant) return eps_;
    auto term = [this](double v) { return p_ == 1.0 ? std::fabs(v) : std::pow(std::fabs(v), p_); };
    return theta_ * (term(x) + term(y) + term(z));
}

std::string ControlFunction::to_string() const {
    using detail::short_number;
    if (kind_ == Kind::constant) return "const:eps=" + short_number(eps_);
    return "power:theta=" + short_number(theta_) + ",p=" + short_number(p_);
}

double radical_root(double t, int s) {
    validate_exponent(s);
    if (t == 0.0 || !std::isfinite(t)) return t;
    const double a = std::fabs(t);
    double r = s == 3 ? std::cbrt(a) : std::pow(a, 1.0 / s);
    // One Newton step on r^s = a removes most of the last-ulp error.
    r -= (std::pow(r, s) - a) / (s * std::pow(r, s - 1));
    return std::copysign(r, t);
}

double radical_combine(const EquationParams& params, double x, double y, double z) {
    const int s = params.s;
    const double xs = std::pow(x, s), ys = std::pow(y, s), zs = std::pow(z, s);
    if (!std::isfinite(xs)) throw RangeError("x^s overflows", "x");
    if (!std::isfinite(ys)) throw RangeError("y^s overflows", "y");
    if (!std::isfinite(zs)) throw RangeError("z^s overflows", "z");
    const double sum = (xs + ys + zs) / params.q;
    if (!std::isfinite(sum)) throw RangeError("(x^s + y^s + z^s) / q overflows", "sum");
    return radical_root(sum, s);
}

double defect(const EquationParams& params, const FunctionHandle& phi, const ModularSpec& rho,
              double x, double y, double z) {
    const double w = radical_combine(params, x, y, z);
    return rho_eval(rho, phi(x) + phi(y) + phi(z) - params.q * phi(w));
}

double pair_additivity_defect(const FunctionHandle& phi, const ModularSpec& rho, int s, double x, double y) {
    validate_exponent(s);
    const double xs = std::pow(x, s), ys = std::pow(y, s);
    if (!std::isfinite(xs)) throw RangeError("x^s overflows", "x");
    if (!std::isfinite(ys)) throw RangeError("y^s overflows", "y");
    return rho_eval(rho, phi(radical_root(xs + ys, s)) - phi(x) - phi(y));
}

double diagonal_control(const ControlFunction& alpha, int s, double x) {
    return alpha(x, x, -std::exp2(1.0 / s) * x);
}

std::vector<Triple> sample_triples(double lo, double hi, std::size_t count, std::uint64_t seed) {
    std::mt19937_64 gen(seed);
    auto draw = [&] { return lo + (hi - lo) * (static_cast<double>(gen() >> 11) * 0x1.0p-53); };
    std::vector<Triple> out;
    out.reserve(count + 8);
    for (std::size_t i = 0; i < count; ++i) {
        const double x = draw();
        const double y = draw();
        const double z = draw();
        out.push_back({x, y, z});
    }
    for (int mask = 0; mask < 8; ++mask)
        out.push_back({mask & 1 ? hi : lo, mask & 2 ? hi : lo, mask & 4 ? hi : lo});
    return out;
}

DefectAudit audit_defect(const EquationParams& params, const FunctionHandle& phi, const ModularSpec& rho,
                         const ControlFunction& alpha, std::span<const Triple> triples, double rel_tol) {
    if (triples.empty()) throw ArgumentError("defect audit needs at least one triple");
    DefectAudit audit;
    audit.triples = triples.size();
    audit.max_excess = -std::numeric_limits<double>::infinity();
    for (const auto& t : triples) {
        const double d = defect(params, phi, rho, t[0], t[1], t[2]);
        const double a = alpha(t[0], t[1], t[2]);
        const double ex = (d - a) / (1.0 + a);
        audit.max_defect = std::max(audit.max_defect, d);
        if (a > 0.0) audit.max_ratio = std::max(audit.max_ratio, d / a);
        if (ex > audit.max_excess) {
            audit.max_excess = ex;
            audit.worst_triple = t;
        }
    }
    audit.holds = audit.max_excess <= rel_tol;
    return audit;
}

}  // namespace modstab
