#include "modstab/modular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "modstab/error.hpp"
#include "parse_util.hpp"

namespace modstab {

ModularSpec ModularSpec::power(double p, std::optional<double> tau) {
    if (!std::isfinite(p) || p < 1.0)
        throw ParameterError("power modular needs a finite exponent p >= 1");
    ModularSpec spec;
    spec.kind_ = Kind::power;
    spec.p_ = p;
    spec.convex_ = true;
    spec.fatou_ = true;
    const double natural = std::exp2(p);
    if (tau) {
        if (!std::isfinite(*tau) || *tau < natural)
            throw ParameterError("Delta_2 constant tau must be >= 2^p for the power modular");
        spec.tau_ = *tau;
    } else {
        spec.tau_ = natural;
    }
    return spec;
}

ModularSpec ModularSpec::exp() {
    ModularSpec spec;
    spec.kind_ = Kind::exp;
    spec.p_ = 0.0;
    spec.convex_ = true;
    spec.fatou_ = true;
    return spec;
}

ModularSpec ModularSpec::parse(const std::string& text) {
    const auto parsed = detail::split_kind_spec(text);
    if (parsed.kind == "exp") {
        if (!parsed.params.empty()) throw ConfigError("exp modular takes no parameters");
        return exp();
    }
    if (parsed.kind == "power") {
        double p = 1.0;
        std::optional<double> tau;
        for (const auto& [key, value] : parsed.params) {
            if (key == "p")
                p = detail::parse_double(value, "modular exponent p");
            else if (key == "tau")
                tau = detail::parse_double(value, "modular tau");
            else
                throw ConfigError("unknown power modular parameter '" + key + "'");
        }
        if (!parsed.params.contains("p")) throw ConfigError("power modular requires p=...");
        try {
            return power(p, tau);
        } catch (const ParameterError& e) {
            throw ConfigError(e.what());
        }
    }
    throw ConfigError("unknown modular kind '" + parsed.kind + "'");
}

std::string ModularSpec::to_string() const {
    if (kind_ == Kind::exp) return "exp";
    std::ostringstream out;
    out.precision(17);
    out << "power:p=" << p_;
    if (tau_ && *tau_ != std::exp2(p_)) out << ",tau=" << *tau_;
    return out.str();
}

namespace {

double raw_rho(const ModularSpec& spec, double u) {
    const double a = std::fabs(u);
    switch (spec.kind()) {
        case ModularSpec::Kind::power:
            return spec.exponent() == 1.0 ? a : std::pow(a, spec.exponent());
        case ModularSpec::Kind::exp:
            return std::expm1(a);
    }
    return std::numeric_limits<double>::quiet_NaN();
}

}  // namespace

double rho_saturating(const ModularSpec& spec, double u) {
    if (std::isnan(u)) throw EvaluationError("modular evaluated at NaN", u);
    return raw_rho(spec, u);
}

double rho_eval(const ModularSpec& spec, double u) {
    if (!std::isfinite(u)) throw EvaluationError("modular evaluated at a non-finite value", u);
    const double r = raw_rho(spec, u);
    if (!std::isfinite(r)) throw EvaluationError("modular value overflows at u", u);
    return r;
}

std::vector<double> standard_ladder() {
    std::vector<double> out;
    for (int k = -3; k <= 10; ++k) out.push_back(std::ldexp(1.0, k));
    return out;
}

std::vector<double> signed_ladder() {
    std::vector<double> out;
    for (double v : standard_ladder()) {
        out.push_back(v);
        out.push_back(-v);
    }
    return out;
}

Delta2Estimate estimate_delta2(const ModularSpec& spec, std::span<const double> samples,
                               double divergence_factor) {
    if (samples.empty()) throw ArgumentError("estimate_delta2 needs at least one sample");
    std::vector<double> ordered(samples.begin(), samples.end());
    for (double u : ordered) {
        if (u == 0.0 || !std::isfinite(u))
            throw ArgumentError("estimate_delta2 samples must be finite and nonzero");
    }
    std::ranges::stable_sort(ordered, {}, [](double u) { return std::fabs(u); });

    auto ratio = [&](double u) {
        const double base = rho_saturating(spec, u);
        const double doubled = rho_saturating(spec, 2.0 * u);
        if (!std::isfinite(base) || !std::isfinite(doubled))
            return std::numeric_limits<double>::infinity();
        return doubled / base;
    };

    Delta2Estimate out;
    for (double u : ordered) out.tau_hat = std::max(out.tau_hat, ratio(u));
    const double lo = ratio(ordered.front());
    const double hi = ratio(ordered.back());
    out.diverged = !std::isfinite(hi) || hi > divergence_factor * lo;
    return out;
}

bool AxiomReport::all_passed() const {
    return std::ranges::all_of(entries, [](const AxiomEntry& e) { return e.passed; });
}

const AxiomEntry* AxiomReport::find(const std::string& name) const {
    auto it = std::ranges::find(entries, name, &AxiomEntry::name);
    return it == entries.end() ? nullptr : &*it;
}

namespace {

// Relative excess of lhs over rhs. An infinite right side always holds; an
// infinite left side against a finite right side is a violation.
double excess(double lhs, double rhs) {
    if (std::isinf(rhs) && rhs > 0) return 0.0;
    if (std::isinf(lhs)) return std::numeric_limits<double>::infinity();
    return (lhs - rhs) / (1.0 + std::fabs(rhs));
}

class EntryBuilder {
public:
    EntryBuilder(std::string name, double tol) : tol_(tol) { entry_.name = std::move(name); }

    void record(double violation, std::vector<double> sample) {
        if (violation > entry_.worst_violation || (std::isnan(violation) && entry_.passed)) {
            entry_.worst_violation = violation;
            entry_.worst_sample = std::move(sample);
        }
        if (!(violation <= tol_)) entry_.passed = false;
    }

    AxiomEntry finish() { return std::move(entry_); }

private:
    AxiomEntry entry_;
    double tol_;
};

}  // namespace

AxiomReport check_modular_axioms(const ModularSpec& spec, std::span<const double> samples,
                                 double rel_tol) {
    AxiomReport report;
    auto rho = [&](double u) { return rho_saturating(spec, u); };

    {
        EntryBuilder e("zero_at_zero", rel_tol);
        e.record(rho(0.0) == 0.0 ? 0.0 : excess(rho(0.0), 0.0), {0.0});
        for (double u : samples) {
            if (u != 0.0 && !(rho(u) > 0.0)) e.record(std::numeric_limits<double>::infinity(), {u});
        }
        report.entries.push_back(e.finish());
    }
    {
        EntryBuilder e("symmetry", rel_tol);
        for (double u : samples) {
            const double a = rho(u), b = rho(-u);
            const double diff = (a == b) ? 0.0 : std::fabs(a - b) / (1.0 + std::fabs(a));
            e.record(diff, {u});
        }
        report.entries.push_back(e.finish());
    }

    static constexpr double weights[] = {0.1, 0.25, 0.5, 0.75, 0.9};
    {
        // Convex modulars: rho(a u + b v) <= a rho(u) + b rho(v); otherwise
        // the weaker rho(a u + b v) <= rho(u) + rho(v).
        EntryBuilder e(spec.is_convex() ? "convex_combination" : "combination", rel_tol);
        for (double u : samples) {
            for (double v : samples) {
                for (double a : weights) {
                    const double b = 1.0 - a;
                    const double lhs = rho(a * u + b * v);
                    const double rhs = spec.is_convex() ? a * rho(u) + b * rho(v) : rho(u) + rho(v);
                    e.record(excess(lhs, rhs), {u, v, a});
                }
            }
        }
        report.entries.push_back(e.finish());
    }

    static constexpr double scales[] = {0.1, 0.25, 0.5, 0.75, 1.0, 1.5, 2.0};
    {
        EntryBuilder e("monotone_scaling", rel_tol);
        for (double u : samples) {
            for (std::size_t i = 0; i + 1 < std::size(scales); ++i) {
                for (std::size_t j = i + 1; j < std::size(scales); ++j) {
                    e.record(excess(rho(scales[i] * u), rho(scales[j] * u)), {u, scales[i], scales[j]});
                }
            }
        }
        report.entries.push_back(e.finish());
    }

    if (spec.is_convex()) {
        EntryBuilder e("convex_scaling", rel_tol);
        for (double u : samples) {
            for (double l : scales) {
                if (l > 1.0) continue;
                e.record(excess(rho(l * u), l * rho(u)), {u, l});
            }
        }
        report.entries.push_back(e.finish());
    }

    if (const auto& tau = spec.delta2_tau()) {
        EntryBuilder e("delta2", rel_tol);
        for (double u : samples) e.record(excess(rho(2.0 * u), *tau * rho(u)), {u});
        if (spec.is_convex() && *tau < 2.0) e.record(2.0 - *tau, {*tau});
        report.entries.push_back(e.finish());
    }
    return report;
}

}  // namespace modstab
