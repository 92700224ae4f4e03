#include "modstab/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>

#include "format.hpp"
#include "modstab/direct_method.hpp"
#include "modstab/error.hpp"
#include "modstab/expression.hpp"
#include "modstab/fixed_point.hpp"
#include "modstab/grid.hpp"
#include "modstab/radical.hpp"
#include "modstab/verification.hpp"

namespace modstab {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();
constexpr double nan = std::numeric_limits<double>::quiet_NaN();

// Relative agreement required between the summed series and its closed form.
constexpr double closed_form_rel_tol = 1e-9;
// Slack for pointwise bound checks on the fixed-point route.
constexpr double fixed_point_bound_slack = 1e-9;
// Additive slack in gap(n+1) <= L gap(n).
constexpr double decay_slack = 1e-9;

Json point_json(const std::vector<double>& p) {
    Json out = Json::array();
    for (double v : p) out.push_back(json_number(v));
    return out;
}

Json check_json(const std::string& method, const CheckOutcome& c) {
    return Json{{"name", method.empty() ? c.name : method + "/" + c.name},
                {"passed", c.passed},
                {"worst_point", point_json(c.worst_point)},
                {"worst_value", json_number(c.worst_value)},
                {"tolerance", json_number(c.tolerance)}};
}

std::string csv_number(double v) { return std::isfinite(v) ? detail::fixed17(v) : ""; }

class Pipeline {
public:
    explicit Pipeline(const ExperimentConfig& cfg)
        : cfg_(cfg),
          params_(cfg.equation.s, cfg.equation.q),
          rho_(ModularSpec::parse(cfg.modular)),
          phi_(FunctionHandle::parse(cfg.phi)),
          alpha_(ControlFunction::parse(cfg.alpha)),
          grid_(cfg.grid.lo, cfg.grid.hi, cfg.grid.count),
          triples_(sample_triples(cfg.grid.lo, cfg.grid.hi, cfg.audit_triples, cfg.seed)) {}

    ExperimentOutcome run() {
        ExperimentOutcome out;
        out.csv = "method,x,A,bound,gap,n,saturated\n";
        Json& report = out.report;
        report["schema"] = report_schema;
        report["config"] = config_json();
        report["notes"] = Json::array({"rho-hat distances are sampled estimates: the maximum ratio over the grid "
                                       "plus the signed power-of-two ladder inside the grid range"});
        report["modular"] = modular_report(rho_);
        report["defect_audit"] = audit_json();

        const bool all = cfg_.method == Method::all;
        if (all || cfg_.method == Method::t1) run_direct(LimitMode::contract, out);
        if (all || cfg_.method == Method::t2) run_direct(LimitMode::expand, out);
        if (all || cfg_.method == Method::fixedpoint) run_fixed_point(out);
        if (expand_limit_ && fixed_limit_) add_check("", cross_check(*expand_limit_, *fixed_limit_, rho_, grid_, cfg_.check_tol));

        report["methods"] = std::move(methods_);
        report["checks"] = std::move(checks_);
        report["errors"] = std::move(errors_);
        report["passed"] = !failed_;
        out.exit_code = failed_ ? exit_code::failed : exit_code::ok;
        report["exit_code"] = out.exit_code;
        out.csv += csv_rows_;
        return out;
    }

private:
    Json config_json() const {
        return Json{{"s", cfg_.equation.s},
                    {"q", cfg_.equation.q},
                    {"modular", rho_.to_string()},
                    {"phi", phi_.to_string()},
                    {"alpha", alpha_.to_string()},
                    {"method", to_string(cfg_.method)},
                    {"grid", {{"lo", cfg_.grid.lo}, {"hi", cfg_.grid.hi}, {"count", cfg_.grid.count}}},
                    {"tol", cfg_.tol},
                    {"n_max", cfg_.n_max},
                    {"seed", cfg_.seed},
                    {"check_tol", cfg_.check_tol},
                    {"audit_triples", cfg_.audit_triples}};
    }

    Json audit_json() {
        try {
            const auto a = audit_defect(params_, phi_, rho_, alpha_, triples_);
            return Json{{"triples", a.triples},
                        {"max_defect", json_number(a.max_defect)},
                        {"max_ratio", json_number(a.max_ratio)},
                        {"max_excess", json_number(a.max_excess)},
                        {"worst_triple", point_json({a.worst_triple.begin(), a.worst_triple.end()})},
                        {"holds", a.holds}};
        } catch (const Error& e) {
            add_error("audit", "evaluation", e.what(), nan);
            return Json{{"triples", triples_.size()}, {"holds", false}};
        }
    }

    void add_check(const std::string& method, const CheckOutcome& c) {
        if (!c.passed) failed_ = true;
        checks_.push_back(check_json(method, c));
    }

    void add_error(const std::string& method, const std::string& kind, const std::string& message, double value) {
        failed_ = true;
        errors_.push_back(
            Json{{"method", method}, {"kind", kind}, {"message", message}, {"value", json_number(value)}});
    }

    void record_error(const std::string& method, const Error& e, Json& entry, MethodSummary& summary) {
        std::string kind = "error";
        double value = nan;
        if (const auto* r = dynamic_cast<const RegimeError*>(&e)) {
            kind = "regime";
            value = r->value();
        } else if (dynamic_cast<const ContractViolation*>(&e)) {
            kind = "contract";
        } else if (dynamic_cast<const PreconditionError*>(&e)) {
            kind = "precondition";
        } else if (dynamic_cast<const TailUnknownError*>(&e)) {
            kind = "tail_unknown";
        } else if (const auto* ev = dynamic_cast<const EvaluationError*>(&e)) {
            kind = "evaluation";
            value = ev->value();
        }
        add_error(method, kind, e.what(), value);
        entry["error"] = e.what();
        summary.error = e.what();
    }

    void run_direct(LimitMode mode, ExperimentOutcome& out) {
        const std::string name = mode == LimitMode::contract ? "t1" : "t2";
        MethodSummary summary;
        summary.method = name;
        summary.rate = nan;
        summary.worst_bound_slack = nan;
        Json entry{{"method", name}, {"construction", to_string(mode)}};
        try {
            double tau = 1.0;
            if (mode == LimitMode::contract) {
                if (!rho_.delta2_tau())
                    throw ContractViolation("the contracting construction requires a modular with a Delta_2 constant");
                tau = *rho_.delta2_tau();
                entry["tau"] = tau;
            }
            const double ratio =
                mode == LimitMode::contract ? series_ratio_contract(alpha_, tau, params_.s) : series_ratio_expand(alpha_, params_.s);
            summary.rate = ratio;

            const LimitOptions opts{cfg_.tol, cfg_.n_max, 2};
            const auto limit = construct_limit(mode, phi_, params_, rho_, grid_, opts);
            const auto vanishing = check_vanishing_control(mode, alpha_, tau, params_.s, grid_, limit.achieved_n);
            summary.achieved_n = limit.achieved_n;
            entry["limit"] = Json{{"achieved_n", limit.achieved_n},
                                  {"saturated", limit.saturated},
                                  {"max_cauchy_gap", json_number(*std::ranges::max_element(limit.cauchy_gap))},
                                  {"frozen_points", std::ranges::count(limit.frozen, true)}};
            entry["vanishing_control"] = Json{{"initial", json_number(vanishing.initial)},
                                              {"final", json_number(vanishing.final)},
                                              {"steps", vanishing.steps},
                                              {"holds", vanishing.holds}};

            std::vector<SeriesBound> series;
            for (double x : grid_) {
                series.push_back(mode == LimitMode::contract ? series_bound_contract(alpha_, tau, params_.s, x)
                                                             : series_bound_expand(alpha_, params_.s, x));
            }
            const bool converged = ratio < 1.0;
            int max_terms = 0;
            double max_tail = 0.0;
            for (const auto& b : series) {
                max_terms = std::max(max_terms, b.terms_used);
                max_tail = std::max(max_tail, b.tail_estimate);
            }
            entry["series"] = Json{{"ratio", json_number(ratio)},
                                   {"converged", converged},
                                   {"max_terms_used", max_terms},
                                   {"max_tail_estimate", json_number(converged ? max_tail : inf)}};

            std::vector<double> bound;
            if (converged) {
                for (const auto& b : series) bound.push_back(b.certified());
            }

            if (mode == LimitMode::contract && alpha_.kind() == ControlFunction::Kind::power) {
                corollary_entry(entry, tau, bound);
            }

            const double shift = mode == LimitMode::expand ? params_.q * phi_(0.0) : 0.0;
            Json points = Json::array();
            for (std::size_t i = 0; i < grid_.size(); ++i) {
                const double x = grid_[i];
                points.push_back(Json{{"x", x},
                                      {"A", json_number(limit.values[i])},
                                      {"bound", converged ? json_number(bound[i]) : Json(nullptr)},
                                      {"gap", json_number(limit.cauchy_gap[i])},
                                      {"frozen", static_cast<bool>(limit.frozen[i])}});
                csv_rows_ += name + "," + csv_number(x) + "," + csv_number(limit.values[i]) + "," +
                             (converged ? csv_number(bound[i]) : std::string()) + "," + csv_number(limit.cauchy_gap[i]) +
                             "," + std::to_string(limit.achieved_n) + "," +
                             ((limit.frozen[i] || limit.saturated) ? "true" : "false") + "\n";
            }
            entry["points"] = std::move(points);

            CheckAccumulator conv("limit_converged", cfg_.tol);
            conv.observe(limit.saturated ? inf : *std::ranges::max_element(limit.cauchy_gap), {});
            add_check(name, conv.finish());

            CheckAccumulator van("vanishing_control", 1.0 - 1e-6);
            van.observe(vanishing.holds ? (vanishing.initial > 0 ? vanishing.final / vanishing.initial : 0.0) : inf, {});
            add_check(name, van.finish());

            if (converged) {
                add_check(name, verify_stability_bound(phi_, limit.mapping, rho_, bound, grid_, cfg_.check_tol, shift));
                summary.worst_bound_slack = worst_bound_slack(phi_, limit.mapping, rho_, bound, grid_, shift);
            } else {
                throw RegimeError("series ratio r = " + detail::fixed17(ratio) + " >= 1: no stability bound exists", ratio);
            }
            add_check(name, verify_radical_additivity(limit.mapping, rho_, params_.s, grid_, cfg_.check_tol));
            add_check(name, verify_oddness(limit.mapping, rho_, grid_, cfg_.check_tol));
            add_check(name, verify_radical_equation(limit.mapping, params_, rho_, triples_, cfg_.check_tol));

            summary.converged = !limit.saturated;
            if (mode == LimitMode::expand) expand_limit_ = limit.mapping;
        } catch (const Error& e) {
            record_error(name, e, entry, summary);
        }
        methods_.push_back(std::move(entry));
        out.summaries.push_back(summary);
    }

    void corollary_entry(Json& entry, double tau, const std::vector<double>& series_bound) {
        const double threshold = params_.s * std::log2(tau * tau / 2.0);
        Json cor{{"threshold_p", json_number(threshold)},
                 {"formula_deviation",
                  "the closed form is scaled by theta; the commonly quoted form of this bound omits the factor"}};
        if (!(alpha_.exponent() > threshold)) {
            cor["applicable"] = false;
            entry["corollary"] = std::move(cor);
            return;
        }
        cor["applicable"] = true;
        CheckAccumulator agree("corollary_agreement", closed_form_rel_tol);
        Json values = Json::array();
        for (std::size_t i = 0; i < grid_.size(); ++i) {
            const double x = grid_[i];
            const double closed = corollary_bound(alpha_.theta(), alpha_.exponent(), params_.s, tau, x);
            values.push_back(json_number(closed));
            if (!series_bound.empty()) {
                const double scale = std::max({std::fabs(closed), std::fabs(series_bound[i]), 1e-300});
                agree.observe(std::fabs(closed - series_bound[i]) / scale, {x});
            }
        }
        cor["values"] = std::move(values);
        entry["corollary"] = std::move(cor);
        if (!series_bound.empty()) add_check("t1", agree.finish());
    }

    void run_fixed_point(ExperimentOutcome& out) {
        const std::string name = "fixedpoint";
        MethodSummary summary;
        summary.method = name;
        summary.rate = nan;
        summary.worst_bound_slack = nan;
        Json entry{{"method", name}};
        try {
            const auto samples = rho_hat_sample_set(grid_);
            const auto cert = estimate_L(alpha_, params_.s, samples);
            summary.rate = cert.L_hat;
            entry["certificate"] = Json{{"L_hat", json_number(cert.L_hat)},
                                        {"worst_sample", json_number(cert.worst_sample)},
                                        {"valid", cert.valid},
                                        {"samples_checked", cert.samples_checked},
                                        {"samples_skipped", cert.samples_skipped}};

            FixedPointOptions opts;
            opts.tol = cfg_.tol;
            opts.n_max = cfg_.n_max;
            opts.triples = triples_;
            opts.seed = cfg_.seed;
            opts.bound_slack = fixed_point_bound_slack;
            const auto fp = fixed_point_solve(phi_, params_, rho_, alpha_, grid_, opts);
            summary.achieved_n = fp.iterations;

            Json gaps = Json::array(), quasi = Json::array();
            for (double g : fp.gap_history) gaps.push_back(json_number(g));
            for (double k : fp.quasi_ratio) quasi.push_back(json_number(k));
            entry["iterations"] = fp.iterations;
            entry["saturated"] = fp.saturated;
            entry["rho_hat_estimate"] = "sampled";
            entry["rho_hat_gap"] = json_number(fp.rho_hat_gap);
            entry["gap_history"] = std::move(gaps);
            entry["quasi_contraction_ratio"] = std::move(quasi);
            entry["delta_hat_window"] = json_number(fp.delta_window);
            entry["worst_decay_excess"] = json_number(fp.worst_decay_excess);

            Json points = Json::array();
            CheckAccumulator bound_check("stability_bound", fixed_point_bound_slack);
            double slack = inf;
            for (std::size_t i = 0; i < grid_.size(); ++i) {
                const double x = grid_[i];
                points.push_back(Json{{"x", x},
                                      {"A", json_number(fp.values[i])},
                                      {"bound", json_number(fp.bound[i])},
                                      {"residual", json_number(fp.residual[i])},
                                      {"bound_ok", static_cast<bool>(fp.bound_ok[i])},
                                      {"gap", json_number(fp.point_gap[i])}});
                bound_check.observe(std::max(0.0, fp.residual[i] - fp.bound[i]), {x});
                slack = std::min(slack, fp.bound[i] - fp.residual[i]);
                csv_rows_ += name + "," + csv_number(x) + "," + csv_number(fp.values[i]) + "," + csv_number(fp.bound[i]) +
                             "," + csv_number(fp.point_gap[i]) + "," + std::to_string(fp.iterations) + "," +
                             (fp.saturated ? "true" : "false") + "\n";
            }
            entry["points"] = std::move(points);
            summary.worst_bound_slack = slack;

            CheckAccumulator conv("converged", cfg_.tol);
            conv.observe(fp.saturated ? inf : fp.rho_hat_gap, {});
            add_check(name, conv.finish());
            add_check(name, bound_check.finish());
            CheckAccumulator decay("geometric_decay", decay_slack);
            decay.observe(fp.worst_decay_excess, {});
            add_check(name, decay.finish());
            add_check(name, verify_radical_additivity(fp.mapping, rho_, params_.s, grid_, cfg_.check_tol));
            add_check(name, verify_radical_equation(fp.mapping, params_, rho_, triples_, cfg_.check_tol));

            summary.converged = !fp.saturated;
            fixed_limit_ = fp.mapping;
        } catch (const Error& e) {
            record_error(name, e, entry, summary);
        }
        methods_.push_back(std::move(entry));
        out.summaries.push_back(summary);
    }

    const ExperimentConfig& cfg_;
    EquationParams params_;
    ModularSpec rho_;
    FunctionHandle phi_;
    ControlFunction alpha_;
    SampleGrid grid_;
    std::vector<Triple> triples_;

    Json methods_ = Json::array();
    Json checks_ = Json::array();
    Json errors_ = Json::array();
    std::string csv_rows_;
    bool failed_ = false;
    std::optional<FunctionHandle> expand_limit_, fixed_limit_;
};

}  // namespace

ExperimentOutcome run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    return Pipeline(cfg).run();
}

void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open '" + path + "' for writing");
    out << text;
    out.flush();
    if (!out) throw IoError("failed writing '" + path + "'");
}

void write_outcome(const ExperimentOutcome& outcome, const ExperimentConfig& cfg) {
    const std::string text = cfg.format == OutputFormat::json ? to_json_text(outcome.report) : outcome.csv;
    if (cfg.output_path.empty()) {
        std::cout << text;
        std::cout.flush();
        if (!std::cout) throw IoError("failed writing to stdout");
        return;
    }
    write_text_file(cfg.output_path, text);
}

Json modular_report(const ModularSpec& spec) {
    const auto ladder = signed_ladder();
    const auto axioms = check_modular_axioms(spec, ladder);
    const auto positive = standard_ladder();
    const auto d2 = estimate_delta2(spec, positive);

    Json entries = Json::array();
    for (const auto& e : axioms.entries) {
        entries.push_back(Json{{"name", e.name},
                               {"passed", e.passed},
                               {"worst_violation", json_number(e.worst_violation)},
                               {"worst_sample", point_json(e.worst_sample)}});
    }
    bool passed = axioms.all_passed();
    if (const auto& tau = spec.delta2_tau()) passed = passed && !d2.diverged && d2.tau_hat <= *tau * (1.0 + 1e-9);
    return Json{{"spec", spec.to_string()},
                {"is_convex", spec.is_convex()},
                {"has_fatou", spec.has_fatou()},
                {"declared_tau", spec.delta2_tau() ? json_number(*spec.delta2_tau()) : Json(nullptr)},
                {"axioms", std::move(entries)},
                {"delta2_estimate", {{"tau_hat", json_number(d2.tau_hat)}, {"diverged", d2.diverged}}},
                {"passed", passed}};
}

}  // namespace modstab
