#include <cmath>
#include <cstdio>
#include <filesystem>
#include <optional>

#include "format.hpp"
#include "modstab/error.hpp"
#include "modstab/experiment.hpp"

namespace modstab {

namespace {

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string csv_number(double v) { return std::isfinite(v) ? detail::fixed17(v) : (std::isnan(v) ? "" : detail::fixed17(v)); }

template <typename T>
std::vector<std::optional<T>> axis(const std::vector<T>& values) {
    if (values.empty()) return {std::nullopt};
    return {values.begin(), values.end()};
}

}  // namespace

SweepOutcome run_sweep(const SweepConfig& cfg, bool write_cell_reports) {
    cfg.validate();
    if (write_cell_reports) {
        std::error_code ec;
        std::filesystem::create_directories(cfg.output_dir, ec);
        if (ec) throw IoError("cannot create sweep directory '" + cfg.output_dir + "': " + ec.message());
    }

    SweepOutcome out;
    out.csv = "cell,s,q,p,theta,modular,method,converged,rate,worst_bound_slack,achieved_n,exit_code,error\n";
    const auto base_alpha = ControlFunction::parse(cfg.base.alpha);

    for (const auto& s : axis(cfg.axes.s)) {
        for (const auto& q : axis(cfg.axes.q)) {
            for (const auto& p : axis(cfg.axes.p)) {
                for (const auto& theta : axis(cfg.axes.theta)) {
                    for (const auto& modular : axis(cfg.axes.modular)) {
                        const std::size_t cell = out.cells++;
                        ExperimentConfig c = cfg.base;
                        if (s) c.equation.s = *s;
                        if (q) c.equation.q = *q;
                        if (modular) c.modular = *modular;

                        std::string error;
                        std::optional<ControlFunction> alpha = base_alpha;
                        if (p || theta) {
                            if (base_alpha.kind() != ControlFunction::Kind::power) {
                                error = "p/theta axes need a power control function";
                                alpha.reset();
                            } else {
                                try {
                                    alpha = ControlFunction::power(theta.value_or(base_alpha.theta()),
                                                                   p.value_or(base_alpha.exponent()));
                                } catch (const Error& e) {
                                    error = e.what();
                                    alpha.reset();
                                }
                            }
                        }
                        if (alpha) c.alpha = alpha->to_string();

                        std::optional<ExperimentOutcome> result;
                        if (error.empty()) {
                            try {
                                result = run_experiment(c);
                            } catch (const Error& e) {
                                error = e.what();
                            }
                        }

                        const std::string prefix =
                            std::to_string(cell) + "," + std::to_string(c.equation.s) + "," + csv_number(c.equation.q) +
                            "," +
                            (alpha && alpha->kind() == ControlFunction::Kind::power ? csv_number(alpha->exponent()) : "") +
                            "," +
                            (alpha && alpha->kind() == ControlFunction::Kind::power ? csv_number(alpha->theta()) : "") +
                            "," + csv_field(c.modular) + ",";

                        if (!result) {
                            out.csv += prefix + to_string(c.method) + ",false,,,0," +
                                       std::to_string(exit_code::config) + "," + csv_field(error) + "\n";
                            out.exit_code = exit_code::failed;
                            continue;
                        }
                        if (result->exit_code != exit_code::ok) out.exit_code = exit_code::failed;
                        for (const auto& m : result->summaries) {
                            out.csv += prefix + m.method + "," + (m.converged ? "true" : "false") + "," +
                                       csv_number(m.rate) + "," + csv_number(m.worst_bound_slack) + "," +
                                       std::to_string(m.achieved_n) + "," + std::to_string(result->exit_code) + "," +
                                       csv_field(m.error) + "\n";
                        }
                        if (write_cell_reports) {
                            char name[32];
                            std::snprintf(name, sizeof name, "cell_%05zu.json", cell);
                            write_text_file((std::filesystem::path(cfg.output_dir) / name).string(),
                                            to_json_text(result->report));
                        }
                    }
                }
            }
        }
    }
    if (write_cell_reports)
        write_text_file((std::filesystem::path(cfg.output_dir) / "summary.csv").string(), out.csv);
    return out;
}

}  // namespace modstab
