#pragma once

#include <string>
#include <vector>

#include "modstab/config.hpp"
#include "modstab/json_writer.hpp"
#include "modstab/modular.hpp"

namespace modstab {

/// Process exit codes of the command-line front end.
namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int failed = 2;  // regime error or failed check
inline constexpr int io = 3;
inline constexpr int config = 4;
}  // namespace exit_code

inline constexpr const char* report_schema = "modstab-report/1";

/// One-line outcome of a single construction, used for sweep rows.
struct MethodSummary {
    std::string method;
    bool converged = false;
    double rate = 0.0;  // series ratio r, or L_hat for the fixed-point route
    double worst_bound_slack = 0.0;
    int achieved_n = 0;
    std::string error;  // empty when the construction ran
};

struct ExperimentOutcome {
    Json report;
    std::string csv;  // x, A(x), bound, gap, n, saturated rows per method
    std::vector<MethodSummary> summaries;
    int exit_code = exit_code::ok;
};

/// Runs the pipelines selected by cfg.method: defect audit, limit
/// construction, series and closed-form bounds, and every verification check.
/// Regime and contract errors become report entries with exit code 2.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg);

/// Renders the outcome in cfg.format and writes it to cfg.output_path, or to
/// stdout when the path is empty. Throws IoError.
void write_outcome(const ExperimentOutcome& outcome, const ExperimentConfig& cfg);

/// Axiom report, Delta_2 estimate on the standard ladder, pass flag.
Json modular_report(const ModularSpec& spec);

struct SweepOutcome {
    std::string csv;
    std::size_t cells = 0;
    int exit_code = exit_code::ok;
};

/// Runs every cell of the sweep in lexicographic axis order (s, q, p, theta,
/// modular). Writes a per-cell JSON report into cfg.output_dir when
/// `write_cell_reports` is set. Cell errors are recorded in their row.
SweepOutcome run_sweep(const SweepConfig& cfg, bool write_cell_reports = true);

/// Writes `text` to `path` atomically enough for reports; throws IoError.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace modstab
