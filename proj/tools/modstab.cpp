// modstab: build radical mappings from perturbed solutions and verify their
// stability bounds.
//
//   modstab run <config>            one experiment, JSON or CSV report
//   modstab sweep <config>          parameter sweep, summary CSV + per-cell reports
//   modstab check-modular <spec>    axiom report for a modular such as "power:p=2"

#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "modstab/config.hpp"
#include "modstab/error.hpp"
#include "modstab/experiment.hpp"
#include "modstab/json_writer.hpp"

namespace {

struct Overrides {
    std::optional<double> tol;
    std::optional<int> n_max;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> format;
    std::optional<std::string> out;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--tol", tol, "Limit/iteration tolerance");
        cmd->add_option("--n-max", n_max, "Maximum number of scaling steps");
        cmd->add_option("--seed", seed, "Seed for the audit triples");
        cmd->add_option("--format", format, "Report format")->check(CLI::IsMember({"json", "csv"}));
        cmd->add_option("--out", out, "Output path (directory for sweep)");
    }

    void apply(modstab::ExperimentConfig& cfg) const {
        if (tol) cfg.tol = *tol;
        if (n_max) cfg.n_max = *n_max;
        if (seed) cfg.seed = *seed;
        if (format) cfg.format = modstab::parse_format(*format);
    }
};

int run_command(const std::string& path, const Overrides& o) {
    auto cfg = modstab::parse_experiment_config(modstab::read_text_file(path));
    o.apply(cfg);
    if (o.out) cfg.output_path = *o.out;
    cfg.validate();
    const auto outcome = modstab::run_experiment(cfg);
    modstab::write_outcome(outcome, cfg);
    return outcome.exit_code;
}

int sweep_command(const std::string& path, const Overrides& o) {
    auto cfg = modstab::parse_sweep_config(modstab::read_text_file(path));
    o.apply(cfg.base);
    if (o.out) cfg.output_dir = *o.out;
    const auto outcome = modstab::run_sweep(cfg);
    std::cout << outcome.csv;
    return outcome.exit_code;
}

int check_modular_command(const std::string& text, const Overrides& o) {
    const auto spec = modstab::ModularSpec::parse(text);
    auto doc = modstab::modular_report(spec);
    const bool passed = doc["passed"].get<bool>();
    modstab::Json report{{"schema", modstab::report_schema}, {"modular", std::move(doc)}};
    const auto json = modstab::to_json_text(report);
    if (o.out)
        modstab::write_text_file(*o.out, json);
    else
        std::cout << json;
    return passed ? modstab::exit_code::ok : modstab::exit_code::failed;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Stability verification for the radical functional equation in modular spaces"};
    app.require_subcommand(1);

    std::string run_path, sweep_path, modular_text;
    Overrides run_o, sweep_o, modular_o;

    auto* run = app.add_subcommand("run", "Run one experiment from a config file");
    run->add_option("config", run_path, "Config file")->required();
    run_o.add_to(run);

    auto* sweep = app.add_subcommand("sweep", "Run a parameter sweep from a config file");
    sweep->add_option("config", sweep_path, "Sweep config file")->required();
    sweep_o.add_to(sweep);

    auto* check = app.add_subcommand("check-modular", "Check modular axioms for a spec string");
    check->add_option("spec", modular_text, "Modular spec, e.g. power:p=2 or exp")->required();
    modular_o.add_to(check);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : modstab::exit_code::config;
    }

    try {
        if (*run) return run_command(run_path, run_o);
        if (*sweep) return sweep_command(sweep_path, sweep_o);
        return check_modular_command(modular_text, modular_o);
    } catch (const modstab::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return modstab::exit_code::config;
    } catch (const modstab::ParameterError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return modstab::exit_code::config;
    } catch (const modstab::IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return modstab::exit_code::io;
    } catch (const modstab::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return modstab::exit_code::failed;
    }
}
