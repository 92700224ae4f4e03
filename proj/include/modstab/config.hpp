#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "modstab/radical.hpp"

namespace modstab {

enum class Method { t1, t2, fixedpoint, all };
enum class OutputFormat { json, csv };

const char* to_string(Method m);
const char* to_string(OutputFormat f);
Method parse_method(std::string_view text);
OutputFormat parse_format(std::string_view text);

struct GridSpec {
    double lo = -10.0;
    double hi = 10.0;
    std::size_t count = 41;
};

/// One experiment. Config files are flat key = value lines grouped under
/// section headers:
///
///   [equation]   s, q
///   [model]      modular, phi, alpha
///   [run]        method, tol, n_max, seed, check_tol, audit_triples
///   [grid]       lo, hi, count
///   [output]     path, format
///
/// Blank lines and lines starting with '#' are ignored.
struct ExperimentConfig {
    EquationParams equation;
    std::string modular = "power:p=1";
    std::string phi = "mono(1,3)";
    std::string alpha = "const:eps=0.1";
    Method method = Method::t2;
    GridSpec grid;
    double tol = 1e-9;
    int n_max = 60;
    std::uint64_t seed = 42;
    double check_tol = 1e-6;
    std::size_t audit_triples = 500;
    std::string output_path;  // empty: stdout
    OutputFormat format = OutputFormat::json;

    /// Throws ConfigError on a violated invariant (count >= 2, lo < hi, tol > 0, ...).
    void validate() const;
};

/// Sweep axes; an empty axis keeps the base value. `p` and `theta` rewrite a
/// power control function. Numeric axes are comma separated, the modular
/// axis is ';' separated.
struct SweepAxes {
    std::vector<int> s;
    std::vector<double> q;
    std::vector<double> p;
    std::vector<double> theta;
    std::vector<std::string> modular;
};

/// An ExperimentConfig plus a [sweep] section with the axes, `cap` and `dir`.
struct SweepConfig {
    ExperimentConfig base;
    SweepAxes axes;
    std::string output_dir = "sweep_out";
    std::size_t cap = 10000;

    std::size_t combinations() const;
    void validate() const;
};

ExperimentConfig parse_experiment_config(std::string_view text);
SweepConfig parse_sweep_config(std::string_view text);

/// Reads a whole file; throws IoError.
std::string read_text_file(const std::string& path);

}  // namespace modstab
