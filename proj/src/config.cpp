#include "modstab/config.hpp"

#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "modstab/error.hpp"
#include "modstab/expression.hpp"
#include "modstab/modular.hpp"
#include "parse_util.hpp"

namespace modstab {

const char* to_string(Method m) {
    switch (m) {
        case Method::t1: return "t1";
        case Method::t2: return "t2";
        case Method::fixedpoint: return "fixedpoint";
        case Method::all: return "all";
    }
    return "?";
}

const char* to_string(OutputFormat f) { return f == OutputFormat::json ? "json" : "csv"; }

Method parse_method(std::string_view text) {
    text = detail::trim(text);
    if (text == "t1") return Method::t1;
    if (text == "t2") return Method::t2;
    if (text == "fixedpoint") return Method::fixedpoint;
    if (text == "all") return Method::all;
    throw ConfigError("unknown method '" + std::string(text) + "' (expected t1, t2, fixedpoint or all)");
}

OutputFormat parse_format(std::string_view text) {
    text = detail::trim(text);
    if (text == "json") return OutputFormat::json;
    if (text == "csv") return OutputFormat::csv;
    throw ConfigError("unknown output format '" + std::string(text) + "' (expected json or csv)");
}

void ExperimentConfig::validate() const {
    if (!(grid.lo < grid.hi)) throw ConfigError("grid needs lo < hi");
    if (grid.count < 2) throw ConfigError("grid count must be >= 2");
    if (!(tol > 0.0)) throw ConfigError("tol must be positive");
    if (!(check_tol > 0.0)) throw ConfigError("check_tol must be positive");
    if (n_max < 1) throw ConfigError("n_max must be >= 1");
    try {
        EquationParams(equation.s, equation.q);
    } catch (const ParameterError& e) {
        throw ConfigError(e.what());
    }
    ModularSpec::parse(modular);
    FunctionHandle::parse(phi);
    ControlFunction::parse(alpha);
}

std::size_t SweepConfig::combinations() const {
    auto n = [](std::size_t k) { return std::max<std::size_t>(k, 1); };
    return n(axes.s.size()) * n(axes.q.size()) * n(axes.p.size()) * n(axes.theta.size()) * n(axes.modular.size());
}

void SweepConfig::validate() const {
    base.validate();
    if (combinations() > cap)
        throw ConfigError("sweep has " + std::to_string(combinations()) + " cells, above the cap of " +
                          std::to_string(cap));
    for (const auto& m : axes.modular) ModularSpec::parse(m);
    try {
        for (int v : axes.s) validate_exponent(v);
        for (double v : axes.q) EquationParams(3, v);
    } catch (const ParameterError& e) {
        throw ConfigError(std::string("sweep axis: ") + e.what());
    }
    for (double v : axes.p)
        if (!(v > 0.0)) throw ConfigError("sweep p values must be positive");
    for (double v : axes.theta)
        if (!(v >= 0.0)) throw ConfigError("sweep theta values must be nonnegative");
}

namespace {

using Handler = std::function<void(std::string_view)>;
using Section = std::map<std::string, Handler, std::less<>>;

void parse_sections(std::string_view text, std::map<std::string, Section, std::less<>>& sections) {
    std::string current;
    std::size_t line_no = 0;
    std::istringstream in{std::string(text)};
    std::string raw;
    while (std::getline(in, raw)) {
        ++line_no;
        const auto line = detail::trim(raw);
        if (line.empty() || line.front() == '#') continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError("line " + std::to_string(line_no) + ": malformed section header");
            current = std::string(detail::trim(line.substr(1, line.size() - 2)));
            if (!sections.contains(current))
                throw ConfigError("line " + std::to_string(line_no) + ": unknown section [" + current + "]");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError("line " + std::to_string(line_no) + ": expected key = value");
        if (current.empty()) throw ConfigError("line " + std::to_string(line_no) + ": key outside of a section");
        const auto key = detail::trim(line.substr(0, eq));
        const auto value = detail::trim(line.substr(eq + 1));
        auto& section = sections.find(current)->second;
        auto it = section.find(key);
        if (it == section.end())
            throw ConfigError("line " + std::to_string(line_no) + ": unknown key '" + std::string(key) + "' in [" +
                              current + "]");
        try {
            it->second(value);
        } catch (const ConfigError& e) {
            throw ConfigError("line " + std::to_string(line_no) + ": " + e.what());
        }
    }
}

std::vector<std::string_view> split(std::string_view text, char sep) {
    std::vector<std::string_view> out;
    while (true) {
        const auto pos = text.find(sep);
        const auto item = detail::trim(text.substr(0, pos));
        if (item.empty()) throw ConfigError("empty entry in list '" + std::string(text) + "'");
        out.push_back(item);
        if (pos == std::string_view::npos) break;
        text = text.substr(pos + 1);
    }
    return out;
}

std::map<std::string, Section, std::less<>> experiment_sections(ExperimentConfig& cfg) {
    std::map<std::string, Section, std::less<>> sections;
    sections["equation"] = {
        {"s", [&](std::string_view v) { cfg.equation.s = static_cast<int>(detail::parse_integer(v, "s")); }},
        {"q", [&](std::string_view v) { cfg.equation.q = detail::parse_double(v, "q"); }},
    };
    sections["model"] = {
        {"modular", [&](std::string_view v) { cfg.modular = std::string(v); }},
        {"phi", [&](std::string_view v) { cfg.phi = std::string(v); }},
        {"alpha", [&](std::string_view v) { cfg.alpha = std::string(v); }},
    };
    sections["run"] = {
        {"method", [&](std::string_view v) { cfg.method = parse_method(v); }},
        {"tol", [&](std::string_view v) { cfg.tol = detail::parse_double(v, "tol"); }},
        {"n_max", [&](std::string_view v) { cfg.n_max = static_cast<int>(detail::parse_integer(v, "n_max")); }},
        {"seed",
         [&](std::string_view v) {
             const auto seed = detail::parse_integer(v, "seed");
             if (seed < 0) throw ConfigError("seed must be nonnegative");
             cfg.seed = static_cast<std::uint64_t>(seed);
         }},
        {"check_tol", [&](std::string_view v) { cfg.check_tol = detail::parse_double(v, "check_tol"); }},
        {"audit_triples",
         [&](std::string_view v) {
             const auto n = detail::parse_integer(v, "audit_triples");
             if (n < 0) throw ConfigError("audit_triples must be nonnegative");
             cfg.audit_triples = static_cast<std::size_t>(n);
         }},
    };
    sections["grid"] = {
        {"lo", [&](std::string_view v) { cfg.grid.lo = detail::parse_double(v, "grid lo"); }},
        {"hi", [&](std::string_view v) { cfg.grid.hi = detail::parse_double(v, "grid hi"); }},
        {"count",
         [&](std::string_view v) {
             const auto n = detail::parse_integer(v, "grid count");
             if (n < 2) throw ConfigError("grid count must be >= 2");
             cfg.grid.count = static_cast<std::size_t>(n);
         }},
    };
    sections["output"] = {
        {"path", [&](std::string_view v) { cfg.output_path = std::string(v); }},
        {"format", [&](std::string_view v) { cfg.format = parse_format(v); }},
    };
    return sections;
}

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view text) {
    ExperimentConfig cfg;
    auto sections = experiment_sections(cfg);
    parse_sections(text, sections);
    cfg.validate();
    return cfg;
}

SweepConfig parse_sweep_config(std::string_view text) {
    SweepConfig sweep;
    auto sections = experiment_sections(sweep.base);
    auto& axes = sweep.axes;
    sections["sweep"] = {
        {"s",
         [&](std::string_view v) {
             for (auto item : split(v, ',')) axes.s.push_back(static_cast<int>(detail::parse_integer(item, "sweep s")));
         }},
        {"q", [&](std::string_view v) { for (auto item : split(v, ',')) axes.q.push_back(detail::parse_double(item, "sweep q")); }},
        {"p", [&](std::string_view v) { for (auto item : split(v, ',')) axes.p.push_back(detail::parse_double(item, "sweep p")); }},
        {"theta",
         [&](std::string_view v) {
             for (auto item : split(v, ',')) axes.theta.push_back(detail::parse_double(item, "sweep theta"));
         }},
        {"modular", [&](std::string_view v) { for (auto item : split(v, ';')) axes.modular.emplace_back(item); }},
        {"dir", [&](std::string_view v) { sweep.output_dir = std::string(v); }},
        {"cap",
         [&](std::string_view v) {
             const auto n = detail::parse_integer(v, "sweep cap");
             if (n < 1) throw ConfigError("sweep cap must be >= 1");
             sweep.cap = static_cast<std::size_t>(n);
         }},
    };
    parse_sections(text, sections);
    sweep.validate();
    return sweep;
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

}  // namespace modstab
