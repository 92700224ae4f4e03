#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "modstab/config.hpp"
#include "modstab/experiment.hpp"
#include "support/process.hpp"

using namespace modstab;
namespace fs = std::filesystem;

namespace {

const std::string cli = MODSTAB_CLI_PATH;
const std::string config_dir = MODSTAB_CONFIG_DIR;

ExperimentConfig load(const std::string& name) { return parse_experiment_config(read_text_file(config_dir + "/" + name)); }

const Json* find_check(const Json& report, const std::string& name) {
    for (const auto& c : report["checks"])
        if (c["name"] == name) return &c;
    return nullptr;
}

fs::path scratch(const std::string& name) {
    const auto dir = fs::temp_directory_path() / ("modstab_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

}  // namespace

TEST_SUITE("experiment") {

TEST_CASE("expanding run with a sine perturbation passes every check") {
    const auto out = run_experiment(load("t2_sine.cfg"));
    CHECK(out.exit_code == exit_code::ok);
    const auto& r = out.report;
    CHECK(r["schema"] == report_schema);
    CHECK(r["passed"] == true);
    CHECK(r["errors"].empty());
    REQUIRE(r["methods"].size() == 1);
    for (const auto& pt : r["methods"][0]["points"]) CHECK(pt["bound"].get<double>() == doctest::Approx(0.1));
    for (const auto& c : r["checks"]) {
        CAPTURE(c["name"].get<std::string>());
        CHECK(c["passed"] == true);
    }
    CHECK(find_check(r, "t2/stability_bound") != nullptr);
    CHECK(find_check(r, "t2/radical_equation") != nullptr);
    REQUIRE(out.summaries.size() == 1);
    CHECK(out.summaries[0].converged);
    CHECK(out.summaries[0].rate == 0.5);
}

TEST_CASE("divergent constant control under contraction") {
    const auto out = run_experiment(load("t1_const_divergent.cfg"));
    CHECK(out.exit_code == exit_code::failed);
    REQUIRE_FALSE(out.report["errors"].empty());
    CHECK(out.report["errors"][0]["kind"] == "regime");
    CHECK(out.report["errors"][0]["value"].get<double>() == 2.0);
    for (const auto& pt : out.report["methods"][0]["points"]) CHECK(pt["bound"].is_null());
}

TEST_CASE("fixed point route with a linear perturbation") {
    const auto out = run_experiment(load("fixedpoint_linear.cfg"));
    CHECK(out.exit_code == exit_code::ok);
    REQUIRE(out.summaries.size() == 1);
    CHECK(out.summaries[0].rate == doctest::Approx(std::exp2(-2.0 / 3)).epsilon(1e-12));
    CHECK(find_check(out.report, "fixedpoint/geometric_decay")->at("passed") == true);
}

TEST_CASE("fixed point route outside its regime") {
    const auto out = run_experiment(load("fixedpoint_p6.cfg"));
    CHECK(out.exit_code == exit_code::failed);
    CHECK(out.report["errors"][0]["value"].get<double>() == doctest::Approx(2.0).epsilon(1e-12));
}

TEST_CASE("all methods include the cross check") {
    auto cfg = parse_experiment_config(R"(
[model]
phi = mono(1,3) + mono(0.01,1)
alpha = power:theta=0.02,p=1
[run]
method = all
)");
    const auto out = run_experiment(cfg);
    const auto* cc = find_check(out.report, "cross_check");
    REQUIRE(cc != nullptr);
    CHECK(cc->at("passed") == true);
    // p = 1 < s leaves the contracting series divergent, so the run as a whole fails.
    CHECK(out.exit_code == exit_code::failed);
}

TEST_CASE("csv output") {
    auto cfg = load("t2_sine.cfg");
    cfg.format = OutputFormat::csv;
    const auto out = run_experiment(cfg);
    std::istringstream in(out.csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "method,x,A,bound,gap,n,saturated");
    int rows = 0;
    while (std::getline(in, line)) {
        CHECK(line.rfind("t2,", 0) == 0);
        ++rows;
    }
    CHECK(rows == 41);
}

TEST_CASE("reports are deterministic") {
    const auto cfg = load("t1_envnoise.cfg");
    CHECK(to_json_text(run_experiment(cfg).report) == to_json_text(run_experiment(cfg).report));
}

TEST_CASE("json text formatting") {
    Json j;
    j["a"] = json_number(0.1);
    j["b"] = json_number(std::numeric_limits<double>::infinity());
    j["c"] = json_number(std::nan(""));
    const auto text = to_json_text(j);
    CHECK(text.find("\"a\": 0.10000000000000001") != std::string::npos);
    CHECK(text.find("\"b\": null") != std::string::npos);
    CHECK(text.find("\"c\": null") != std::string::npos);
    CHECK(text.back() == '\n');
}

TEST_CASE("sweep rows and cell reports") {
    auto sw = parse_sweep_config(read_text_file(config_dir + "/sweep_p.cfg"));
    const auto dir = scratch("sweep_lib");
    sw.output_dir = dir.string();
    const auto out = run_sweep(sw);
    CHECK(out.cells == 5);
    CHECK(out.exit_code == exit_code::failed);
    CHECK(fs::exists(dir / "cell_00000.json"));
    CHECK(fs::exists(dir / "cell_00004.json"));
    std::istringstream in(out.csv);
    std::string line;
    std::getline(in, line);
    CHECK(line == "cell,s,q,p,theta,modular,method,converged,rate,worst_bound_slack,achieved_n,exit_code,error");
    std::vector<std::string> rows;
    while (std::getline(in, line)) rows.push_back(line);
    REQUIRE(rows.size() == 5);
    CHECK(rows[0].find(",t2,true,") != std::string::npos);
    CHECK(rows[1].find(",t2,true,") != std::string::npos);
    for (int i = 2; i < 5; ++i) CHECK(rows[i].find(",t2,false,") != std::string::npos);
    fs::remove_all(dir);
}

TEST_CASE("modular report") {
    const auto r = modular_report(ModularSpec::exp());
    CHECK(r["declared_tau"].is_null());
    CHECK(r["delta2_estimate"]["diverged"] == true);
    const auto p = modular_report(ModularSpec::power(3));
    CHECK(p["passed"] == true);
    CHECK(p["delta2_estimate"]["tau_hat"].get<double>() == doctest::Approx(8).epsilon(1e-9));
}

TEST_CASE("cli exit codes") {
    using testproc::quote;
    using testproc::run;
    CHECK(run(quote(cli) + " run " + quote(config_dir + "/t2_sine.cfg") + " > /dev/null").exit_code == 0);
    CHECK(run(quote(cli) + " run " + quote(config_dir + "/t1_const_divergent.cfg") + " > /dev/null").exit_code == 2);
    CHECK(run(quote(cli) + " run /nonexistent/file.cfg 2> /dev/null").exit_code == 3);
    CHECK(run(quote(cli) + " check-modular power:p=2 > /dev/null").exit_code == 0);
    CHECK(run(quote(cli) + " check-modular bogus 2> /dev/null").exit_code == 4);

    const auto dir = scratch("cli");
    const auto bad = dir / "bad.cfg";
    std::ofstream(bad) << "[equation]\ns = 4\n";
    CHECK(run(quote(cli) + " run " + quote(bad.string()) + " 2> /dev/null").exit_code == 4);
    fs::remove_all(dir);
}

TEST_CASE("cli output is byte identical across runs and honors overrides") {
    using testproc::quote;
    using testproc::run;
    const std::string cmd = quote(cli) + " run " + quote(config_dir + "/t1_envnoise.cfg");
    const auto a = run(cmd), b = run(cmd);
    CHECK(a.exit_code == 0);
    CHECK(!a.out.empty());
    CHECK(a.out == b.out);

    const auto csv = run(quote(cli) + " run " + quote(config_dir + "/t2_sine.cfg") + " --format csv");
    CHECK(csv.out.rfind("method,x,A,bound,gap,n,saturated\n", 0) == 0);

    const auto loose = run(quote(cli) + " run " + quote(config_dir + "/t2_sine.cfg") + " --tol 1e-3 --n-max 5");
    CHECK(loose.out.find("\"tol\": 0.001") != std::string::npos);
    CHECK(loose.out.find("\"n_max\": 5") != std::string::npos);

    const auto dir = scratch("cli_out");
    const auto path = (dir / "report.json").string();
    CHECK(run(cmd + " --out " + quote(path)).exit_code == 0);
    CHECK(read_text_file(path) == a.out);
    fs::remove_all(dir);
}

TEST_CASE("cli sweep writes a summary") {
    using testproc::quote;
    using testproc::run;
    const auto dir = scratch("cli_sweep");
    const auto r = run(quote(cli) + " sweep " + quote(config_dir + "/sweep_p.cfg") + " --out " + quote(dir.string()) +
                       " > /dev/null");
    CHECK(r.exit_code == 2);
    CHECK(fs::exists(dir / "summary.csv"));
    CHECK(fs::exists(dir / "cell_00004.json"));
    fs::remove_all(dir);
}

}  // TEST_SUITE
