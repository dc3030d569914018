#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "nlmc/scenario.hpp"

#include "helpers.hpp"

using namespace nlmc;
using test::thrown_code;

namespace fs = std::filesystem;

namespace {

std::string scenario_path(const std::string& stem) {
    return std::string(SCENARIO_DIR) + "/" + stem + ".json";
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

Errc parse_code(const std::string& text) {
    return thrown_code([&] { parse_scenario(text); });
}

std::string parse_message(const std::string& text) {
    try {
        parse_scenario(text);
    } catch (const Error& e) {
        return e.what();
    }
    return "";
}

fs::path fresh_dir(const std::string& leaf) {
    const fs::path dir = fs::temp_directory_path() / "nlmc-tests" / leaf;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

} // namespace

TEST_CASE("every shipped scenario file loads") {
    const std::vector<std::string> stems = {
        "bandwagon2",  "antimonotone3", "flipflop2",       "pwl-oscillator2", "ar-linear",
        "ar-logistic", "affine-cone",   "mm1",             "mg1-det",         "lindley-fixture",
        "two-state-eq", "wealth-fixture", "table-demo"};
    for (const auto& stem : stems) {
        CAPTURE(stem);
        const Scenario s = load_scenario(scenario_path(stem));
        CHECK(s.name == stem);
        CHECK((s.model.has_value() || s.affine.has_value()));
    }

    const Scenario queue = load_scenario(scenario_path("lindley-fixture"));
    CHECK(queue.queue.has_value());
    CHECK(queue.queue_pipeline);
    CHECK(load_scenario(scenario_path("two-state-eq")).nleq.has_value());
    CHECK(load_scenario(scenario_path("ar-logistic")).restrict_interval.has_value());

    CHECK(thrown_code([] { load_scenario("/nonexistent/missing.json"); }) == Errc::parse_error);
}

TEST_CASE("row tables interpolate between aggregator knots") {
    const Scenario s = load_scenario(scenario_path("table-demo"));
    REQUIRE(s.model.has_value());
    // Knots at h = 0 and h = 0.5 bracket 0.25 halfway.
    const Dist row = s.model->kernel.row(0, 0.25);
    CHECK(row[0] == doctest::Approx(0.75).epsilon(1e-14));
    CHECK(row[1] == doctest::Approx(0.25).epsilon(1e-14));
    // Beyond the last knot the rows clamp.
    const Dist high = s.model->kernel.row(0, 0.9);
    CHECK(high[0] == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("schema violations are rejected with named fields") {
    CHECK(parse_code("{ not json") == Errc::parse_error);
    CHECK(parse_code(R"({"builtin": "flipflop2"})") == Errc::validation_error); // no name

    const std::string missing_domain = R"({
        "name": "t",
        "table": {"states": [0, 1], "h_knots": [0, 1],
                  "rows": [[[1, 0], [0.5, 0.5]], [[1, 0], [0.5, 0.5]]]},
        "aggregator": {"weights": [0, 1]}
    })";
    CHECK(parse_code(missing_domain) == Errc::validation_error);
    CHECK(parse_message(missing_domain).find("h_domain") != std::string::npos);

    const std::string unknown_builtin = R"({"name": "t", "builtin": "warp-core"})";
    CHECK(parse_code(unknown_builtin) == Errc::validation_error);
    CHECK(parse_message(unknown_builtin).find("bandwagon2") != std::string::npos);

    const std::string unknown_field = R"({"name": "t", "builtin": "flipflop2", "stepz": 3})";
    CHECK(parse_code(unknown_field) == Errc::validation_error);
    CHECK(parse_message(unknown_field).find("stepz") != std::string::npos);

    const std::string two_blocks = R"({
        "name": "t", "builtin": "flipflop2",
        "affine": {"a": [0.5], "beta": [1], "gamma": [1]}
    })";
    CHECK(parse_code(two_blocks) == Errc::validation_error);

    const std::string weights_without_table =
        R"({"name": "t", "builtin": "flipflop2", "aggregator": {"weights": [0, 1]}})";
    CHECK(parse_code(weights_without_table) == Errc::validation_error);

    const std::string off_simplex = R"({
        "name": "t",
        "table": {"states": [0, 1], "h_knots": [0, 1],
                  "rows": [[[0.9, 0.0], [0.5, 0.5]], [[1, 0], [0.5, 0.5]]]},
        "aggregator": {"weights": [0, 1]},
        "h_domain": [0, 1]
    })";
    CHECK(parse_code(off_simplex) == Errc::mass_not_one);

    CHECK(parse_code(R"({"name": "t", "builtin": "flipflop2", "steps": 0})") ==
          Errc::validation_error);
    CHECK(parse_code(R"({"name": "t", "builtin": "flipflop2", "tol": 0})") ==
          Errc::validation_error);
    CHECK(parse_code(R"({"name": "bad name!", "builtin": "flipflop2"})") ==
          Errc::validation_error);
}

TEST_CASE("command words parse or fail loudly") {
    CHECK(parse_command("certify") == Command::certify);
    CHECK(parse_command("solve") == Command::solve);
    CHECK(parse_command("simulate") == Command::simulate);
    CHECK(parse_command("queue") == Command::queue);
    CHECK(parse_command("nleq") == Command::nleq);
    CHECK(thrown_code([] { parse_command("frobnicate"); }) == Errc::validation_error);
}

TEST_CASE("certification gating drives the exit code") {
    const Scenario band = load_scenario(scenario_path("bandwagon2"));
    std::ostringstream log;

    RunOptions plain;
    plain.out_dir = fresh_dir("gate-plain").string();
    CHECK(run(Command::certify, band, plain, log) == 0);

    RunOptions gated;
    gated.out_dir = fresh_dir("gate-strict").string();
    gated.require_certified = true;
    CHECK(run(Command::certify, band, gated, log) == 2);

    const Scenario flip = load_scenario(scenario_path("flipflop2"));
    RunOptions ok;
    ok.out_dir = fresh_dir("gate-ok").string();
    ok.require_certified = true;
    CHECK(run(Command::certify, flip, ok, log) == 0);

    const std::string report = slurp(fs::path(gated.out_dir) / "bandwagon2.certify.txt");
    CHECK(report.find("[d_preserving] family=sd holds=yes") != std::string::npos);
    CHECK(report.find("[d_decreasing] family=sd holds=no") != std::string::npos);
    CHECK(report.find("counterexample:") != std::string::npos);
    CHECK(report.find("[property_U] holds=yes") != std::string::npos);
}

TEST_CASE("solve reports are byte-identical across runs") {
    const Scenario s = load_scenario(scenario_path("antimonotone3"));
    std::ostringstream log;

    RunOptions first;
    first.out_dir = fresh_dir("det-a").string();
    REQUIRE(run(Command::solve, s, first, log) == 0);
    RunOptions second;
    second.out_dir = fresh_dir("det-b").string();
    REQUIRE(run(Command::solve, s, second, log) == 0);

    for (const char* leaf :
         {"antimonotone3.solve.txt", "antimonotone3.phi.csv", "antimonotone3.equilibria.csv"}) {
        CAPTURE(leaf);
        CHECK(slurp(fs::path(first.out_dir) / leaf) == slurp(fs::path(second.out_dir) / leaf));
    }

    const std::string report = slurp(fs::path(first.out_dir) / "antimonotone3.solve.txt");
    CHECK(report.find("verdict: multiple_found") != std::string::npos);
    CHECK(report.find("equilibria: 2") != std::string::npos);
}

TEST_CASE("simulate honors step overrides and writes the trajectory") {
    const Scenario s = load_scenario(scenario_path("flipflop2"));
    std::ostringstream log;
    RunOptions opts;
    opts.out_dir = fresh_dir("sim").string();
    opts.steps = 4;
    REQUIRE(run(Command::simulate, s, opts, log) == 0);

    const std::string csv = slurp(fs::path(opts.out_dir) / "flipflop2.trajectory.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 6);
    CHECK(csv.rfind("t,p0,p1,h\n", 0) == 0);

    const std::string summary = slurp(fs::path(opts.out_dir) / "flipflop2.simulate.txt");
    CHECK(summary.find("steps: 4") != std::string::npos);
    CHECK(summary.find("cycle: period=2 onset=0") != std::string::npos);
}

TEST_CASE("queue and nleq commands surface their closed-form numbers") {
    std::ostringstream log;

    const Scenario mm1 = load_scenario(scenario_path("mm1"));
    RunOptions qopts;
    qopts.out_dir = fresh_dir("queue").string();
    REQUIRE(run(Command::queue, mm1, qopts, log) == 0);
    const std::string queue_report = slurp(fs::path(qopts.out_dir) / "mm1.queue.txt");
    CHECK(queue_report.find("lambda: 0.61803398874989") != std::string::npos);
    CHECK(queue_report.find("identity_residual:") != std::string::npos);

    const Scenario eq = load_scenario(scenario_path("two-state-eq"));
    RunOptions nopts;
    nopts.out_dir = fresh_dir("nleq").string();
    REQUIRE(run(Command::nleq, eq, nopts, log) == 0);
    const std::string nleq_report = slurp(fs::path(nopts.out_dir) / "two-state-eq.nleq.txt");
    CHECK(nleq_report.find("a: 0.41666666") != std::string::npos);
    CHECK(nleq_report.find("residual:") != std::string::npos);

    // Commands that need a missing block are refused.
    CHECK(thrown_code([&] {
              std::ostringstream sink;
              RunOptions opts;
              opts.out_dir = fresh_dir("mismatch").string();
              run(Command::queue, load_scenario(scenario_path("flipflop2")), opts, sink);
          }) == Errc::validation_error);
}

TEST_CASE("affine scenarios certify without a kernel") {
    const Scenario s = load_scenario(scenario_path("affine-cone"));
    REQUIRE(s.affine.has_value());
    std::ostringstream log;
    RunOptions opts;
    opts.out_dir = fresh_dir("affine").string();
    opts.require_certified = true;
    CHECK(run(Command::certify, s, opts, log) == 0);
    const std::string report = slurp(fs::path(opts.out_dir) / "affine-cone.certify.txt");
    CHECK(report.find("[affine_cone]") != std::string::npos);
    CHECK(report.find("holds=yes") != std::string::npos);

    CHECK(thrown_code([&] {
              std::ostringstream sink;
              RunOptions o;
              o.out_dir = fresh_dir("affine-solve").string();
              run(Command::solve, s, o, sink);
          }) == Errc::validation_error);
}

TEST_CASE("initial distributions from the scenario must fit the space") {
    Scenario s = load_scenario(scenario_path("flipflop2"));
    s.mu0 = {0.5, 0.25, 0.25};
    std::ostringstream log;
    RunOptions opts;
    opts.out_dir = fresh_dir("bad-mu0").string();
    CHECK_THROWS_AS(run(Command::simulate, s, opts, log), Error);
}
