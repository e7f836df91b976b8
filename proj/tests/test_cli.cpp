#include <doctest.h>

#include <sstream>

#include "run.hpp"

using namespace weylforge;
using namespace weylforge::cli;
using nlohmann::json;

namespace {

std::vector<std::string> config_errors(const json& doc) {
    try {
        parse_config(doc);
    } catch (const ConfigError& e) {
        return e.errors();
    }
    return {};
}

bool mentions(const std::vector<std::string>& errs, const std::string& prefix) {
    for (const auto& e : errs)
        if (e.rfind(prefix, 0) == 0) return true;
    return false;
}

}  // namespace

TEST_CASE("complex literals") {
    CHECK(parse_complex("1+1i") == cd(1, 1));
    CHECK(parse_complex("i") == cd(0, 1));
    CHECK(parse_complex("-2i") == cd(0, -2));
    CHECK(parse_complex("0.5") == cd(0.5, 0));
    CHECK(parse_complex(" -1 - 0.25i ") == cd(-1, -0.25));
    CHECK(parse_complex("1e-3+2e+1i") == cd(1e-3, 20));
    CHECK_THROWS_AS(parse_complex("1+xi"), std::invalid_argument);
    CHECK_THROWS_AS(parse_complex(""), std::invalid_argument);
}

TEST_CASE("matrix entries accept numbers, pairs and strings") {
    const Mat m = parse_matrix(json::parse(R"([[1, [0, 2]], ["3-1i", 0]])"), "M");
    CHECK(m(0, 0) == cd(1, 0));
    CHECK(m(0, 1) == cd(0, 2));
    CHECK(m(1, 0) == cd(3, -1));
    CHECK_THROWS_AS(parse_matrix(json::parse("[[1, 2], [3]]"), "M"), ConfigError);
}

TEST_CASE("non-Hermitian B is reported at its path") {
    const json doc = json::parse(R"({
        "layout": {"nu_plus": 1, "nu_hat": 0},
        "coefficients": {"B": [[0, 1], [0, 0]], "Delta": [[1, 0], [0, 1]]},
        "interval": [0, 1],
        "lambda_grid": ["i"]
    })");
    CHECK(mentions(config_errors(doc), "coefficients.B"));
    json poly = doc;
    poly["coefficients"] = json::parse(R"({"representation": "polynomial",
        "B": [[[0, 0], [0, 0]], [[0, 1], [0, 0]]], "Delta": [[[1, 0], [0, 1]]]})");
    CHECK(mentions(config_errors(poly), "coefficients.B[1]"));
}

TEST_CASE("real-axis grid points and unknown builtins are rejected") {
    CHECK(mentions(config_errors(json::parse(R"({"builtin": "tan_system", "lambda_grid": ["i", 2]})")),
                   "lambda_grid[1]"));
    CHECK(mentions(config_errors(json::parse(R"({"builtin": "nope"})")), "builtin"));
    CHECK(mentions(config_errors(json::parse(R"({"builtin": "tan_system", "tolerances": {"bogus": 1}})")),
                   "tolerances.bogus"));
    CHECK(mentions(config_errors(json::parse(R"({"builtin": "tan_system", "tau": {"C0": [[1]], "C1": [[0, 1]]}})")),
                   "tau"));
}

TEST_CASE("rectangle grids") {
    const auto cfg = parse_config(json::parse(
        R"({"builtin": "tan_system", "lambda_grid": {"rectangle": {"re": [-1, 1], "im": [0.5, 2]}, "steps": [5, 4]}})"));
    CHECK(cfg.grid.size() == 20);
    CHECK(cfg.grid.front() == cd(-1, 0.5));
    CHECK(cfg.grid.back() == cd(1, 2));
}

TEST_CASE("tan system run: csv row and method agreement") {
    ProblemConfig cfg = parse_config(json::parse(R"({"builtin": "tan_system", "tau": "dirichlet",
        "lambda_grid": ["i", "-1+1i"], "method": "all"})"));
    cfg.opts.schedule = {5.0};
    const RunArtifacts art = run_grid(cfg, 2);
    CHECK(art.case_tag == "hamiltonian");
    CHECK(art.n_plus == 2);
    CHECK(art.entries.size() == 6);
    CHECK(art.agreement_checked);
    CHECK(art.agreement < 1e-8);
    CHECK(art.exit_code(true) == exit_ok);
    std::istringstream csv(csv_text(art));
    std::string header, row;
    std::getline(csv, header);
    std::getline(csv, row);
    CHECK(header == "lambda_re,lambda_im,method,block_row,block_col,m_re,m_im,converged");
    CHECK(row.rfind("0,1,krein,0,0,", 0) == 0);
    std::vector<std::string> fields;
    std::stringstream rs(row);
    for (std::string f; std::getline(rs, f, ',');) fields.push_back(f);
    REQUIRE(fields.size() == 8);
    CHECK(std::stod(fields[6]) == doctest::Approx(std::tanh(1.0)).epsilon(1e-9));
    CHECK(fields[7] == "true");
    const json rep = json::parse(report_text(art));
    CHECK(rep["all_passed"] == true);
    CHECK(rep["properties"]["direct"].contains("symmetry_5_7b"));
    CHECK(rep["properties"]["direct"].contains("inequality_5_21"));
    CHECK(rep["properties"]["direct"].contains("identity_5_39"));
}

TEST_CASE("runs are deterministic across thread counts") {
    const ProblemConfig cfg = parse_config(json::parse(R"({"builtin": "free_schrodinger_halfline",
        "lambda_grid": ["i", "1+2i", "-1-1i"], "method": "direct"})"));
    CHECK(csv_text(run_grid(cfg, 1)) == csv_text(run_grid(cfg, 4)));
}

TEST_CASE("empty grid yields no entries") {
    const auto cfg = parse_config(json::parse(R"({"builtin": "tan_system", "lambda_grid": []})"));
    const RunArtifacts art = run_grid(cfg);
    CHECK(art.entries.empty());
    CHECK(art.exit_code(true) == exit_ok);
}

TEST_CASE("too short a schedule is a non-convergence") {
    ProblemConfig cfg = parse_config(json::parse(R"({"builtin": "free_schrodinger_halfline",
        "lambda_grid": ["i"], "method": "truncation", "schedule": [2, 4]})"));
    const RunArtifacts art = run_grid(cfg, 1);
    REQUIRE(art.entries.size() == 1);
    CHECK_FALSE(art.entries[0].converged);
    CHECK(art.exit_code(false) == exit_nonconvergence);
}

TEST_CASE("tolerance overrides") {
    ProblemConfig cfg = parse_config(json::parse(R"({"builtin": "tan_system"})"));
    apply_override(cfg, "symmetry=1e-3");
    CHECK(cfg.tol.symmetry == 1e-3);
    CHECK_THROWS_AS(apply_override(cfg, "symmetry"), ConfigError);
    CHECK_THROWS_AS(apply_override(cfg, "nope=1"), ConfigError);
}
