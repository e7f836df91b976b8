#include <iostream>

#include <CLI11.hpp>

#include "run.hpp"

using namespace weylforge;
using namespace weylforge::cli;

int main(int argc, char** argv) {
    CLI::App app{"weylforge: m-functions of symmetric systems"};
    app.require_subcommand(1);

    std::string config_path, method, out_dir = ".", format = "csv";
    std::vector<std::string> overrides;
    bool strict = false;
    unsigned threads = 0;

    auto* run = app.add_subcommand("run", "evaluate m on the configured lambda grid");
    run->add_option("config", config_path, "problem JSON")->required();
    run->add_option("--method", method, "krein|direct|truncation|all")
        ->check(CLI::IsMember({"krein", "direct", "truncation", "all"}));
    run->add_option("--out", out_dir, "output directory");
    run->add_option("--format", format, "csv|json")->check(CLI::IsMember({"csv", "json"}));
    run->add_flag("--strict", strict, "exit 4 when a property check fails");
    run->add_option("--tol-override", overrides, "KEY=VAL");
    run->add_option("--threads", threads, "worker threads (0: hardware)");

    auto* check = app.add_subcommand("check", "validate a problem JSON");
    check->add_option("config", config_path, "problem JSON")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : exit_invalid_config;
    }

    ProblemConfig cfg;
    try {
        cfg = load_config(config_path);
        if (!method.empty()) cfg.method = parse_method(method);
        for (const auto& kv : overrides) apply_override(cfg, kv);
    } catch (const ConfigError& e) {
        for (const auto& msg : e.errors()) std::cerr << "error: " << msg << "\n";
        return exit_invalid_config;
    }

    if (*check) {
        const DecomposingTriplet T = build_triplet(cfg.system);
        std::cout << cfg.label << ": " << to_string(T.cls.tag) << ", deficiency ("
                  << (T.alpha == 1 ? T.dim_H0 : T.dim_H1) << ", " << (T.alpha == 1 ? T.dim_H1 : T.dim_H0) << "), "
                  << cfg.grid.size() << " grid points\n";
        return exit_ok;
    }

    const RunArtifacts art = run_grid(cfg, threads);
    try {
        emit_report(art, out_dir, format == "json" ? Format::json : Format::csv);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    for (const auto& e : art.entries)
        if (!e.converged)
            std::cerr << "no result at " << e.lambda << " (" << to_string(e.method) << "): " << e.error << "\n";
    const int code = art.exit_code(strict);
    if (code == exit_violation) std::cerr << "property check failed, see report.json\n";
    return code;
}
