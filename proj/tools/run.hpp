#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "config.hpp"

namespace weylforge::cli {

enum ExitCode { exit_ok = 0, exit_invalid_config = 2, exit_nonconvergence = 3, exit_violation = 4 };

struct GridEntry {
    cd lambda{};
    Method method = Method::direct;
    Mat m;
    bool converged = false;
    std::string error;
    MDiagnostics diagnostics;
};

struct RunArtifacts {
    std::string label;
    std::string case_tag;
    int n_plus = 0;
    int n_minus = 0;
    std::vector<GridEntry> entries;  // grid index major, method minor
    std::map<Method, PropertyReport> reports;
    double agreement = 0.0;          // max |krein - direct| when both ran
    bool agreement_checked = false;
    double agreement_tol = 1e-8;

    bool any_failed_point() const;
    bool all_properties_passed() const;
    int exit_code(bool strict) const;
};

// Evaluates every grid point with every requested method; conjugate points
// are added internally for the symmetry property.
RunArtifacts run_grid(const ProblemConfig& cfg, unsigned threads = 0);

enum class Format { csv, json };

void emit_report(const RunArtifacts& art, const std::filesystem::path& dir, Format fmt);

std::string csv_text(const RunArtifacts& art);
std::string report_text(const RunArtifacts& art);

}  // namespace weylforge::cli
