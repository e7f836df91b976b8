#pragma once

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "weylforge/odd_order.hpp"
#include "weylforge/weyl.hpp"

namespace weylforge::cli {

// Schema problems; each entry reads "path: message".
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(std::vector<std::string> errors);
    const std::vector<std::string>& errors() const { return errors_; }

private:
    std::vector<std::string> errors_;
};

enum class MethodChoice { krein, direct, truncation, all };
MethodChoice parse_method(const std::string& s);
std::vector<Method> expand(MethodChoice m);

struct TauSpec {
    enum class Kind { automatic, dirichlet, neumann, selfadjoint, pair } kind = Kind::automatic;
    Mat B;
    Mat C0, C1;
    std::optional<Mat> D0, D1;
};

struct ProblemConfig {
    std::string label;
    SymmetricSystem system;
    std::optional<OddOrderExpression> odd;
    TauSpec tau_spec;
    BoundaryParameterCollection tau;
    std::vector<cd> grid;
    MethodChoice method = MethodChoice::direct;
    WeylOptions opts;
    MPropertyTolerances tol;
    double agreement_tol = 1e-8;
};

cd parse_complex(const std::string& s);
// Row-major array of rows; entries are numbers or [re, im] pairs.
Mat parse_matrix(const nlohmann::json& j, const std::string& path);

ProblemConfig parse_config(const nlohmann::json& doc);
ProblemConfig load_config(const std::filesystem::path& file);

// KEY=VAL over the "tolerances" keys.
void apply_override(ProblemConfig& cfg, const std::string& kv);

}  // namespace weylforge::cli
