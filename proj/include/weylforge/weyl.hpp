#pragma once

#include <functional>
#include <memory>
#include <string>
#include <vector>

#include "weylforge/boundary.hpp"
#include "weylforge/ode.hpp"
#include "weylforge/pairs.hpp"
#include "weylforge/system.hpp"

namespace weylforge {

struct WeylOptions {
    PropagationSettings prop;
    std::vector<double> schedule;  // β-schedule for singular b; empty selects the default
    double basis_tol = 1e-11;      // subspace drift accepted twice in a row
    double sweep_step = 0.5;       // re-orthonormalisation spacing
    double cond_limit = 1e12;
};

// Span of the L²Δ solutions at λ. For singular b the columns come from a
// backward sweep from t_end with QR re-orthonormalisation on short segments.
struct SolutionBasis {
    cd lambda{};
    std::function<Mat(double)> eval;          // dim x n basis values on [a, t_end]
    std::shared_ptr<const Trajectory> traj;   // regular b: fundamental matrix, identity at b
    Mat data;                                 // boundary data of the columns
    double a = 0.0;
    double t_end = 0.0;
    bool singular = false;
    std::vector<double> betas;
    std::vector<double> drift;

    int size() const { return static_cast<int>(data.cols()); }
    SolutionHandle handle(const Mat& x) const;
};

SolutionBasis l2_solution_basis(const SymmetricSystem& sys, const DecomposingTriplet& T, cd lambda,
                                const WeylOptions& opts = {});

// X_a φ(a) = (I_{H0}; 0), X_a ψ(a) = (-(i/2) P_Ĥ; -P_H).
struct CanonicalSolutions {
    SolutionHandle phi;
    SolutionHandle psi;
};

CanonicalSolutions canonical_solutions(const SymmetricSystem& sys, cd lambda, double t_end,
                                       const PropagationSettings& settings = {});
CanonicalSolutions canonical_solutions(const SymmetricSystem& sys, cd lambda);

struct WeylBlocks {
    cd lambda{};
    CaseClass cls;
    bool full_mode = true;  // Γ0 Z = I normalisation (otherwise P1 Γ0 Z = I)
    Mat M;                  // the Weyl function itself
    Mat m0;
    Mat M1, M2, M3, M4;
    Mat N1, N2;
    Mat S_minus;
    Mat M2_embedded;  // M2 with rows placed in H0
    double cond = 0.0;
};

WeylBlocks weyl_blocks(const SymmetricSystem& sys, const DecomposingTriplet& T, cd lambda, const WeylOptions& opts = {});
WeylBlocks weyl_blocks(const DecomposingTriplet& T, const SolutionBasis& basis, const WeylOptions& opts = {});

// Pair acting at λ: τ+ on ℂ+, the lower pair on ℂ- (adjoint counterpart when absent).
OperatorPair pair_at(const BoundaryParameterCollection& tau, const DecomposingTriplet& T, cd lambda);

BoundaryParameterCollection parameter_from_pair(const OperatorPair& pair, const DecomposingTriplet& T);
BoundaryParameterCollection empty_parameter(const DecomposingTriplet& T);
BoundaryParameterCollection selfadjoint_parameter(const Mat& B, const DecomposingTriplet& T);
BoundaryParameterCollection dirichlet_parameter(const DecomposingTriplet& T);
BoundaryParameterCollection neumann_parameter(const DecomposingTriplet& T);

bool is_canonical(const DecomposingTriplet& T, const BoundaryParameterCollection& tau);

Mat m_tau_krein(const WeylBlocks& blocks, const OperatorPair& pair, double* cond_out = nullptr,
                double cond_limit = 1e12);

enum class Method { krein, direct, truncation };
std::string to_string(Method m);

struct MDiagnostics {
    double cond = 0.0;
    double fit_residual = 0.0;  // Krein: L² fit of φm+ψ at a
    bool converged = true;
    std::vector<double> betas;
    std::vector<double> differences;
    std::string note;
};

struct MFunctionResult {
    cd lambda{};
    Mat m;
    SolutionHandle v_tau;
    Method method = Method::direct;
    CaseClass cls;
    bool canonical = false;
    int n_plus = 0;
    int n_minus = 0;
    double t_end = 0.0;  // Gram integrals of v_tau run over [a, t_end]
    MDiagnostics diagnostics;
};

// Rows acting on boundary data: the a-side conditions and the τ condition.
struct ConditionRows {
    Mat rows;
    Mat rhs;       // right-hand side of the m-problem (dim H0 columns)
    int a_rows = 0;
};

ConditionRows boundary_conditions(const DecomposingTriplet& T, const BoundaryParameterCollection& tau, cd lambda);

MFunctionResult m_tau_krein(const SymmetricSystem& sys, const DecomposingTriplet& T,
                            const BoundaryParameterCollection& tau, cd lambda, const WeylOptions& opts = {});
MFunctionResult m_tau_direct(const SymmetricSystem& sys, const DecomposingTriplet& T,
                             const BoundaryParameterCollection& tau, cd lambda, const WeylOptions& opts = {});
MFunctionResult m_limit_singular(const SymmetricSystem& sys, const DecomposingTriplet& T,
                                 const BoundaryParameterCollection& tau, cd lambda,
                                 const std::vector<double>& beta_schedule, const WeylOptions& opts = {});

struct PropertyCheck {
    std::string name;
    bool applicable = false;
    bool passed = true;
    double residual = 0.0;
    double tolerance = 0.0;
    int samples = 0;
    std::string detail;
};

struct PropertyReport {
    std::vector<PropertyCheck> checks;
    bool all_passed() const;
    const PropertyCheck* find(const std::string& name) const;
};

struct MPropertyTolerances {
    double symmetry = 1e-10;
    double inequality = 1e-8;
    double equality = 1e-6;
    double identity = 1e-6;
    double triangular = 1e-9;
    double quad_tol = 1e-12;
};

PropertyReport check_m_properties(const std::vector<MFunctionResult>& results, const SymmetricSystem& sys,
                                  const MPropertyTolerances& tol = {});

}  // namespace weylforge
