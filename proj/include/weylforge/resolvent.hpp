#pragma once

#include <functional>
#include <limits>
#include <vector>

#include "weylforge/weyl.hpp"

namespace weylforge {

using Forcing = std::function<Vec(double)>;

struct ResolventResult {
    cd lambda{};
    SolutionHandle y_f;
    double t_end = 0.0;
    double boundary_residual = 0.0;  // boundary conditions applied to y_f
    double tail_residual = 0.0;      // singular b: mismatch with the decaying span at the support end
    double cond = 0.0;
};

// y_f solving Jy' - By = λΔy + Δf with the boundary conditions of τ.
// For singular b, f must vanish beyond support_end.
ResolventResult apply_resolvent(const SymmetricSystem& sys, const DecomposingTriplet& T,
                                const BoundaryParameterCollection& tau, cd lambda, const Forcing& f,
                                const WeylOptions& opts = {},
                                double support_end = std::numeric_limits<double>::quiet_NaN());

// ⟨u, v⟩_Δ = ∫ v* Δ u over [a, t_end] for single-column handles.
cd delta_inner(const SymmetricSystem& sys, const SolutionHandle& u, const SolutionHandle& v, double t_end,
               double quad_tol = 1e-12);
SolutionHandle forcing_handle(const Forcing& f, double lo, double hi);

struct ResolventTolerances {
    double norm_bound = 1e-7;
    double adjoint = 1e-7;
    double identity = 1e-7;
    double quad_tol = 1e-12;
};

// Checks "resolvent_norm_bound", "resolvent_adjoint" and "resolvent_identity".
// The last two only count for canonical parameters with n+ = n-.
PropertyReport check_resolvent_properties(const SymmetricSystem& sys, const DecomposingTriplet& T,
                                          const BoundaryParameterCollection& tau,
                                          const std::vector<cd>& lambda_samples,
                                          const std::vector<Forcing>& f_samples,
                                          const ResolventTolerances& tol = {}, const WeylOptions& opts = {},
                                          double support_end = std::numeric_limits<double>::quiet_NaN());

}  // namespace weylforge
