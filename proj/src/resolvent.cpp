#include "weylforge/resolvent.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace weylforge {

SolutionHandle forcing_handle(const Forcing& f, double lo, double hi) {
    SolutionHandle h;
    h.column_count = 1;
    h.lo = lo;
    h.hi = hi;
    h.evaluator = [f](double t) -> Mat { return f(t); };
    h.init_at_a = f(lo);
    return h;
}

cd delta_inner(const SymmetricSystem& sys, const SolutionHandle& u, const SolutionHandle& v, double t_end,
               double quad_tol) {
    return weighted_gram(sys, v, u, sys.a, t_end, quad_tol)(0, 0);
}

ResolventResult apply_resolvent(const SymmetricSystem& sys, const DecomposingTriplet& T,
                                const BoundaryParameterCollection& tau, cd lambda, const Forcing& f,
                                const WeylOptions& opts, double support_end) {
    if (lambda.imag() == 0.0) throw std::invalid_argument("lambda must be off the real axis");
    const int N = sys.dim();
    const SolutionBasis basis = l2_solution_basis(sys, T, lambda, opts);
    const ConditionRows c = boundary_conditions(T, tau, lambda);
    ResolventResult r;
    r.lambda = lambda;
    r.t_end = basis.t_end;
    SolutionHandle h;
    h.lambda = lambda;
    h.column_count = 1;
    h.lo = sys.a;
    h.hi = basis.t_end;

    if (!basis.singular) {
        // y_f = y_p + Φ x with y_p(a) = 0 and Φ(b) = I
        const auto phi = basis.traj;
        const SolutionHandle yp = solve_inhomogeneous(sys, lambda, f, Vec::Zero(N), opts.prop, sys.b);
        const Mat data_phi = basis.data;
        const Mat data_p = boundary_data(sys, T.bmap, Mat::Zero(N, 1), yp(sys.b));
        const Mat A = c.rows * data_phi;
        if (A.rows() != A.cols()) throw std::runtime_error("resolvent: condition count does not match");
        const auto s = qr_solve(A, -c.rows * data_p);
        if (!(s.cond < opts.cond_limit)) throw std::runtime_error("resolvent: boundary solve singular");
        const Mat x = s.x;
        r.cond = s.cond;
        r.boundary_residual = norm2(c.rows * (data_p + data_phi * x));
        h.init_at_a = (*phi)(sys.a) * x;
        h.evaluator = [yp, phi, x](double t) -> Mat { return yp(t) + (*phi)(t) * x; };
        r.y_f = std::move(h);
        return r;
    }

    // singular b: forward particular solution on [a, s], matched at s onto the decaying span
    if (!std::isfinite(support_end))
        throw std::invalid_argument("singular endpoint requires a forcing with finite support");
    const double s_end = support_end;
    if (!(s_end > sys.a) || s_end > basis.t_end)
        throw std::invalid_argument("forcing support must end inside (a, t_end]");
    const SolutionHandle yp = solve_inhomogeneous(sys, lambda, f, Vec::Zero(N), opts.prop, s_end);
    const auto phi = fundamental(sys, lambda, sys.a, identity(N), sys.a, s_end, opts.prop);
    const Mat dec = basis.eval(s_end);
    const Mat perp = null_space(dec.adjoint()).adjoint();  // rows annihilating the decaying span
    const Mat data_phi = boundary_data(sys, T.bmap, identity(N), Mat(0, N));
    const Mat phi_s = (*phi)(s_end);
    const Mat yp_s = yp(s_end);
    Mat A(c.rows.rows() + perp.rows(), N);
    Mat rhs(A.rows(), 1);
    A << c.rows * data_phi, perp * phi_s;
    rhs << Mat::Zero(c.rows.rows(), 1), -perp * yp_s;
    if (A.rows() != A.cols())
        throw std::runtime_error("resolvent: " + std::to_string(A.rows()) + " conditions for " + std::to_string(N) +
                                 " unknowns");
    const auto sol = qr_solve(A, rhs);
    if (!(sol.cond < opts.cond_limit)) throw std::runtime_error("resolvent: boundary solve singular");
    const Mat x = sol.x;
    const Mat ys = yp_s + phi_s * x;
    const Mat z = dec.colPivHouseholderQr().solve(ys);
    r.cond = sol.cond;
    r.boundary_residual = norm2(c.rows * data_phi * x);
    r.tail_residual = norm2(dec * z - ys);
    auto ev = basis.eval;
    h.init_at_a = x;
    h.evaluator = [yp, phi, x, ev, z, s_end](double t) -> Mat {
        return t <= s_end ? Mat(yp(t) + (*phi)(t) * x) : Mat(ev(t) * z);
    };
    r.y_f = std::move(h);
    return r;
}

PropertyReport check_resolvent_properties(const SymmetricSystem& sys, const DecomposingTriplet& T,
                                          const BoundaryParameterCollection& tau,
                                          const std::vector<cd>& lambda_samples,
                                          const std::vector<Forcing>& f_samples, const ResolventTolerances& tol,
                                          const WeylOptions& opts, double support_end) {
    PropertyReport rep;
    const bool canonical = is_canonical(T, tau) && T.dim_H0 == T.dim_H1;
    auto norm_delta = [&](const SolutionHandle& u, double t_end) {
        return std::sqrt(std::max(0.0, delta_inner(sys, u, u, t_end, tol.quad_tol).real()));
    };
    auto as_forcing = [](const SolutionHandle& y) -> Forcing { return [y](double t) -> Vec { return y(t).col(0); }; };

    PropertyCheck bound{"resolvent_norm_bound", false, true, 0.0, tol.norm_bound, 0, ""};
    PropertyCheck adj{"resolvent_adjoint", canonical, true, 0.0, tol.adjoint, 0, ""};
    PropertyCheck ident{"resolvent_identity", canonical && sys.b_regular, true, 0.0, tol.identity, 0, ""};
    if (!canonical) {
        adj.detail = "reported only; parameter is not canonical";
        ident.detail = adj.detail;
    } else if (!sys.b_regular) {
        ident.detail = "skipped: R(mu)f is not compactly supported";
    }
    const std::size_t nf = f_samples.size();
    const std::size_t nl = lambda_samples.size();
    for (std::size_t li = 0; li < nl; ++li) {
        const cd lambda = lambda_samples[li];
        for (std::size_t fi = 0; fi < nf; ++fi) {
            const ResolventResult r = apply_resolvent(sys, T, tau, lambda, f_samples[fi], opts, support_end);
            const double nf_ = norm_delta(forcing_handle(f_samples[fi], sys.a, r.t_end), r.t_end);
            const double ny = norm_delta(r.y_f, r.t_end);
            bound.applicable = true;
            ++bound.samples;
            bound.residual = std::max(bound.residual, ny - nf_ / std::abs(lambda.imag()));

            // ⟨R(λ)f, g⟩ = ⟨f, R(λ̄)g⟩
            const Forcing& g = f_samples[(fi + 1) % nf];
            const ResolventResult rg = apply_resolvent(sys, T, tau, std::conj(lambda), g, opts, support_end);
            const double te = std::min(r.t_end, rg.t_end);
            const cd lhs = delta_inner(sys, r.y_f, forcing_handle(g, sys.a, te), te, tol.quad_tol);
            const cd rhs = delta_inner(sys, forcing_handle(f_samples[fi], sys.a, te), rg.y_f, te, tol.quad_tol);
            adj.residual = std::max(adj.residual, std::abs(lhs - rhs));
            ++adj.samples;

            // R(λ) - R(μ) = (λ - μ) R(λ) R(μ)
            const cd mu = lambda_samples[(li + 1) % nl];
            if (mu == lambda || !sys.b_regular) continue;
            const ResolventResult rm = apply_resolvent(sys, T, tau, mu, f_samples[fi], opts, support_end);
            const ResolventResult rlm = apply_resolvent(sys, T, tau, lambda, as_forcing(rm.y_f), opts, support_end);
            const double t2 = std::min({r.t_end, rm.t_end, rlm.t_end});
            SolutionHandle diff;
            diff.column_count = 1;
            diff.lo = sys.a;
            diff.hi = t2;
            const cd k = lambda - mu;
            diff.evaluator = [&](double t) -> Mat { return r.y_f(t) - rm.y_f(t) - k * rlm.y_f(t); };
            ident.residual = std::max(ident.residual, norm_delta(diff, t2));
            ++ident.samples;
        }
    }
    bound.passed = bound.residual <= tol.norm_bound;
    adj.passed = adj.residual <= tol.adjoint;
    ident.passed = ident.residual <= tol.identity;
    rep.checks = {bound, adj, ident};
    return rep;
}

}  // namespace weylforge
