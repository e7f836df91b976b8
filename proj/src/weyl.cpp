#include "weylforge/weyl.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace weylforge {

std::string to_string(Method m) {
    switch (m) {
        case Method::krein: return "krein";
        case Method::direct: return "direct";
        case Method::truncation: return "truncation";
    }
    return "?";
}

namespace {

std::pair<int, int> defect_numbers(const DecomposingTriplet& T) {
    return T.alpha == 1 ? std::make_pair(T.dim_H0, T.dim_H1) : std::make_pair(T.dim_H1, T.dim_H0);
}

// P1-normalised on the half-plane where α·Im λ < 0.
bool p1_mode(const DecomposingTriplet& T, cd lambda) {
    if (T.equal_spaces()) return false;
    return (T.alpha == 1 && lambda.imag() < 0) || (T.alpha == -1 && lambda.imag() > 0);
}

Mat hat_projector(const SpaceLayout& l) {
    Mat p = Mat::Zero(l.dim_h0(), l.dim_h0());
    for (int i = l.nu_plus; i < l.dim_h0(); ++i) p(i, i) = 1.0;
    return p;
}

std::vector<int> range(int lo, int hi) {
    std::vector<int> v;
    for (int i = lo; i < hi; ++i) v.push_back(i);
    return v;
}

}  // namespace

SolutionHandle SolutionBasis::handle(const Mat& x) const {
    SolutionHandle h;
    h.lambda = lambda;
    h.column_count = static_cast<int>(x.cols());
    h.lo = a;
    h.hi = t_end;
    auto e = eval;
    h.evaluator = [e, x](double t) -> Mat { return e(t) * x; };
    h.init_at_a = e(a) * x;
    return h;
}

namespace {

// Backward sweep from beta to a. Segment j covers [nodes[j-1], nodes[j]] and
// carries Φ(t <- nodes[j]) Q_j; gains[j] rescales it so that the columns
// join continuously with Y(a) = Q_0.
struct Sweep {
    std::vector<double> nodes;
    std::vector<std::shared_ptr<const Trajectory>> segs;
    std::vector<Mat> gains;
    Mat q0;

    Mat operator()(double t) const {
        auto it = std::lower_bound(nodes.begin(), nodes.end(), t);
        std::size_t j = static_cast<std::size_t>(it - nodes.begin());
        j = std::clamp<std::size_t>(j, 1, nodes.size() - 1);
        return (*segs[j])(t) * gains[j];
    }
};

Mat start_frame(int N, int n) {
    Mat w(N, n);
    for (int r = 0; r < N; ++r)
        for (int c = 0; c < n; ++c) w(r, c) = cd(std::cos(1.0 + r + 2.3 * c), std::sin(0.7 * r * c + 0.3 + r));
    Eigen::HouseholderQR<Mat> qr(w);
    return qr.householderQ() * Mat::Identity(N, n);
}

Sweep backward_sweep(const SymmetricSystem& sys, cd lambda, double beta, int n, const WeylOptions& opts) {
    const int N = sys.dim();
    Generator A = [sys, lambda](double t) { return sys.generator(t, lambda); };
    std::vector<double> down{beta};
    while (down.back() > sys.a) down.push_back(std::max(sys.a, down.back() - opts.sweep_step));
    const std::size_t m = down.size();
    std::vector<Mat> q(m), r(m);
    std::vector<std::shared_ptr<const Trajectory>> seg(m);
    q[0] = start_frame(N, n);
    for (std::size_t k = 1; k < m; ++k) {
        seg[k] = std::make_shared<const Trajectory>(A, down[k - 1], q[k - 1], down[k], down[k - 1], opts.prop);
        const Mat y = (*seg[k])(down[k]);
        if (!y.allFinite()) throw NonConvergenceError("backward sweep overflow", down[k]);
        Eigen::HouseholderQR<Mat> qr(y);
        q[k] = qr.householderQ() * Mat::Identity(N, n);
        r[k] = qr.matrixQR().topRows(n).template triangularView<Eigen::Upper>();
    }
    // ascending order: nodes[i] = down[m-1-i]
    Sweep s;
    s.nodes.assign(down.rbegin(), down.rend());
    s.segs.resize(m);
    s.gains.resize(m);
    s.q0 = q[m - 1];
    Mat g = identity(n);
    for (std::size_t i = 1; i < m; ++i) {
        const std::size_t k = m - i;  // segment from down[k] (left) to down[k-1] (right)
        g = r[k].template triangularView<Eigen::Upper>().solve(g);
        s.segs[i] = seg[k];
        s.gains[i] = g;
    }
    return s;
}

}  // namespace

SolutionBasis l2_solution_basis(const SymmetricSystem& sys, const DecomposingTriplet& T, cd lambda,
                                const WeylOptions& opts) {
    if (lambda.imag() == 0.0) throw std::invalid_argument("lambda must be off the real axis");
    const int N = sys.dim();
    SolutionBasis B;
    B.lambda = lambda;
    B.a = sys.a;
    if (sys.b_regular) {
        B.traj = fundamental(sys, lambda, sys.b, identity(N), sys.a, sys.b, opts.prop);
        auto tr = B.traj;
        B.eval = [tr](double t) { return (*tr)(t); };
        B.data = boundary_data(sys, T.bmap, (*B.traj)(sys.a), identity(N));
        B.t_end = sys.b;
        B.betas = {sys.b};
        return B;
    }
    if (T.bmap.kind != EndpointKind::limit_point)
        throw std::invalid_argument("singular endpoint must be limit point");
    B.singular = true;
    const auto [np, nm] = defect_numbers(T);
    const int n = lambda.imag() > 0 ? np : nm;
    const std::vector<double> schedule = opts.schedule.empty() ? default_beta_schedule(sys.a) : opts.schedule;
    if (schedule.size() < 3) throw std::invalid_argument("schedule too short");
    if (n == 0) {
        B.eval = [N](double) { return Mat(N, 0); };
        B.data = Mat(T.data_dim, 0);
        B.t_end = schedule.front();
        return B;
    }
    Mat u_prev;
    int calm = 0;
    double prev = sys.a;
    for (double bk : schedule) {
        if (!(bk > prev)) throw std::invalid_argument("schedule must increase");
        prev = bk;
        Sweep s;
        try {
            s = backward_sweep(sys, lambda, bk, n, opts);
        } catch (const NonConvergenceError&) {
            break;
        }
        B.betas.push_back(bk);
        if (u_prev.size() > 0) {
            const double d = subspace_distance(s.q0, u_prev);
            B.drift.push_back(d);
            calm = d <= opts.basis_tol ? calm + 1 : 0;
        }
        u_prev = s.q0;
        if (calm >= 2) {
            auto sp = std::make_shared<const Sweep>(std::move(s));
            B.eval = [sp](double t) { return (*sp)(t); };
            B.data = boundary_data(sys, T.bmap, sp->q0, Mat(0, n));
            B.t_end = bk;
            return B;
        }
    }
    throw NonConvergenceError("L2 solution basis did not settle over the schedule", prev);
}

CanonicalSolutions canonical_solutions(const SymmetricSystem& sys, cd lambda, double t_end,
                                       const PropagationSettings& settings) {
    const SpaceLayout& l = sys.layout;
    const int N = sys.dim();
    const int h0 = l.dim_h0();
    const int p = l.nu_plus;
    const Mat xa_inv = sys.X_a.inverse();
    auto traj = fundamental(sys, lambda, sys.a, xa_inv, sys.a, t_end, settings);
    Mat cphi = Mat::Zero(N, h0);
    cphi.topRows(h0) = identity(h0);
    Mat cpsi = Mat::Zero(N, h0);
    cpsi.topRows(h0) = -0.5 * kI * hat_projector(l);
    cpsi.bottomRows(p).leftCols(p) = -identity(p);
    return {make_handle(traj, cphi, lambda), make_handle(traj, cpsi, lambda)};
}

CanonicalSolutions canonical_solutions(const SymmetricSystem& sys, cd lambda) {
    const double t_end = std::isfinite(sys.b) ? sys.b : sys.a + 10.0;
    return canonical_solutions(sys, lambda, t_end);
}

WeylBlocks weyl_blocks(const DecomposingTriplet& T, const SolutionBasis& basis, const WeylOptions& opts) {
    const cd lambda = basis.lambda;
    const int h0 = T.dim_a();
    WeylBlocks W;
    W.lambda = lambda;
    W.cls = T.cls;
    W.full_mode = !p1_mode(T, lambda);
    const Mat& D = basis.data;
    if (W.full_mode) {
        const Mat A = T.gamma0 * D;
        if (A.rows() != A.cols()) throw std::runtime_error("Weyl normalisation: dimension mismatch");
        auto s = qr_solve(A, identity(T.dim_H0));
        W.cond = s.cond;
        if (!(s.cond < opts.cond_limit)) throw std::runtime_error("lambda not in resolvent set of A0");
        W.M = T.gamma1 * D * s.x;
    } else {
        const Mat A = select_rows(T.gamma0, T.h1_index) * D;
        if (A.rows() != A.cols()) throw std::runtime_error("Weyl normalisation: dimension mismatch");
        auto s = qr_solve(A, identity(T.dim_H1));
        W.cond = s.cond;
        if (!(s.cond < opts.cond_limit)) throw std::runtime_error("lambda not in resolvent set of A0");
        const Mat top = T.gamma1 * D * s.x;
        const Mat low = kI * static_cast<double>(T.alpha) * select_rows(T.gamma0, T.h2_index) * D * s.x;
        W.M = Mat::Zero(T.dim_H0, T.dim_H1);
        for (std::size_t k = 0; k < T.h1_index.size(); ++k) W.M.row(T.h1_index[k]) = top.row(static_cast<Eigen::Index>(k));
        for (std::size_t k = 0; k < T.h2_index.size(); ++k) W.M.row(T.h2_index[k]) = low.row(static_cast<Eigen::Index>(k));
    }
    // coordinate bookkeeping
    std::vector<int> a1_local, b1_local, a1_global, a2_global;
    for (int k = 0; k < T.dim_H1; ++k) {
        if (T.h1_index[static_cast<std::size_t>(k)] < h0) {
            a1_local.push_back(k);
            a1_global.push_back(T.h1_index[static_cast<std::size_t>(k)]);
        } else {
            b1_local.push_back(k);
        }
    }
    for (int r = 0; r < h0; ++r)
        if (std::find(a1_global.begin(), a1_global.end(), r) == a1_global.end()) a2_global.push_back(r);
    const std::vector<int> all_a = range(0, h0);
    const std::vector<int> b0 = range(h0, T.dim_H0);
    const double sgn = lambda.imag() > 0 ? 1.0 : -1.0;
    auto sub = [](const Mat& m, const std::vector<int>& r, const std::vector<int>& c) {
        return select_cols(select_rows(m, r), c);
    };
    W.m0 = Mat::Zero(h0, h0);
    if (W.full_mode) {
        const Mat top = sub(W.M, a1_local, all_a);
        for (std::size_t k = 0; k < a1_global.size(); ++k) W.m0.row(a1_global[k]) = top.row(static_cast<Eigen::Index>(k));
        for (int r : a2_global) W.m0(r, r) = sgn * 0.5 * kI;
        W.M1 = sub(W.M, a1_local, a1_global);
        W.N1 = sub(W.M, a1_local, a2_global);
        W.M2 = sub(W.M, a1_local, b0);
        W.S_minus = sub(W.M, b1_local, all_a);
        W.M3 = sub(W.M, b1_local, a1_global);
        W.N2 = sub(W.M, b1_local, a2_global);
        W.M4 = sub(W.M, b1_local, b0);
        W.M2_embedded = Mat::Zero(h0, T.tau_dim0());
        for (std::size_t k = 0; k < a1_global.size(); ++k)
            W.M2_embedded.row(a1_global[k]) = W.M2.row(static_cast<Eigen::Index>(k));
    } else {
        const Mat left = sub(W.M, all_a, a1_local);
        for (std::size_t k = 0; k < a1_global.size(); ++k) W.m0.col(a1_global[k]) = left.col(static_cast<Eigen::Index>(k));
        for (int c : a2_global) W.m0(c, c) = sgn * 0.5 * kI;
        W.M1 = sub(W.M, a1_global, a1_local);
        W.N1 = sub(W.M, a2_global, a1_local);
        W.M2 = sub(W.M, a1_global, b1_local);
        W.N2 = sub(W.M, a2_global, b1_local);
        W.M3 = sub(W.M, b0, a1_local);
        W.M4 = sub(W.M, b0, b1_local);
    }
    return W;
}

WeylBlocks weyl_blocks(const SymmetricSystem& sys, const DecomposingTriplet& T, cd lambda, const WeylOptions& opts) {
    return weyl_blocks(T, l2_solution_basis(sys, T, lambda, opts), opts);
}

OperatorPair pair_at(const BoundaryParameterCollection& tau, const DecomposingTriplet& T, cd lambda) {
    if (lambda.imag() > 0) return tau.tau_plus;
    if (tau.tau_minus) return *tau.tau_minus;
    if (T.tau_dim0() == T.tau_dim1() && tau.tau_plus.half_plane() == HalfPlane::both) return tau.tau_plus;
    return adjoint_counterpart(tau.tau_plus, tau.alpha, tau.split);
}

BoundaryParameterCollection parameter_from_pair(const OperatorPair& pair, const DecomposingTriplet& T) {
    if (pair.dim_h0() != T.tau_dim0() || pair.dim_h1() != T.tau_dim1())
        throw std::invalid_argument("boundary parameter acts on the wrong spaces (expected " +
                                    std::to_string(T.tau_dim0()) + " and " + std::to_string(T.tau_dim1()) + ")");
    return BoundaryParameterCollection{T.alpha, pair, std::nullopt, T.tau_split()};
}

BoundaryParameterCollection empty_parameter(const DecomposingTriplet& T) {
    if (T.tau_dim0() != 0 || T.tau_dim1() != 0) throw std::invalid_argument("triplet needs a boundary parameter at b");
    return parameter_from_pair(OperatorPair::constant(Mat(0, 0), Mat(0, 0)), T);
}

BoundaryParameterCollection selfadjoint_parameter(const Mat& B, const DecomposingTriplet& T) {
    const auto sa = selfadjoint_from_B(B);
    return parameter_from_pair(OperatorPair::constant(sa.cosB, sa.sinB), T);
}

BoundaryParameterCollection dirichlet_parameter(const DecomposingTriplet& T) {
    const int n0 = T.tau_dim0();
    const int n1 = T.tau_dim1();
    if (n0 == n1) return parameter_from_pair(OperatorPair::constant(identity(n0), Mat::Zero(n0, n1)), T);
    const Mat P = T.tau_split().embed1().adjoint();  // P_{𝓗_b} : 𝓗̃_b -> 𝓗_b
    OperatorPair up = T.alpha == 1 ? OperatorPair::constant(identity(n0), Mat::Zero(n0, n1), HalfPlane::upper)
                                   : OperatorPair::constant(P, Mat::Zero(n1, n1), HalfPlane::upper);
    OperatorPair lo = T.alpha == 1 ? OperatorPair::constant(P, Mat::Zero(n1, n1), HalfPlane::lower)
                                   : OperatorPair::constant(identity(n0), Mat::Zero(n0, n1), HalfPlane::lower);
    return BoundaryParameterCollection{T.alpha, up, lo, T.tau_split()};
}

BoundaryParameterCollection neumann_parameter(const DecomposingTriplet& T) {
    const int n = T.tau_dim1();
    if (T.tau_dim0() != n) throw std::invalid_argument("neumann parameter needs equal boundary spaces");
    return parameter_from_pair(OperatorPair::constant(Mat::Zero(n, n), identity(n)), T);
}

bool is_canonical(const DecomposingTriplet& T, const BoundaryParameterCollection& tau) {
    if (!T.equal_spaces()) return false;
    if (tau.tau_plus.dim_k() == 0) return true;
    if (tau.tau_minus || !tau.tau_plus.is_constant() || tau.tau_plus.half_plane() != HalfPlane::both) return false;
    return validate_pair(tau.tau_plus, {kI, -kI}).verdict == PairClass::R0;
}

ConditionRows boundary_conditions(const DecomposingTriplet& T, const BoundaryParameterCollection& tau, cd lambda) {
    const int h0 = T.dim_a();
    std::vector<int> aidx;
    if (p1_mode(T, lambda)) {
        for (int i : T.h1_index)
            if (i < h0) aidx.push_back(i);
    } else {
        aidx = range(0, h0);
    }
    const Mat ra = select_rows(T.gamma0, aidx);
    const Mat rhs_a = select_rows(identity(h0), aidx);
    ConditionRows c;
    c.a_rows = static_cast<int>(aidx.size());
    if (T.tau_dim0() + T.tau_dim1() == 0) {
        c.rows = ra;
        c.rhs = rhs_a;
        return c;
    }
    const OperatorPair pr = pair_at(tau, T, lambda);
    if (pr.dim_h0() != T.tau_dim0() || pr.dim_h1() != T.tau_dim1())
        throw std::invalid_argument("boundary parameter acts on the wrong spaces");
    const Mat g0b = T.gamma0.bottomRows(T.tau_dim0());
    const Mat g1b = T.gamma1.bottomRows(T.tau_dim1());  // = -Γ1b
    const Mat rt = pr.C0(lambda) * g0b - pr.C1(lambda) * g1b;
    c.rows.resize(ra.rows() + rt.rows(), T.data_dim);
    c.rows << ra, rt;
    c.rhs = Mat::Zero(c.rows.rows(), h0);
    c.rhs.topRows(ra.rows()) = rhs_a;
    return c;
}

Mat m_tau_krein(const WeylBlocks& W, const OperatorPair& pair, double* cond_out, double cond_limit) {
    if (!W.full_mode) throw std::invalid_argument("Krein formula needs blocks on the natural half-plane");
    if (pair.dim_k() == 0) {
        if (cond_out) *cond_out = 1.0;
        return W.m0;
    }
    const Mat K0 = pair.C0(W.lambda);
    const Mat K1 = pair.C1(W.lambda);
    const Mat Wm = K0 - K1 * W.M4;
    const double cond = condition_number(Wm);
    if (cond_out) *cond_out = cond;
    if (!(cond < cond_limit)) throw std::runtime_error("Krein formula: C0 - C1 M4 is singular");
    return W.m0 + W.M2_embedded * Wm.colPivHouseholderQr().solve(K1 * W.S_minus);
}

namespace {

MFunctionResult base_result(const DecomposingTriplet& T, const BoundaryParameterCollection& tau, cd lambda,
                            Method method) {
    MFunctionResult r;
    r.lambda = lambda;
    r.method = method;
    r.cls = T.cls;
    r.canonical = is_canonical(T, tau);
    const auto [np, nm] = defect_numbers(T);
    r.n_plus = np;
    r.n_minus = nm;
    return r;
}

Mat add_hat_corner(const SpaceLayout& l, const Mat& top) { return top + 0.5 * kI * hat_projector(l); }

}  // namespace

MFunctionResult m_tau_direct(const SymmetricSystem& sys, const DecomposingTriplet& T,
                             const BoundaryParameterCollection& tau, cd lambda, const WeylOptions& opts) {
    MFunctionResult r = base_result(T, tau, lambda, Method::direct);
    const SolutionBasis basis = l2_solution_basis(sys, T, lambda, opts);
    const ConditionRows c = boundary_conditions(T, tau, lambda);
    const Mat A = c.rows * basis.data;
    if (A.rows() != A.cols())
        throw std::runtime_error("boundary solve: " + std::to_string(A.rows()) + " conditions for " +
                                 std::to_string(A.cols()) + " L2 solutions");
    auto s = qr_solve(A, c.rhs);
    r.diagnostics.cond = s.cond;
    if (!(s.cond < opts.cond_limit)) throw std::runtime_error("boundary solve singular");
    const Mat vdata = basis.data * s.x;
    r.m = add_hat_corner(sys.layout, vdata.topRows(T.dim_a()));
    r.v_tau = basis.handle(s.x);
    r.t_end = basis.t_end;
    r.diagnostics.betas = basis.betas;
    r.diagnostics.differences = basis.drift;
    return r;
}

MFunctionResult m_tau_krein(const SymmetricSystem& sys, const DecomposingTriplet& T,
                            const BoundaryParameterCollection& tau, cd lambda, const WeylOptions& opts) {
    if (lambda.imag() == 0.0) throw std::invalid_argument("lambda must be off the real axis");
    MFunctionResult r = base_result(T, tau, lambda, Method::krein);
    cd ln = lambda;
    if (!T.equal_spaces()) {
        const bool upper_natural = T.alpha == 1;
        if ((lambda.imag() > 0) != upper_natural) ln = std::conj(lambda);
    }
    const SolutionBasis bn = l2_solution_basis(sys, T, ln, opts);
    const WeylBlocks W = weyl_blocks(T, bn, opts);
    double cond = 0.0;
    const Mat mn = m_tau_krein(W, pair_at(tau, T, ln), &cond, opts.cond_limit);
    r.m = ln == lambda ? mn : Mat(mn.adjoint());
    r.diagnostics.cond = cond;
    if (ln != lambda) r.diagnostics.note = "conjugate half-plane via m*(conj lambda)";
    // v = φ m + ψ represented inside the L² span at λ
    const SolutionBasis bl = ln == lambda ? bn : l2_solution_basis(sys, T, lambda, opts);
    const SpaceLayout& l = sys.layout;
    const int N = sys.dim();
    const int h0 = l.dim_h0();
    Mat target = Mat::Zero(N, h0);
    target.topRows(h0) = r.m - 0.5 * kI * hat_projector(l);
    target.bottomRows(l.nu_plus).leftCols(l.nu_plus) = -identity(l.nu_plus);
    const Mat Da = bl.data.topRows(N);
    Mat x = bl.size() == 0 ? Mat(0, h0) : Mat(Da.colPivHouseholderQr().solve(target));
    r.diagnostics.fit_residual = norm2(Da * x - target) / (1.0 + norm2(target));
    r.v_tau = bl.handle(x);
    r.t_end = bl.t_end;
    r.diagnostics.betas = bl.betas;
    return r;
}

MFunctionResult m_limit_singular(const SymmetricSystem& sys, const DecomposingTriplet& T,
                                 const BoundaryParameterCollection& tau, cd lambda,
                                 const std::vector<double>& beta_schedule, const WeylOptions& opts) {
    if (sys.b_regular) {
        MFunctionResult r = m_tau_direct(sys, T, tau, lambda, opts);
        r.method = Method::truncation;
        r.diagnostics.betas = {sys.b};
        r.diagnostics.note = "regular endpoint: schedule collapses to b";
        return r;
    }
    if (beta_schedule.size() < 3) throw std::invalid_argument("schedule too short");
    MFunctionResult best;
    std::vector<double> betas, diffs;
    Mat prev;
    int calm = 0;
    for (double beta : beta_schedule) {
        if (!(beta > sys.a)) throw std::invalid_argument("schedule must lie inside (a, b)");
        SymmetricSystem tr = sys;
        tr.b = beta;
        tr.b_regular = true;
        tr.X_b = identity(sys.dim());
        const DecomposingTriplet Tt = build_triplet(tr);
        MFunctionResult cur;
        try {
            cur = m_tau_direct(tr, Tt, dirichlet_parameter(Tt), lambda, opts);
        } catch (const NonConvergenceError&) {
            break;
        }
        if (!cur.m.allFinite()) break;
        betas.push_back(beta);
        if (prev.size() > 0) {
            const double d = norm2(cur.m - prev);
            diffs.push_back(d);
            calm = d <= 1e-9 * (1.0 + norm2(cur.m)) ? calm + 1 : 0;
        }
        prev = cur.m;
        best = std::move(cur);
        if (calm >= 2) {
            MFunctionResult r = base_result(T, tau, lambda, Method::truncation);
            r.m = best.m;
            r.v_tau = best.v_tau;
            r.t_end = beta;
            r.diagnostics.cond = best.diagnostics.cond;
            r.diagnostics.betas = betas;
            r.diagnostics.differences = diffs;
            r.diagnostics.converged = true;
            return r;
        }
    }
    throw NonConvergenceError("truncation limit did not converge", betas.empty() ? sys.a : betas.back());
}

}  // namespace weylforge
