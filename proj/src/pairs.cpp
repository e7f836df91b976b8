#include "weylforge/pairs.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace weylforge {

OperatorPair OperatorPair::constant(Mat c0, Mat c1, HalfPlane hp) {
    if (c0.rows() != c1.rows()) throw std::invalid_argument("pair: C0 and C1 must share the target space");
    OperatorPair p;
    p.hp_ = hp;
    p.dim_h0_ = static_cast<int>(c0.cols());
    p.dim_h1_ = static_cast<int>(c1.cols());
    p.dim_k_ = static_cast<int>(c0.rows());
    p.constant_ = true;
    p.c0_const_ = std::move(c0);
    p.c1_const_ = std::move(c1);
    return p;
}

OperatorPair OperatorPair::holomorphic(Fn c0, Fn c1, int dim_h0, int dim_h1, int dim_k, HalfPlane hp) {
    OperatorPair p;
    p.hp_ = hp;
    p.dim_h0_ = dim_h0;
    p.dim_h1_ = dim_h1;
    p.dim_k_ = dim_k;
    p.constant_ = false;
    p.c0_ = std::move(c0);
    p.c1_ = std::move(c1);
    return p;
}

SelfAdjointParameter selfadjoint_from_B(const Mat& B) {
    if (norm2(B - B.adjoint()) > 1e-12 * (1.0 + norm2(B))) throw std::invalid_argument("B must be Hermitian");
    Eigen::SelfAdjointEigenSolver<Mat> es(hermitian_part(B));
    const Mat& u = es.eigenvectors();
    const auto& ev = es.eigenvalues();
    Vec c(ev.size()), s(ev.size());
    for (Eigen::Index i = 0; i < ev.size(); ++i) {
        c(i) = std::cos(ev(i));
        s(i) = std::sin(ev(i));
    }
    return {B, u * c.asDiagonal() * u.adjoint(), u * s.asDiagonal() * u.adjoint()};
}

Mat SplitData::embed1() const {
    Mat e = Mat::Zero(dim_h0, static_cast<Eigen::Index>(h1_index.size()));
    for (std::size_t k = 0; k < h1_index.size(); ++k) e(h1_index[k], static_cast<Eigen::Index>(k)) = 1.0;
    return e;
}

Mat SplitData::P2() const {
    Mat p = Mat::Zero(dim_h0, dim_h0);
    for (int i : h2_index) p(i, i) = 1.0;
    return p;
}

SplitData SplitData::equal(int n) { return leading(n, n); }

SplitData SplitData::leading(int dim_h0, int dim_h1) {
    SplitData s;
    s.dim_h0 = dim_h0;
    for (int i = 0; i < dim_h0; ++i) (i < dim_h1 ? s.h1_index : s.h2_index).push_back(i);
    return s;
}

std::string to_string(PairClass c) {
    switch (c) {
        case PairClass::R0: return "R0";
        case PairClass::R: return "R";
        default: return "none";
    }
}

namespace {

double psd_slack(const Mat& h) { return -1e-10 * (1.0 + norm2(h)); }

bool in_half_plane(HalfPlane hp, cd lambda) {
    if (hp == HalfPlane::both) return true;
    return hp == HalfPlane::upper ? lambda.imag() > 0 : lambda.imag() < 0;
}

double min_singular(const Mat& a) {
    if (a.size() == 0) return 1.0;
    Eigen::JacobiSVD<Mat> svd(a);
    return svd.singularValues()(svd.singularValues().size() - 1);
}

}  // namespace

PairReport validate_pair(const OperatorPair& pair, const std::vector<cd>& lambda_samples) {
    PairReport rep;
    auto fail = [&](std::string msg) { rep.failures.push_back(std::move(msg)); };
    const int n = pair.dim_k();
    if (pair.dim_h0() != n || pair.dim_h1() != n) fail("dimension: C0, C1 must be square on a common space");
    bool selfadjoint = pair.is_constant();
    bool inv_both = true;
    for (cd lam : lambda_samples) {
        if (lam.imag() == 0.0) {
            fail("sample on the real axis");
            continue;
        }
        if (!in_half_plane(pair.half_plane(), lam)) {
            fail("sample outside the pair's half-plane");
            continue;
        }
        const Mat c0 = pair.C0(lam);
        const Mat c1 = pair.C1(lam);
        const Mat q = imag_part(c1 * c0.adjoint());
        const double s = lam.imag() > 0 ? 1.0 : -1.0;
        const double me = min_eigenvalue_hermitian(s * q);
        if (me < psd_slack(q)) {
            fail("sign condition Im(lambda) Im(C1 C0*) >= 0 violated");
            rep.sign_residual = std::max(rep.sign_residual, -me);
        }
        if (norm2(q) > 1e-10 * (1.0 + norm2(c0) * norm2(c1))) selfadjoint = false;
        if (pair.half_plane() == HalfPlane::both) {
            const cd lb = std::conj(lam);
            const Mat sym = c1 * pair.C0(lb).adjoint() - c0 * pair.C1(lb).adjoint();
            const double r = norm2(sym);
            rep.symmetry_residual = std::max(rep.symmetry_residual, r);
            if (r > 1e-10 * (1.0 + norm2(c0) * norm2(c0) + norm2(c1) * norm2(c1)))
                fail("symmetry C1(l)C0*(conj l) - C0(l)C1*(conj l) = 0 violated");
        }
        if (n == pair.dim_h0() && n == pair.dim_h1()) {
            const Mat m = c0 - s * kI * c1;
            if (condition_number(m) > 1e12) fail("C0 -/+ i C1 not invertible");
            if (condition_number(c0 + s * kI * c1) > 1e12) inv_both = false;
        }
        Mat stacked(c0.rows(), c0.cols() + c1.cols());
        stacked << c0, c1;
        if (numerical_rank(stacked) != n) fail("rank (C0:C1) != dim K");
    }
    rep.ok = rep.failures.empty();
    if (!rep.ok) rep.verdict = PairClass::none;
    else if (selfadjoint && inv_both) rep.verdict = PairClass::R0;
    else rep.verdict = PairClass::R;
    return rep;
}

PairReport validate_collection(const BoundaryParameterCollection& coll, const std::vector<cd>& lambda_samples) {
    PairReport rep;
    auto fail = [&](std::string msg) { rep.failures.push_back(std::move(msg)); };
    const int alpha = coll.alpha;
    if (alpha != 1 && alpha != -1) fail("alpha must be +1 or -1");
    const SplitData& sp = coll.split;
    const int n0 = sp.dim_h0;
    const int n1 = static_cast<int>(sp.h1_index.size());
    const OperatorPair& tp = coll.tau_plus;
    const OperatorPair tm = coll.tau_minus ? *coll.tau_minus : adjoint_counterpart(tp, alpha, sp);
    if (tp.dim_h0() != n0 || tp.dim_h1() != n1) fail("tau_plus acts on the wrong spaces");
    if (tm.dim_h0() != n0 || tm.dim_h1() != n1) fail("tau_minus acts on the wrong spaces");
    const int kp_expected = alpha == 1 ? n0 : n1;
    const int km_expected = alpha == 1 ? n1 : n0;
    if (tp.dim_k() != kp_expected) fail("dimension: dim K+ does not match the orientation");
    if (tm.dim_k() != km_expected) fail("dimension: dim K- does not match the orientation");
    if (!rep.failures.empty()) {
        rep.ok = false;
        return rep;
    }
    const Mat e1 = sp.embed1();
    const Mat e2 = select_cols(identity(n0), sp.h2_index);
    const double a = alpha;
    bool zero_form = tp.is_constant() && n0 == n1;
    double inv28 = 1e300;
    for (cd lam : lambda_samples) {
        if (lam.imag() == 0.0) {
            fail("sample on the real axis");
            continue;
        }
        const cd lp = lam.imag() > 0 ? lam : std::conj(lam);
        const cd lm = std::conj(lp);
        const Mat c0 = tp.C0(lp), c1 = tp.C1(lp);
        const Mat c01 = c0 * e1, c02 = c0 * e2;
        const Mat d0 = tm.C0(lm), d1 = tm.C1(lm);
        const Mat d01 = d0 * e1, d02 = d0 * e2;
        const Mat f_plus = 2.0 * imag_part(c1 * c01.adjoint()) + a * c02 * c02.adjoint();
        if (min_eigenvalue_hermitian(f_plus) < psd_slack(f_plus)) {
            fail("tau_plus is not dissipative on the upper half-plane");
            rep.sign_residual = std::max(rep.sign_residual, -min_eigenvalue_hermitian(f_plus));
        }
        if (norm2(f_plus) > 1e-10 * (1.0 + norm2(c0) * norm2(c0))) zero_form = false;
        const Mat f_minus = 2.0 * imag_part(d1 * d01.adjoint()) + a * d02 * d02.adjoint();
        if (min_eigenvalue_hermitian(-f_minus) < psd_slack(f_minus)) {
            fail("tau_minus is not accumulative on the lower half-plane");
            rep.sign_residual = std::max(rep.sign_residual, -min_eigenvalue_hermitian(-f_minus));
        }
        // symmetry coupling pairs tau_plus at lp with tau_minus at conj(lp) = lm
        const Mat coupling = c1 * d01.adjoint() - c01 * d1.adjoint() + kI * a * c02 * d02.adjoint();
        const double r = norm2(coupling);
        rep.symmetry_residual = std::max(rep.symmetry_residual, r);
        if (r > 1e-10 * (1.0 + norm2(c0) * norm2(d0) + norm2(c1) * norm2(d1))) fail("tau_plus and tau_minus are not adjoint to each other");
        Mat sc(c0.rows(), n0 + n1);
        sc << c0, c1;
        if (numerical_rank(sc) != tp.dim_k()) fail("(C0:C1) not surjective");
        Mat sd(d0.rows(), n0 + n1);
        sd << d0, d1;
        if (numerical_rank(sd) != tm.dim_k()) fail("(D0:D1) not surjective");
        if (alpha == 1) {
            inv28 = std::min({inv28, min_singular(c0 - kI * c1 * e1.adjoint()), min_singular(d01 + kI * d1)});
            if (zero_form) zero_form = condition_number(c01 + kI * c1) < 1e12;
        } else {
            inv28 = std::min({inv28, min_singular(c01 - kI * c1), min_singular(d0 + kI * d1 * e1.adjoint())});
            if (zero_form) zero_form = condition_number(c0 + kI * c1 * e1.adjoint()) < 1e12;
        }
    }
    rep.invertibility_margin = inv28;
    rep.ok = rep.failures.empty();
    rep.verdict = !rep.ok ? PairClass::none : (zero_form ? PairClass::R0 : PairClass::R);
    return rep;
}

SelfAdjointParameter normalize_selfadjoint(const OperatorPair& pair) {
    if (!pair.is_constant()) throw std::invalid_argument("normalize_selfadjoint: constant pair required");
    const auto rep = validate_pair(pair, {kI, -kI});
    if (rep.verdict != PairClass::R0) throw std::invalid_argument("normalize_selfadjoint: pair not in R0");
    const Mat c0 = pair.C0(kI);
    const Mat c1 = pair.C1(kI);
    const int n = static_cast<int>(c0.rows());
    const Mat minus = c0 - kI * c1;
    const Mat V = minus.lu().solve(c0 + kI * c1);
    const double ur = norm2(V.adjoint() * V - identity(n));
    if (ur > 1e-8) throw std::runtime_error("normalize_selfadjoint: V not unitary (residual " + std::to_string(ur) + ")");
    Eigen::ComplexSchur<Mat> schur(V);
    const Mat& u = schur.matrixU();
    const Mat& t = schur.matrixT();
    Vec theta(n);
    for (int k = 0; k < n; ++k) {
        double arg = std::arg(t(k, k));
        if (arg <= -std::numbers::pi + 1e-10) arg = std::numbers::pi;  // principal branch (-pi, pi]
        theta(k) = 0.5 * arg;
    }
    Mat B = u * theta.asDiagonal() * u.adjoint();
    B = hermitian_part(B);
    SelfAdjointParameter out = selfadjoint_from_B(B);
    // phi = e^{-iB} (C0 - iC1)^{-1} maps the input pair onto (cos B, sin B)
    const Mat phi = (out.cosB - kI * out.sinB) * minus.inverse();
    const double eq = std::max(norm2(phi * c0 - out.cosB), norm2(phi * c1 - out.sinB));
    if (eq > 1e-10 * (1.0 + norm2(phi))) throw std::runtime_error("normalize_selfadjoint: equivalence check failed");
    return out;
}

Mat relation_subspace(const Mat& c0, const Mat& c1) {
    Mat s(c0.rows(), c0.cols() + c1.cols());
    s << c0, c1;
    return null_space(s);
}

namespace {

struct KernelRep {
    Mat d0, d1;
};

KernelRep counterpart_at(const Mat& c0, const Mat& c1, int alpha, const SplitData& sp) {
    const int n0 = static_cast<int>(c0.cols());
    const int n1 = static_cast<int>(c1.cols());
    const Mat N = relation_subspace(c0, c1);
    const Mat N0 = N.topRows(n0);
    const Mat N1 = N.bottomRows(n1);
    // adjoint: {(k1, k0) : (k0, h0) - (k1, h1) = 0 for all (h0, h1)}
    Mat cond(N.cols(), n1 + n0);
    cond << -N1.adjoint(), N0.adjoint();
    const Mat K = null_space(cond);
    const Mat K1 = K.topRows(n1);
    const Mat K0 = K.bottomRows(n0);
    const Mat e1 = sp.embed1();
    Mat S(n0 + n1, K.cols());
    S.topRows(n0) = -e1 * K1 - kI * static_cast<double>(alpha) * sp.P2() * K0;
    S.bottomRows(n1) = -e1.adjoint() * K0;
    const Mat D = null_space(S.adjoint()).adjoint();
    return {D.leftCols(n0), D.rightCols(n1)};
}

}  // namespace

OperatorPair adjoint_counterpart(const OperatorPair& tau, int alpha, const SplitData& split) {
    if (tau.dim_h0() != split.dim_h0 || tau.dim_h1() != static_cast<int>(split.h1_index.size()))
        throw std::invalid_argument("adjoint_counterpart: split does not match the pair");
    const HalfPlane out_hp = tau.half_plane() == HalfPlane::upper   ? HalfPlane::lower
                             : tau.half_plane() == HalfPlane::lower ? HalfPlane::upper
                                                                    : HalfPlane::both;
    if (tau.is_constant()) {
        auto k = counterpart_at(tau.C0(kI), tau.C1(kI), alpha, split);
        return OperatorPair::constant(k.d0, k.d1, out_hp);
    }
    const int n0 = tau.dim_h0();
    const int n1 = tau.dim_h1();
    auto probe = counterpart_at(tau.C0(kI), tau.C1(kI), alpha, split);
    const int dk = static_cast<int>(probe.d0.rows());
    auto d0 = [tau, alpha, split](cd lam) {
        return counterpart_at(tau.C0(std::conj(lam)), tau.C1(std::conj(lam)), alpha, split).d0;
    };
    auto d1 = [tau, alpha, split](cd lam) {
        return counterpart_at(tau.C0(std::conj(lam)), tau.C1(std::conj(lam)), alpha, split).d1;
    };
    return OperatorPair::holomorphic(d0, d1, n0, n1, dk, out_hp);
}

double pair_distance(const OperatorPair& p, const OperatorPair& q, cd lambda) {
    return subspace_distance(relation_subspace(p.C0(lambda), p.C1(lambda)),
                             relation_subspace(q.C0(lambda), q.C1(lambda)));
}

}  // namespace weylforge
