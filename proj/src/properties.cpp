#include <algorithm>
#include <cmath>
#include <sstream>

#include "weylforge/weyl.hpp"

namespace weylforge {

bool PropertyReport::all_passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const PropertyCheck& c) { return !c.applicable || c.passed; });
}

const PropertyCheck* PropertyReport::find(const std::string& name) const {
    for (const auto& c : checks)
        if (c.name == name) return &c;
    return nullptr;
}

namespace {

bool same_point(cd a, cd b) { return std::abs(a - b) <= 1e-13 * (1.0 + std::abs(a)); }

// Nevanlinna inequality holds on the natural half-plane, or everywhere when n+ = n-.
bool inequality_applies(const MFunctionResult& r) {
    if (r.n_plus == r.n_minus) return true;
    return r.cls.base == 1 ? r.lambda.imag() > 0 : r.lambda.imag() < 0;
}

}  // namespace

PropertyReport check_m_properties(const std::vector<MFunctionResult>& results, const SymmetricSystem& sys,
                                  const MPropertyTolerances& tol) {
    PropertyReport rep;
    const std::size_t n = results.size();

    PropertyCheck sym{"symmetry_5_7b", false, true, 0.0, tol.symmetry, 0, ""};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            if (!same_point(results[i].lambda, std::conj(results[j].lambda))) continue;
            sym.applicable = true;
            ++sym.samples;
            sym.residual = std::max(sym.residual, norm2(Mat(results[i].m.adjoint()) - results[j].m));
        }
    sym.passed = sym.residual <= tol.symmetry;
    if (!sym.applicable) sym.detail = "no conjugate sample pairs";
    rep.checks.push_back(sym);

    // Gram matrices ∫ v*Δv, computed once per sample that needs one
    std::vector<Mat> gram(n);
    auto gram_of = [&](std::size_t i) -> const Mat& {
        if (gram[i].size() == 0) {
            const auto& r = results[i];
            gram[i] = weighted_gram(sys, r.v_tau, r.v_tau, sys.a, r.t_end, tol.quad_tol);
        }
        return gram[i];
    };

    PropertyCheck ineq{"inequality_5_21", false, true, 0.0, tol.inequality, 0, ""};
    double eq_residual = 0.0;
    bool eq_applicable = false;
    double worst = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = results[i];
        if (!inequality_applies(r) || r.v_tau.column_count == 0) continue;
        ineq.applicable = true;
        ++ineq.samples;
        const Mat D = imag_part(r.m) / r.lambda.imag() - gram_of(i);
        worst = std::min(worst, min_eigenvalue_hermitian(D));
        if (r.canonical && r.n_plus == r.n_minus) {
            eq_applicable = true;
            eq_residual = std::max(eq_residual, norm2(D));
        }
    }
    ineq.residual = -worst;
    ineq.passed = worst >= -tol.inequality && (!eq_applicable || eq_residual <= tol.equality);
    if (eq_applicable) {
        std::ostringstream os;
        os << "equality residual " << eq_residual << " (tol " << tol.equality << ")";
        ineq.detail = os.str();
    }
    rep.checks.push_back(ineq);

    PropertyCheck ident{"identity_5_39", false, true, 0.0, tol.identity, 0, ""};
    const bool canonical =
        n > 0 && std::all_of(results.begin(), results.end(),
                             [](const MFunctionResult& r) { return r.canonical && r.n_plus == r.n_minus; });
    if (canonical) {
        ident.applicable = true;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) {
                const auto& l = results[i];
                const auto& mu = results[j];
                const double t_end = std::min(l.t_end, mu.t_end);
                const Mat G = weighted_gram(sys, l.v_tau, mu.v_tau, sys.a, t_end, tol.quad_tol);
                const Mat lhs = mu.m - Mat(l.m.adjoint());
                ident.residual = std::max(ident.residual, norm2(lhs - (mu.lambda - std::conj(l.lambda)) * G));
                ++ident.samples;
            }
        ident.passed = ident.residual <= tol.identity;
    } else {
        ident.detail = "requires a canonical parameter with n+ = n-";
    }
    rep.checks.push_back(ident);

    // Cases 2/3 on ℂ+: columns of m over the 𝓗2-part of H0 are exactly (i/2)e.
    PropertyCheck tri{"triangular", false, true, 0.0, tol.triangular, 0, ""};
    if (n > 0 && results.front().cls.base != 1) {
        const DecomposingTriplet T = build_triplet(sys);
        std::vector<int> cols;
        for (int c : T.h2_index)
            if (c < T.dim_a()) cols.push_back(c);
        for (const auto& r : results) {
            if (r.lambda.imag() <= 0 || cols.empty()) continue;
            tri.applicable = true;
            ++tri.samples;
            for (int c : cols) {
                Vec e = Vec::Zero(r.m.rows());
                e(c) = 0.5 * kI;
                tri.residual = std::max(tri.residual, (r.m.col(c) - e).norm());
            }
        }
        tri.passed = tri.residual <= tol.triangular;
    }
    rep.checks.push_back(tri);
    return rep;
}

}  // namespace weylforge
