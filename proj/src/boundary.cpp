#include "weylforge/boundary.hpp"

#include <cstdlib>
#include <stdexcept>

namespace weylforge {

EndpointBForm boundary_form_regular(const SymmetricSystem& sys) {
    if (!sys.b_regular || !sys.X_b) throw std::invalid_argument("boundary_form_regular: b is not regular");
    EndpointBForm f;
    f.kind = EndpointKind::regular;
    f.form_matrix = sys.X_b->adjoint() * sys.J.matrix * *sys.X_b;
    const Inertia in = inertia(-kI * *f.form_matrix);
    f.nu_b_plus = in.positive;
    f.nu_b_minus = in.negative;
    return f;
}

EndpointBForm boundary_form(const SymmetricSystem& sys) {
    if (sys.b_regular) return boundary_form_regular(sys);
    return EndpointBForm{EndpointKind::limit_point, std::nullopt, 0, 0};
}

EndpointBForm abstract_form(int nu_b_plus, int nu_b_minus) {
    if (nu_b_plus < 0 || nu_b_minus < 0) throw std::invalid_argument("negative inertia");
    return EndpointBForm{EndpointKind::abstract, std::nullopt, nu_b_plus, nu_b_minus};
}

std::string to_string(CaseTag tag) {
    switch (tag) {
        case CaseTag::case1: return "case1";
        case CaseTag::case1_equal: return "case1_equal";
        case CaseTag::case2: return "case2";
        case CaseTag::case3: return "case3";
        case CaseTag::hamiltonian: return "hamiltonian";
        case CaseTag::minimal: return "minimal";
    }
    return "?";
}

CaseClass classify_case(const SpaceLayout& layout, const EndpointBForm& form) {
    const int d = form.nu_b_plus - form.nu_b_minus;
    const int q = layout.nu_hat;
    CaseClass c;
    if (d >= q) c.base = 1;
    else if (d >= 0) c.base = 2;
    else c.base = 3;
    if (c.base == 1) c.tag = d == q ? CaseTag::case1_equal : CaseTag::case1;
    else c.tag = c.base == 2 ? CaseTag::case2 : CaseTag::case3;
    if (q == 0 && d == 0) c.tag = CaseTag::hamiltonian;
    if (q > 0 && form.nu_b_plus == 0 && form.nu_b_minus == 0) c.tag = CaseTag::minimal;
    return c;
}

BoundaryMapB build_boundary_map(const EndpointBForm& form, const SpaceLayout& layout) {
    BoundaryMapB m;
    m.kind = form.kind;
    m.sign = form.nu_b_plus >= form.nu_b_minus ? 1 : -1;
    if (form.kind == EndpointKind::limit_point) {
        m.gamma_0b = m.gamma_hat_b = m.gamma_1b = Mat(0, 0);
        return m;
    }
    m.dim_hb = std::min(form.nu_b_plus, form.nu_b_minus);
    m.dim_hat_b = std::abs(form.nu_b_plus - form.nu_b_minus);
    if (form.kind == EndpointKind::regular &&
        (m.dim_hb != layout.nu_plus || m.dim_hat_b != layout.nu_hat))
        throw std::invalid_argument("regular endpoint with inconsistent inertia");
    const int hb = m.dim_hb;
    const int hh = m.dim_hat_b;
    m.data_dim = 2 * hb + hh;
    const Mat id = identity(m.data_dim);
    m.gamma_0b = id.topRows(hb);
    m.gamma_hat_b = id.middleRows(hb, hh);
    m.gamma_1b = id.bottomRows(hb);
    return m;
}

Mat boundary_data(const SymmetricSystem& sys, const BoundaryMapB& bmap, const Mat& y_a, const Mat& y_b) {
    const int n = sys.dim();
    Mat d(n + bmap.data_dim, y_a.cols());
    d.topRows(n) = sys.X_a * y_a;
    if (bmap.data_dim > 0) {
        if (bmap.kind != EndpointKind::regular || !sys.X_b)
            throw std::invalid_argument("boundary_data: b-data requires a regular endpoint");
        d.bottomRows(bmap.data_dim) = *sys.X_b * y_b;
    }
    return d;
}

SplitData DecomposingTriplet::split() const {
    SplitData s;
    s.dim_h0 = dim_H0;
    s.h1_index = h1_index;
    s.h2_index = h2_index;
    return s;
}

SplitData DecomposingTriplet::tau_split() const { return SplitData::leading(tau_dim0(), tau_dim1()); }

namespace {

DecomposingTriplet assemble(const SpaceLayout& layout, const BoundaryMapB& bmap, const CaseClass& cls) {
    const int p = layout.nu_plus;
    const int q = layout.nu_hat;
    const int hb = bmap.dim_hb;
    const int hh = bmap.dim_hat_b;
    const int na = layout.dim();
    const int nd = na + bmap.data_dim;
    // row selectors on the data vector
    const Mat id = identity(nd);
    const Mat g0a = id.middleRows(0, p);
    const Mat gha = id.middleRows(p, q);
    const Mat g1a = id.middleRows(p + q, p);
    const Mat g0b = id.middleRows(na, hb);
    const Mat ghb = id.middleRows(na + hb, hh);
    const Mat g1b = id.middleRows(na + hb + hh, hb);

    DecomposingTriplet T;
    T.cls = cls;
    T.layout = layout;
    T.bmap = bmap;
    T.data_dim = nd;
    std::vector<Mat> r0, r1;
    if (cls.base == 1) {
        if (hh < q) throw std::invalid_argument("case 1 requires dim 𝓗̂_b >= dim Ĥ");
        // 𝓗̂_b = Ĥ ⊕ 𝓗2' with Ĥ in the leading coordinates
        const int d2 = hh - q;
        const Mat hb_hat = ghb.topRows(q);
        const Mat hb_2 = ghb.bottomRows(d2);
        T.alpha = 1;
        r0 = {-g1a, kI * (gha - hb_hat), g0b, hb_2};
        r1 = {g0a, 0.5 * (gha + hb_hat), -g1b};
        T.dim_H0 = p + q + hb + d2;
        T.dim_H1 = p + q + hb;
        for (int i = 0; i < T.dim_H1; ++i) T.h1_index.push_back(i);
        for (int i = T.dim_H1; i < T.dim_H0; ++i) T.h2_index.push_back(i);
    } else if (cls.base == 2) {
        if (hh > q || bmap.sign < 0) throw std::invalid_argument("case 2 requires 0 <= dim 𝓗̂_b <= dim Ĥ");
        // Ĥ = 𝓗̂_b ⊕ 𝓗2' with 𝓗̂_b in the leading coordinates
        const int d2 = q - hh;
        const Mat ha_b = gha.topRows(hh);
        const Mat ha_2 = gha.bottomRows(d2);
        T.alpha = -1;
        r0 = {-g1a, kI * (ha_b - ghb), kI * ha_2, g0b};
        r1 = {g0a, 0.5 * (ha_b + ghb), -g1b};
        T.dim_H0 = p + q + hb;
        T.dim_H1 = p + hh + hb;
        for (int i = 0; i < p + hh; ++i) T.h1_index.push_back(i);
        for (int i = p + hh; i < p + q; ++i) T.h2_index.push_back(i);
        for (int i = p + q; i < T.dim_H0; ++i) T.h1_index.push_back(i);
    } else {
        if (bmap.sign > 0 && hh > 0) throw std::invalid_argument("case 3 requires ν_b+ < ν_b-");
        T.alpha = -1;
        r0 = {-g1a, kI * gha, g0b, ghb};
        r1 = {g0a, -g1b};
        T.dim_H0 = p + q + hb + hh;
        T.dim_H1 = p + hb;
        for (int i = 0; i < p; ++i) T.h1_index.push_back(i);
        for (int i = p; i < p + q; ++i) T.h2_index.push_back(i);
        for (int i = p + q; i < p + q + hb; ++i) T.h1_index.push_back(i);
        for (int i = p + q + hb; i < T.dim_H0; ++i) T.h2_index.push_back(i);
    }
    auto stack = [nd](const std::vector<Mat>& rows) {
        Eigen::Index n = 0;
        for (const auto& r : rows) n += r.rows();
        Mat out(n, nd);
        Eigen::Index at = 0;
        for (const auto& r : rows) {
            out.middleRows(at, r.rows()) = r;
            at += r.rows();
        }
        return out;
    };
    T.gamma0 = stack(r0);
    T.gamma1 = stack(r1);
    return T;
}

}  // namespace

DecomposingTriplet build_triplet(const SymmetricSystem& sys, const BoundaryMapB& bmap, const CaseClass& cls) {
    return assemble(sys.layout, bmap, cls);
}

DecomposingTriplet build_triplet(const SymmetricSystem& sys) {
    const EndpointBForm f = boundary_form(sys);
    return assemble(sys.layout, build_boundary_map(f, sys.layout), classify_case(sys.layout, f));
}

DecomposingTriplet build_triplet(const SpaceLayout& layout, const EndpointBForm& form) {
    return assemble(layout, build_boundary_map(form, layout), classify_case(layout, form));
}

std::pair<int, int> deficiency_indices(const SpaceLayout& layout, const EndpointBForm& form) {
    return {layout.nu_plus + form.nu_b_plus, layout.nu_plus + layout.nu_hat + form.nu_b_minus};
}

Mat lagrange_form(const DecomposingTriplet& T, const Mat& f, const Mat& g) {
    const int p = T.layout.nu_plus;
    const int q = T.layout.nu_hat;
    const int na = T.layout.dim();
    const int hb = T.bmap.dim_hb;
    const int hh = T.bmap.dim_hat_b;
    auto rows = [](const Mat& x, int r0, int n) { return x.middleRows(r0, n); };
    Mat at_a = kI * rows(g, p, q).adjoint() * rows(f, p, q) - rows(g, 0, p).adjoint() * rows(f, p + q, p) +
               rows(g, p + q, p).adjoint() * rows(f, 0, p);
    Mat at_b = Mat::Zero(g.cols(), f.cols());
    if (T.bmap.data_dim > 0) {
        at_b = static_cast<double>(T.bmap.sign) * kI * rows(g, na + hb, hh).adjoint() * rows(f, na + hb, hh) -
               rows(g, na, hb).adjoint() * rows(f, na + hb + hh, hb) +
               rows(g, na + hb + hh, hb).adjoint() * rows(f, na, hb);
    }
    return at_b - at_a;
}

Mat triplet_form(const DecomposingTriplet& T, const Mat& f, const Mat& g) {
    const Mat e1 = T.split().embed1();
    const Mat p2 = T.split().P2();
    const Mat g0f = T.gamma0 * f, g0g = T.gamma0 * g;
    const Mat g1f = e1 * (T.gamma1 * f), g1g = e1 * (T.gamma1 * g);
    return g0g.adjoint() * g1f - g1g.adjoint() * g0f +
           kI * static_cast<double>(T.alpha) * (p2 * g0g).adjoint() * (p2 * g0f);
}

}  // namespace weylforge
