#include "weylforge/system.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "weylforge/ode.hpp"

namespace weylforge {

SignatureOperator build_signature(const SpaceLayout& layout) {
    if (layout.nu_plus < 0 || layout.nu_hat < 0) throw std::invalid_argument("negative layout dimension");
    const int p = layout.nu_plus;
    const int q = layout.nu_hat;
    Mat j = Mat::Zero(layout.dim(), layout.dim());
    j.block(0, p + q, p, p) = -identity(p);
    j.block(p, p, q, q) = kI * identity(q);
    j.block(p + q, 0, p, p) = identity(p);
    return {j};
}

namespace {

Mat eval_poly(const std::vector<Mat>& c, double t) {
    Mat acc = c.back();
    for (int k = static_cast<int>(c.size()) - 2; k >= 0; --k) acc = (acc * t + c[k]).eval();
    return acc;
}

// Cubic Hermite with three-point slopes (one-sided at the ends).
struct Tabulated {
    std::vector<double> t;
    std::vector<Mat> v;
    std::vector<Mat> slope;

    Tabulated(std::vector<double> ts, std::vector<Mat> vs) : t(std::move(ts)), v(std::move(vs)) {
        const std::size_t n = t.size();
        slope.resize(n);
        if (n == 1) {
            slope[0] = Mat::Zero(v[0].rows(), v[0].cols());
            return;
        }
        for (std::size_t k = 0; k < n; ++k) {
            if (k == 0) slope[k] = (v[1] - v[0]) / (t[1] - t[0]);
            else if (k == n - 1) slope[k] = (v[k] - v[k - 1]) / (t[k] - t[k - 1]);
            else {
                const double h0 = t[k] - t[k - 1];
                const double h1 = t[k + 1] - t[k];
                slope[k] = (h1 * h1 * (v[k] - v[k - 1]) + h0 * h0 * (v[k + 1] - v[k])) / (h0 * h1 * (h0 + h1));
            }
        }
    }

    Mat operator()(double x) const {
        if (t.size() == 1) return v[0];
        auto it = std::upper_bound(t.begin(), t.end(), x);
        std::size_t k = it == t.begin() ? 0 : static_cast<std::size_t>(it - t.begin()) - 1;
        k = std::min(k, t.size() - 2);
        const double h = t[k + 1] - t[k];
        const double s = (x - t[k]) / h;
        const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
        const double h10 = s * (1 - s) * (1 - s);
        const double h01 = s * s * (3 - 2 * s);
        const double h11 = s * s * (s - 1);
        return h00 * v[k] + h * h10 * slope[k] + h01 * v[k + 1] + h * h11 * slope[k + 1];
    }
};

}  // namespace

CoefficientField CoefficientField::constant(Mat b, Mat delta) {
    CoefficientField f;
    f.rep_ = Representation::constant;
    f.b_ = [b = std::move(b)](double) { return b; };
    f.delta_ = [d = std::move(delta)](double) { return d; };
    return f;
}

CoefficientField CoefficientField::polynomial(std::vector<Mat> b, std::vector<Mat> delta) {
    if (b.empty() || delta.empty()) throw std::invalid_argument("polynomial coefficients must be nonempty");
    CoefficientField f;
    f.rep_ = Representation::polynomial;
    f.b_ = [b = std::move(b)](double t) { return eval_poly(b, t); };
    f.delta_ = [d = std::move(delta)](double t) { return eval_poly(d, t); };
    return f;
}

CoefficientField CoefficientField::tabulated(std::vector<double> t, std::vector<Mat> b, std::vector<Mat> delta) {
    if (t.empty() || t.size() != b.size() || t.size() != delta.size())
        throw std::invalid_argument("tabulated coefficients: sample count mismatch");
    if (!std::is_sorted(t.begin(), t.end()) || std::adjacent_find(t.begin(), t.end()) != t.end())
        throw std::invalid_argument("tabulated coefficients: abscissae must increase strictly");
    CoefficientField f;
    f.rep_ = Representation::tabulated;
    Tabulated tb(t, std::move(b));
    Tabulated td(std::move(t), std::move(delta));
    f.b_ = [tb = std::move(tb)](double x) { return tb(x); };
    f.delta_ = [td = std::move(td)](double x) { return td(x); };
    return f;
}

CoefficientField CoefficientField::builtin(std::string name, Fn b, Fn delta) {
    CoefficientField f;
    f.rep_ = Representation::builtin;
    f.name_ = std::move(name);
    f.b_ = std::move(b);
    f.delta_ = std::move(delta);
    return f;
}

Mat SymmetricSystem::generator(double t, cd lambda) const {
    return -J.matrix * (coeffs.B(t) + lambda * coeffs.Delta(t));
}

SymmetricSystem make_system(SpaceLayout layout, CoefficientField coeffs, double a, double b, bool b_regular, Mat X_a,
                            std::optional<Mat> X_b) {
    if (!(a < b)) throw std::invalid_argument("interval must satisfy a < b");
    if (b_regular && !std::isfinite(b)) throw std::invalid_argument("regular endpoint b must be finite");
    const int n = layout.dim();
    SymmetricSystem sys;
    sys.layout = layout;
    sys.J = build_signature(layout);
    sys.coeffs = std::move(coeffs);
    sys.a = a;
    sys.b = b;
    sys.b_regular = b_regular;
    auto check = [&](const Mat& x, const char* name) {
        if (x.rows() != n || x.cols() != n) throw std::invalid_argument(std::string(name) + ": dimension mismatch");
        const double r = norm2(x.adjoint() * sys.J.matrix * x - sys.J.matrix);
        if (r > 1e-12 * (1.0 + norm2(x) * norm2(x)))
            throw std::invalid_argument(std::string(name) + ": X*JX != J (residual " + std::to_string(r) + ")");
    };
    check(X_a, "X_a");
    sys.X_a = std::move(X_a);
    if (b_regular) {
        if (!X_b) X_b = identity(n);
        check(*X_b, "X_b");
    }
    sys.X_b = std::move(X_b);
    const Mat b0 = sys.coeffs.B(a);
    const Mat d0 = sys.coeffs.Delta(a);
    if (b0.rows() != n || b0.cols() != n || d0.rows() != n || d0.cols() != n)
        throw std::invalid_argument("coefficients: dimension mismatch with layout");
    return sys;
}

ValidationReport validate_system(const SymmetricSystem& sys, const std::vector<double>& t_samples) {
    if (t_samples.empty()) throw std::invalid_argument("no samples");
    ValidationReport rep;
    const Mat& j = sys.J.matrix;
    const double jr = std::max(norm2(j.adjoint() + j), norm2(j * j + identity(sys.dim())));
    if (jr > 1e-12) rep.violations.push_back({"J", sys.a, jr});
    for (double t : t_samples) {
        const Mat b = sys.coeffs.B(t);
        const Mat d = sys.coeffs.Delta(t);
        const double hb = norm2(b - b.adjoint());
        if (hb > 1e-12 * (1.0 + norm2(b))) rep.violations.push_back({"B not Hermitian", t, hb});
        const double hd = norm2(d - d.adjoint());
        if (hd > 1e-12 * (1.0 + norm2(d))) rep.violations.push_back({"Delta not Hermitian", t, hd});
        const double md = min_eigenvalue_hermitian(d);
        if (md < -1e-12 * (1.0 + norm2(d))) rep.violations.push_back({"Delta not PSD", t, -md});
    }
    rep.ok = rep.violations.empty();
    return rep;
}

DefinitenessReport check_definiteness(const SymmetricSystem& sys, const std::vector<cd>& lambda_samples,
                                      const std::vector<double>& t_grid) {
    if (t_grid.empty()) throw std::invalid_argument("no samples");
    DefinitenessReport rep;
    rep.definite = true;
    const int n = sys.dim();
    std::vector<double> ts = t_grid;
    std::sort(ts.begin(), ts.end());
    for (cd lam : lambda_samples) {
        Mat stacked(n * static_cast<Eigen::Index>(ts.size()), n);
        Mat y = identity(n);
        double t_prev = sys.a;
        for (std::size_t k = 0; k < ts.size(); ++k) {
            y = propagate(sys, lam, t_prev, ts[k], y, PropagationSettings{});
            t_prev = ts[k];
            stacked.middleRows(static_cast<Eigen::Index>(k) * n, n) = sys.coeffs.Delta(ts[k]) * y;
        }
        Eigen::JacobiSVD<Mat> svd(stacked);
        const auto& s = svd.singularValues();
        DefinitenessReport::Sample smp;
        smp.lambda = lam;
        smp.sigma_max = s(0);
        smp.sigma_min = s(s.size() - 1);
        smp.definite = smp.sigma_max > 0.0 && smp.sigma_min >= 1e-8 * smp.sigma_max;
        rep.definite = rep.definite && smp.definite;
        rep.samples.push_back(smp);
    }
    return rep;
}

DefinitenessReport check_definiteness(const SymmetricSystem& sys, const std::vector<double>& t_grid) {
    return check_definiteness(sys, {kI, -kI}, t_grid);
}

TraceA trace_a(const SymmetricSystem& sys, const Mat& y_at_a) {
    if (y_at_a.rows() != sys.dim()) throw std::invalid_argument("trace_a: dimension mismatch");
    const Mat g = sys.X_a * y_at_a;
    const int p = sys.layout.nu_plus;
    const int q = sys.layout.nu_hat;
    return {g.topRows(p), g.middleRows(p, q), g.bottomRows(p)};
}

}  // namespace weylforge
