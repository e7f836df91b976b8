#include "weylforge/odd_order.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace weylforge {

double Polynomial::operator()(double t) const {
    double acc = 0.0;
    for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * t + *it;
    return acc;
}

Polynomial Polynomial::derivative() const {
    Polynomial d;
    for (std::size_t k = 1; k < c.size(); ++k) d.c.push_back(static_cast<double>(k) * c[k]);
    if (d.c.empty()) d.c.push_back(0.0);
    return d;
}

namespace {

void check_shape(const OddOrderExpression& e) {
    if (e.n != 0 && e.n != 1) throw std::invalid_argument("odd-order reduction supports n = 0 and n = 1 only");
    const auto m = static_cast<std::size_t>(e.n + 1);
    if (e.p.size() != m || e.q.size() != m) throw std::invalid_argument("odd-order: need n+1 coefficients p and q");
    if (!(e.a < e.b)) throw std::invalid_argument("odd-order: interval must satisfy a < b");
}

void check_positive(const OddOrderExpression& e) {
    const double hi = std::isfinite(e.b) ? e.b : e.a + 50.0;
    for (int k = 0; k <= 64; ++k) {
        const double t = e.a + (hi - e.a) * k / 64.0;
        if (!(e.q[0](t) > 0.0)) throw std::invalid_argument("odd-order: q0 must be positive");
        if (!(e.w(t) > 0.0)) throw std::invalid_argument("odd-order: w must be positive");
    }
}

}  // namespace

cd OddOrderExpression::weighted_action(double t, const std::vector<cd>& d) const {
    if (n == 0) {
        const double q0 = q[0](t), dq0 = q[0].derivative()(t);
        return kI * q0 * d[1] + 0.5 * kI * dq0 * d[0] + p[0](t) * d[0];
    }
    const Polynomial q0p = q[0].derivative(), q0pp = q0p.derivative();
    const double q0 = q[0](t), dq0 = q0p(t), ddq0 = q0pp(t);
    const double q1 = q[1](t), dq1 = q[1].derivative()(t);
    const double p0 = p[0](t), dp0 = p[0].derivative()(t), p1 = p[1](t);
    // (q0 y')'' + (q0 y'')' = q0'' y' + 3 q0' y'' + 2 q0 y'''
    const cd third = ddq0 * d[1] + 3.0 * dq0 * d[2] + 2.0 * q0 * d[3];
    return kI * q1 * d[1] + 0.5 * kI * dq1 * d[0] + p1 * d[0] - 0.5 * kI * third - (dp0 * d[1] + p0 * d[2]);
}

Vec QuasiDerivativeFrame::apply(double t, const std::vector<cd>& d) const {
    const double q0 = expr.q[0](t);
    if (expr.n == 0) return Vec::Constant(1, std::sqrt(q0) * d[0]);
    const double dq0 = expr.q[0].derivative()(t);
    Vec y(3);
    y(0) = d[0];
    y(1) = std::sqrt(q0) * d[1];
    y(2) = kI * q0 * d[2] + 0.5 * kI * dq0 * d[1] - 0.5 * kI * expr.q[1](t) * d[0] + expr.p[0](t) * d[1];
    return y;
}

Vec QuasiDerivativeFrame::embed(double t, cd g) const {
    if (expr.n == 0) return Vec::Constant(1, std::sqrt(expr.q[0](t)) * g);
    Vec e = Vec::Zero(3);
    e(0) = g;
    return e;
}

ReducedSystem reduce_to_system(const OddOrderExpression& expr) {
    check_shape(expr);
    check_positive(expr);
    const OddOrderExpression e = expr;
    CoefficientField::Fn B, D;
    SpaceLayout layout;
    if (e.n == 0) {
        layout = {0, 1};
        B = [e](double t) { return Mat::Constant(1, 1, -e.p[0](t) / e.q[0](t)); };
        D = [e](double t) { return Mat::Constant(1, 1, e.w(t) / e.q[0](t)); };
    } else {
        layout = {1, 1};
        B = [e](double t) {
            const double q0 = e.q[0](t);
            const double r = 1.0 / std::sqrt(q0);
            const cd s = 0.5 * kI * e.q[1](t) * r;
            Mat m = Mat::Zero(3, 3);
            m(0, 0) = -e.p[1](t);
            m(0, 1) = -s;
            m(1, 0) = s;
            m(1, 1) = -e.p[0](t) / q0;
            m(1, 2) = r;
            m(2, 1) = r;
            return m;
        };
        D = [e](double t) {
            Mat m = Mat::Zero(3, 3);
            m(0, 0) = e.w(t);
            return m;
        };
    }
    const int N = layout.dim();
    const bool regular = std::isfinite(e.b);
    SymmetricSystem sys = make_system(layout, CoefficientField::builtin(e.n == 0 ? "odd_order_1" : "odd_order_3", B, D),
                                      e.a, e.b, regular, identity(N), regular ? std::optional<Mat>(identity(N)) : std::nullopt);
    return {std::move(sys), QuasiDerivativeFrame{e}};
}

MFunctionResult mfunction_odd_order(const OddOrderExpression& expr,
                                    const std::optional<BoundaryParameterCollection>& tau, cd lambda, Method method,
                                    const WeylOptions& opts) {
    const ReducedSystem r = reduce_to_system(expr);
    const DecomposingTriplet T = build_triplet(r.system);
    BoundaryParameterCollection t;
    if (tau) t = *tau;
    else if (T.tau_dim0() + T.tau_dim1() == 0) t = empty_parameter(T);
    else t = dirichlet_parameter(T);
    switch (method) {
        case Method::krein: return m_tau_krein(r.system, T, t, lambda, opts);
        case Method::truncation:
            return m_limit_singular(r.system, T, t, lambda,
                                    opts.schedule.empty() ? default_beta_schedule(expr.a) : opts.schedule, opts);
        case Method::direct: break;
    }
    return m_tau_direct(r.system, T, t, lambda, opts);
}

}  // namespace weylforge
