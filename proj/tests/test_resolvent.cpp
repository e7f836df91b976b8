#include <doctest.h>

#include "helpers.hpp"
#include "weylforge/builtins.hpp"
#include "weylforge/resolvent.hpp"

using namespace weylforge;

namespace {

// y(t) = t(1-t)(v0 + v1 t + v2 t^2) has zero boundary data at both ends of [0,1].
struct Bump {
    Vec v0, v1, v2;
    Vec y(double t) const { return t * (1 - t) * (v0 + t * v1 + t * t * v2); }
    Vec dy(double t) const {
        const Vec p = v0 + t * v1 + t * t * v2;
        const Vec dp = v1 + 2 * t * v2;
        return (1 - 2 * t) * p + t * (1 - t) * dp;
    }
};

Bump random_bump(std::mt19937& rng) {
    return {testing::random_matrix(rng, 2, 1).col(0), testing::random_matrix(rng, 2, 1).col(0),
            testing::random_matrix(rng, 2, 1).col(0)};
}

double sup_error(const SolutionHandle& h, const std::function<Vec(double)>& exact, double lo, double hi) {
    double e = 0.0;
    for (int k = 0; k <= 40; ++k) {
        const double t = lo + (hi - lo) * k / 40.0;
        e = std::max(e, (h(t).col(0) - exact(t)).norm());
    }
    return e;
}

}  // namespace

TEST_CASE("tan system: R(lambda)(l - lambda)y = y for domain elements") {
    const SymmetricSystem sys = builtins::tan_system();
    const DecomposingTriplet T = build_triplet(sys);
    const Mat J = sys.J.matrix;
    std::mt19937 rng(31);
    for (const auto& tau : {dirichlet_parameter(T), neumann_parameter(T)}) {
        for (int k = 0; k < 5; ++k) {
            const Bump u = random_bump(rng);
            const cd lambda(0.3 * k - 0.6, k % 2 ? -1.5 : 1.0);
            // B = 0 and Δ = I, so f = J y' - λ y
            const Forcing f = [&](double t) -> Vec { return J * u.dy(t) - lambda * u.y(t); };
            const auto r = apply_resolvent(sys, T, tau, lambda, f);
            CHECK(sup_error(r.y_f, [&](double t) { return u.y(t); }, 0.0, 1.0) < 1e-8);
            CHECK(r.boundary_residual < 1e-9);
        }
    }
}

TEST_CASE("resolvent of zero is zero and the map is linear") {
    const SymmetricSystem sys = builtins::tan_system();
    const DecomposingTriplet T = build_triplet(sys);
    const auto tau = dirichlet_parameter(T);
    const cd l(0.5, 1.0);
    const auto z = apply_resolvent(sys, T, tau, l, [](double) { return Vec(Vec::Zero(2)); });
    CHECK(sup_error(z.y_f, [](double) { return Vec(Vec::Zero(2)); }, 0.0, 1.0) == 0.0);

    const Forcing f = [](double t) { Vec v(2); v << std::cos(3 * t), cd(0, t * t); return v; };
    const Forcing g = [](double t) { Vec v(2); v << cd(1, -t), std::exp(-t); return v; };
    const cd c(2, -1);
    const auto rf = apply_resolvent(sys, T, tau, l, f);
    const auto rg = apply_resolvent(sys, T, tau, l, g);
    const auto rs = apply_resolvent(sys, T, tau, l, [&](double t) -> Vec { return f(t) + c * g(t); });
    CHECK(sup_error(rs.y_f, [&](double t) -> Vec { return rf.y_f(t).col(0) + c * rg.y_f(t).col(0); }, 0.0, 1.0) < 1e-9);
}

TEST_CASE("resolvent properties on the tan system") {
    const SymmetricSystem sys = builtins::tan_system();
    const DecomposingTriplet T = build_triplet(sys);
    const std::vector<Forcing> fs{[](double t) { Vec v(2); v << std::sin(2 * t), 1.0; return v; },
                                  [](double t) { Vec v(2); v << cd(t, 1), cd(0, -t); return v; }};
    const auto rep = check_resolvent_properties(sys, T, dirichlet_parameter(T), {cd(0, 1), cd(1, -2)}, fs);
    for (const auto& c : rep.checks) {
        CAPTURE(c.name);
        CAPTURE(c.residual);
        CHECK(c.applicable);
        CHECK(c.passed);
    }
}

TEST_CASE("a dissipative parameter is not self-adjoint") {
    const SymmetricSystem sys = builtins::tan_system();
    const DecomposingTriplet T = build_triplet(sys);
    const auto diss =
        parameter_from_pair(OperatorPair::constant(identity(1), 0.5 * kI * identity(1), HalfPlane::upper), T);
    const std::vector<Forcing> fs{[](double t) { Vec v(2); v << 1.0, t; return v; },
                                  [](double t) { Vec v(2); v << cd(0, t), 1.0; return v; }};
    const auto rep = check_resolvent_properties(sys, T, diss, {cd(0, 1), cd(0, -1)}, fs);
    // R(conj l) = R(l)* still holds for the pair and its adjoint counterpart
    CHECK(rep.find("resolvent_adjoint")->residual < 1e-9);
    const PropertyCheck* id = rep.find("resolvent_identity");
    REQUIRE(id);
    CHECK_FALSE(id->applicable);
    CHECK(id->residual > 1e-3);
    CHECK(rep.find("resolvent_norm_bound")->passed);
}

TEST_CASE("limit-point resolvent with compactly supported data") {
    const SymmetricSystem sys = builtins::free_schrodinger_halfline();
    const DecomposingTriplet T = build_triplet(sys);
    const auto tau = empty_parameter(T);
    const double s = 3.0;
    // y = (u, u') with u = t^2 (s - t)^3 on [0, s], zero beyond
    auto u = [s](double t) { return t < s ? t * t * std::pow(s - t, 3) : 0.0; };
    auto du = [s](double t) { return t < s ? 2 * t * std::pow(s - t, 3) - 3 * t * t * std::pow(s - t, 2) : 0.0; };
    auto d2u = [s](double t) {
        return t < s ? 2 * std::pow(s - t, 3) - 12 * t * std::pow(s - t, 2) + 6 * t * t * (s - t) : 0.0;
    };
    for (cd lambda : {cd(0, 1), cd(-1, -1), cd(2, 0.5)}) {
        const Forcing f = [&](double t) { Vec v(2); v << -d2u(t) - lambda * u(t), 0.0; return v; };
        const auto r = apply_resolvent(sys, T, tau, lambda, f, {}, s);
        const auto exact = [&](double t) { Vec v(2); v << u(t), du(t); return v; };
        CHECK(sup_error(r.y_f, exact, 0.0, s) < 1e-7);
        CHECK(sup_error(r.y_f, exact, s, s + 5.0) < 1e-7);
        CHECK(r.tail_residual < 1e-8);
    }
    CHECK_THROWS_AS(apply_resolvent(sys, T, tau, kI, [](double) { return Vec(Vec::Zero(2)); }), std::invalid_argument);
}
