#include <doctest.h>

#include <cmath>
#include <unsupported/Eigen/MatrixFunctions>

#include "helpers.hpp"
#include "weylforge/builtins.hpp"
#include "weylforge/ode.hpp"
#include "weylforge/weyl.hpp"

using namespace weylforge;

TEST_CASE("DOP853 local error scales like h^9") {
    std::mt19937 rng(5);
    const Mat a = testing::random_matrix(rng, 3, 3);
    Generator A = [a](double) { return a; };
    const Mat y0 = identity(3);
    double prev = 0.0;
    std::vector<double> slopes;
    for (double h : {0.2, 0.1, 0.05}) {
        const Mat exact = (h * a).exp();
        const double err = norm2(dop853::step(A, 0.0, y0, h, 1e-10, 1e-12).y - exact);
        if (prev > 0.0) slopes.push_back(std::log2(prev / err));
        prev = err;
    }
    for (double s : slopes) CHECK(s > 7.5);
}

TEST_CASE("tan-system fundamental matrix matches cos/sin") {
    const auto sys = builtins::tan_system();
    const cd lambda(0.3, 1.1);
    auto traj = fundamental(sys, lambda, 0.0, identity(2), 0.0, 1.0);
    for (double t : {0.0, 0.1, 0.37, 0.8, 1.0}) {
        Mat expect(2, 2);
        expect << std::cos(lambda * t), std::sin(lambda * t), -std::sin(lambda * t), std::cos(lambda * t);
        CHECK(norm2((*traj)(t) - expect) < 1e-9);
    }
    CHECK_THROWS_AS((*traj)(1.5), std::out_of_range);
}

TEST_CASE("propagate composes and conserves Y*(conj lambda) J Y(lambda)") {
    for (const auto& name : builtins::names()) {
        CAPTURE(name);
        const auto sys = builtins::by_name(name);
        const int n = sys.dim();
        const cd lambda(0.4, 0.9);
        const Mat y1 = propagate(sys, lambda, 0.0, 0.6, identity(n));
        const Mat y2 = propagate(sys, lambda, 0.6, 1.0, identity(n));
        CHECK(norm2(propagate(sys, lambda, 0.0, 1.0, identity(n)) - y2 * y1) < 1e-9);
        const Mat z = propagate(sys, std::conj(lambda), 0.0, 1.0, identity(n));
        const Mat y = y2 * y1;
        CHECK(norm2(z.adjoint() * sys.J.matrix * y - sys.J.matrix) < 1e-9);
    }
}

TEST_CASE("weighted Gram of the tan-system cosine column") {
    // ∫_0^1 |cos(ist)|² + |sin(ist)|² dt = sinh(2s) / (2s)
    const auto sys = builtins::tan_system();
    for (double s : {0.5, 1.0, 2.0}) {
        const cd lambda(0.0, s);
        auto traj = fundamental(sys, lambda, 0.0, identity(2), 0.0, 1.0);
        Mat c = Mat::Zero(2, 1);
        c(0, 0) = 1.0;
        const SolutionHandle h = make_handle(traj, c, lambda);
        const double g = weighted_gram(sys, h, h, 0.0, 1.0)(0, 0).real();
        const double exact = std::sinh(2 * s) / (2 * s);
        CHECK(std::abs(g - exact) < 1e-10 * exact);
    }
}

TEST_CASE("adaptive quadrature handles peaked integrands") {
    auto f = [](double t) { return Mat::Constant(1, 1, 1.0 / (1e-4 + (t - 0.3) * (t - 0.3))); };
    const double exact = (std::atan(0.7 / 1e-2) + std::atan(0.3 / 1e-2)) / 1e-2;
    CHECK(std::abs(integrate_matrix(f, 0.0, 1.0, 1e-12)(0, 0).real() - exact) < 1e-8 * exact);
}

TEST_CASE("inhomogeneous solve reproduces a manufactured solution") {
    // y = (t², t) on the tan-system: Jy' - λy = Δf gives f = Jy' - λy
    const auto sys = builtins::tan_system();
    const cd lambda(0.0, 1.0);
    auto f = [&](double t) {
        Vec yp(2), y(2);
        yp << 2 * t, 1.0;
        y << t * t, t;
        return Vec(sys.J.matrix * yp - lambda * y);
    };
    const SolutionHandle h = solve_inhomogeneous(sys, lambda, f, Vec::Zero(2));
    for (double t : {0.25, 0.5, 1.0}) {
        Vec y(2);
        y << t * t, t;
        CHECK((h(t).col(0) - y).norm() < 1e-9);
    }
}

TEST_CASE("default schedule") {
    const auto s = default_beta_schedule(1.0);
    REQUIRE(s.size() == 13);
    CHECK(s.front() == 6.0);
    CHECK(s.back() == 1.0 + 5.0 * 4096.0);
}

TEST_CASE("l2 membership separates decaying from growing solutions") {
    const auto sys = builtins::free_schrodinger_halfline();
    const cd lambda(0.0, 1.0);
    const cd k = std::sqrt(lambda);
    const std::vector<double> sched{5, 10, 20, 30, 40, 60, 80};
    // exp(ikt) decays; forward integration would lose it, so it is given in closed form
    SolutionHandle decay;
    decay.lambda = lambda;
    decay.column_count = 1;
    decay.hi = 80.0;
    decay.evaluator = [k](double t) -> Mat {
        Mat y(2, 1);
        y << std::exp(kI * k * t), kI * k * std::exp(kI * k * t);
        return y;
    };
    CHECK(l2_membership(sys, decay, sched)[0] == Membership::in);
    Vec grow(2);
    grow << 1.0, -kI * k;
    auto traj = fundamental(sys, lambda, 0.0, grow, 0.0, 80.0);
    CHECK(l2_membership(sys, make_handle(traj, identity(1), lambda), sched)[0] == Membership::out);
    CHECK_THROWS_WITH(l2_membership(sys, decay, {5, 10}), "schedule too short");
}
