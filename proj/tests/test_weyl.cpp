#include <doctest.h>

#include <cmath>
#include <numbers>

#include "helpers.hpp"
#include "weylforge/builtins.hpp"
#include "weylforge/weyl.hpp"

using namespace weylforge;

namespace {
const cd tan_i = std::tan(kI);         // i tanh 1
const cd sec_i = 1.0 / std::cos(kI);   // 1 / cosh 1
const cd coth_i = cd(0, 1.0 / std::tanh(1.0));
}

TEST_CASE("tan system blocks at i") {
    const SymmetricSystem sys = builtins::tan_system();
    const DecomposingTriplet T = build_triplet(sys);
    const WeylBlocks w = weyl_blocks(sys, T, kI);
    REQUIRE(w.m0.rows() == 1);
    CHECK(std::abs(w.m0(0, 0) - tan_i) < 1e-10);
    CHECK(std::abs(w.M2(0, 0) - sec_i) < 1e-10);
    CHECK(std::abs(w.M3(0, 0) - sec_i) < 1e-10);
    CHECK(std::abs(w.M4(0, 0) - tan_i) < 1e-10);
    CHECK(std::abs(0.761594155955765 - tan_i.imag()) < 1e-12);
    CHECK(std::abs(0.648054273663885 - sec_i.real()) < 1e-12);
}

TEST_CASE("Weyl function at the conjugate point is the adjoint") {
    for (const char* name : {"tan_system", "free_schrodinger_halfline", "odd_minus_iy3"}) {
        CAPTURE(name);
        const SymmetricSystem sys = builtins::by_name(name);
        const DecomposingTriplet T = build_triplet(sys);
        for (cd l : {cd(0, 1), cd(1, 1), cd(-1, 2)}) {
            const Mat up = weyl_blocks(sys, T, l).M;
            const Mat lo = weyl_blocks(sys, T, std::conj(l)).M;
            if (T.equal_spaces()) CHECK(norm2(up - lo.adjoint()) < 1e-9);
            CHECK(up.allFinite());
            CHECK(lo.allFinite());
        }
    }
}

TEST_CASE("Dirichlet and Neumann m-functions of the tan system") {
    const SymmetricSystem sys = builtins::tan_system();
    const DecomposingTriplet T = build_triplet(sys);
    for (Method m : {Method::krein, Method::direct}) {
        CAPTURE(to_string(m));
        auto eval = [&](const BoundaryParameterCollection& tau) {
            return m == Method::krein ? m_tau_krein(sys, T, tau, kI) : m_tau_direct(sys, T, tau, kI);
        };
        const auto d = eval(dirichlet_parameter(T));
        CHECK(std::abs(d.m(0, 0) - tan_i) < 1e-9);
        const auto n = eval(neumann_parameter(T));
        CHECK(std::abs(n.m(0, 0) - coth_i) < 1e-9);
        CHECK(std::abs(coth_i - 1.313035285499331 * kI) < 1e-12);
    }
}

TEST_CASE("Krein formula is invariant under left multiplication of the pair") {
    const SymmetricSystem sys = builtins::tan_system();
    const DecomposingTriplet T = build_triplet(sys);
    std::mt19937 rng(17);
    const auto sa = selfadjoint_from_B(testing::random_hermitian(rng, 1));
    const Mat phi = testing::random_matrix(rng, 1, 1) + identity(1);
    const auto base = parameter_from_pair(OperatorPair::constant(sa.cosB, sa.sinB), T);
    const auto scaled = parameter_from_pair(OperatorPair::constant(phi * sa.cosB, phi * sa.sinB), T);
    for (cd l : {cd(0, 1), cd(0.5, -2)}) {
        const Mat m1 = m_tau_krein(sys, T, base, l).m;
        const Mat m2 = m_tau_krein(sys, T, scaled, l).m;
        CHECK(norm2(m1 - m2) < 1e-10);
        CHECK(norm2(m1 - m_tau_direct(sys, T, base, l).m) < 1e-9);
    }
}

TEST_CASE("canonical solutions start from the prescribed boundary values") {
    const SymmetricSystem sys = builtins::free_schrodinger_halfline();
    const auto cs = canonical_solutions(sys, kI, 3.0);
    const Mat phi_a = sys.X_a * cs.phi(sys.a);
    const Mat psi_a = sys.X_a * cs.psi(sys.a);
    Mat phi_expect = Mat::Zero(2, 1), psi_expect = Mat::Zero(2, 1);
    phi_expect(0, 0) = 1.0;
    psi_expect(1, 0) = -1.0;
    CHECK(norm2(phi_a - phi_expect) < 1e-14);
    CHECK(norm2(psi_a - psi_expect) < 1e-14);
}

TEST_CASE("free Schroedinger half-line: limit-point m at i") {
    const SymmetricSystem sys = builtins::free_schrodinger_halfline();
    const DecomposingTriplet T = build_triplet(sys);
    const auto tau = empty_parameter(T);
    const cd expect = std::exp(kI * std::numbers::pi / 4.0);  // sqrt(i)
    const auto d = m_tau_direct(sys, T, tau, kI);
    CHECK(std::abs(d.m(0, 0) - expect) < 1e-8);
    const auto k = m_tau_krein(sys, T, tau, kI);
    CHECK(std::abs(k.m(0, 0) - expect) < 1e-8);
    for (cd l : {cd(-1, 1), cd(2, -0.5), cd(0, 3)}) {
        cd k = std::sqrt(l);
        if (k.imag() < 0) k = -k;  // decaying branch e^{ikt}
        const auto g = m_tau_direct(sys, T, tau, l);
        CHECK(std::abs(g.m(0, 0) - kI / k) < 1e-8);
    }
}

TEST_CASE("truncation needs a long enough schedule and collapses for regular b") {
    const SymmetricSystem lp = builtins::free_schrodinger_halfline();
    const DecomposingTriplet T = build_triplet(lp);
    CHECK_THROWS_AS(m_limit_singular(lp, T, empty_parameter(T), kI, {5.0, 10.0}), std::invalid_argument);
    CHECK_THROWS_AS(m_limit_singular(lp, T, empty_parameter(T), kI, {2.0, 3.0, 4.0}), NonConvergenceError);
    const auto r = m_limit_singular(lp, T, empty_parameter(T), kI, default_beta_schedule(lp.a));
    CHECK(std::abs(r.m(0, 0) - std::exp(kI * std::numbers::pi / 4.0)) < 1e-6);
    CHECK(r.diagnostics.betas.size() >= 3);

    const SymmetricSystem reg = builtins::tan_system();
    const DecomposingTriplet Tr = build_triplet(reg);
    const auto tau = dirichlet_parameter(Tr);
    const auto t = m_limit_singular(reg, Tr, tau, kI, {5.0});
    CHECK(norm2(t.m - m_tau_direct(reg, Tr, tau, kI).m) < 1e-12);
}

TEST_CASE("L2 basis of a limit-point system has the deficiency dimension") {
    const SymmetricSystem sys = builtins::by_name("odd_minus_iy3");
    const DecomposingTriplet T = build_triplet(sys);
    const auto up = l2_solution_basis(sys, T, kI);
    const auto lo = l2_solution_basis(sys, T, -kI);
    CHECK(up.size() == 1);
    CHECK(lo.size() == 2);
    CHECK(up.singular);
    CHECK_FALSE(up.drift.empty());
    CHECK(up.drift.back() <= 1e-11);
}

TEST_CASE("is_canonical") {
    const SymmetricSystem sys = builtins::tan_system();
    const DecomposingTriplet T = build_triplet(sys);
    CHECK(is_canonical(T, dirichlet_parameter(T)));
    CHECK(is_canonical(T, neumann_parameter(T)));
    const auto diss = parameter_from_pair(OperatorPair::constant(identity(1), 0.5 * kI * identity(1), HalfPlane::upper), T);
    CHECK_FALSE(is_canonical(T, diss));
}
