#pragma once

#include <limits>
#include <optional>
#include <vector>

#include "weylforge/weyl.hpp"

namespace weylforge {

// Real polynomial, c[k] multiplies t^k.
struct Polynomial {
    std::vector<double> c;

    double operator()(double t) const;
    Polynomial derivative() const;
    static Polynomial constant(double v) { return Polynomial{{v}}; }
};

// l[y] of order 2n+1 with real coefficients p_j, q_j (j = 0..n) and weight w.
struct OddOrderExpression {
    int n = 0;
    std::vector<Polynomial> p;
    std::vector<Polynomial> q;
    Polynomial w = Polynomial::constant(1.0);
    double a = 0.0;
    double b = std::numeric_limits<double>::infinity();  // infinite b is limit point

    // w(t) l[y](t) from derivatives d[k] = y^(k)(t), k = 0..2n+1.
    cd weighted_action(double t, const std::vector<cd>& d) const;
};

// Frame y -> bold y. Ladder:
//   n = 0: Y = q0^{1/2} y
//   n = 1: Y = (y, q0^{1/2} y', i q0 y'' + (i/2) q0' y' - (i/2) q1 y + p0 y')
struct QuasiDerivativeFrame {
    OddOrderExpression expr;

    int dim() const { return 2 * expr.n + 1; }
    // d[k] = y^(k)(t), k = 0..2n
    Vec apply(double t, const std::vector<cd>& d) const;
    // forcing g lifted so that the system carries Δ0 embed(g)
    Vec embed(double t, cd g) const;
};

struct ReducedSystem {
    SymmetricSystem system;
    QuasiDerivativeFrame frame;
};

ReducedSystem reduce_to_system(const OddOrderExpression& expr);

MFunctionResult mfunction_odd_order(const OddOrderExpression& expr,
                                    const std::optional<BoundaryParameterCollection>& tau, cd lambda,
                                    Method method = Method::direct, const WeylOptions& opts = {});

}  // namespace weylforge
