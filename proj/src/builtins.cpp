#include "weylforge/builtins.hpp"

#include <limits>
#include <stdexcept>

namespace weylforge::builtins {

SymmetricSystem tan_system() {
    auto c = CoefficientField::builtin(
        "tan_system", [](double) { return Mat(Mat::Zero(2, 2)); }, [](double) { return identity(2); });
    return make_system({1, 0}, std::move(c), 0.0, 1.0, true, identity(2), identity(2));
}

SymmetricSystem free_schrodinger_halfline() {
    Mat B = Mat::Zero(2, 2), D = Mat::Zero(2, 2);
    B(1, 1) = 1.0;
    D(0, 0) = 1.0;
    auto c = CoefficientField::builtin(
        "free_schrodinger_halfline", [B](double) { return B; }, [D](double) { return D; });
    return make_system({1, 0}, std::move(c), 0.0, std::numeric_limits<double>::infinity(), false, identity(2));
}

OddOrderExpression first_order_expression() {
    OddOrderExpression e;
    e.n = 0;
    e.p = {Polynomial::constant(0.0)};
    e.q = {Polynomial::constant(1.0)};
    return e;
}

OddOrderExpression third_order_expression() {
    OddOrderExpression e;
    e.n = 1;
    e.p = {Polynomial::constant(0.0), Polynomial::constant(0.0)};
    e.q = {Polynomial::constant(1.0), Polynomial::constant(0.0)};
    return e;
}

const std::vector<std::string>& names() {
    static const std::vector<std::string> n = {"tan_system", "free_schrodinger_halfline", "odd_iy1", "odd_minus_iy3"};
    return n;
}

SymmetricSystem by_name(const std::string& name) {
    if (name == "tan_system" || name == "constant_hamiltonian") return tan_system();
    if (name == "free_schrodinger_halfline") return free_schrodinger_halfline();
    if (name == "odd_iy1") return reduce_to_system(first_order_expression()).system;
    if (name == "odd_minus_iy3") return reduce_to_system(third_order_expression()).system;
    throw std::invalid_argument("unknown builtin '" + name + "'");
}

}  // namespace weylforge::builtins
