#pragma once

#include <string>
#include <vector>

#include "weylforge/odd_order.hpp"
#include "weylforge/system.hpp"

namespace weylforge::builtins {

// Jy' = λy on [0,1], J = [[0,-1],[1,0]], X_a = X_b = I.
SymmetricSystem tan_system();
// -y'' = λy on [0,∞) written with B = diag(0,1), Δ = diag(1,0).
SymmetricSystem free_schrodinger_halfline();
// l[y] = iy' on [0,∞)
OddOrderExpression first_order_expression();
// l[y] = -iy''' on [0,∞)
OddOrderExpression third_order_expression();

const std::vector<std::string>& names();
// Throws std::invalid_argument for unknown names.
SymmetricSystem by_name(const std::string& name);

}  // namespace weylforge::builtins
