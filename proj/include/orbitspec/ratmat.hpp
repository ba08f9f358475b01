#pragma once

#include <vector>

#include "orbitspec/common.hpp"

namespace orbitspec {

using RatMatrix = std::vector<std::vector<Rat>>;

int rat_rank(RatMatrix m);

// Basis of {x : m x = 0}, one vector per free column in left-to-right order.
std::vector<std::vector<Rat>> rat_kernel(const RatMatrix& m);

// Gauss-Jordan inverse; UsageError when singular.
RatMatrix rat_inverse(RatMatrix m);

// Clear denominators, divide by the gcd, make the first nonzero entry positive.
std::vector<Int> normalize_integer_vector(const std::vector<Rat>& v);

}  // namespace orbitspec
