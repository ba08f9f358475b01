#pragma once

#include <optional>
#include <vector>

#include "orbitspec/common.hpp"
#include "orbitspec/intpoly.hpp"
#include "orbitspec/modular.hpp"

namespace orbitspec {

using IntMatrix = std::vector<std::vector<Int>>;

IntMatrix identity_matrix(int n);
IntMatrix matrix_product(const IntMatrix& a, const IntMatrix& b);
Int determinant(IntMatrix m);  // Bareiss fraction-free elimination

struct SmithDecomposition {
  IntMatrix l, d, r;  // b = l * d * r, |det l| = |det r| = 1
  std::vector<Int> invariant_factors() const;  // nonzero diagonal of d
};
SmithDecomposition smith_normal_form(const IntMatrix& b);

// Coefficient matrix of P - P(0) for an arity-1 map: row t-1 holds the
// coefficients of n^t across components, t = 1..deg(P).
IntMatrix coefficient_matrix(const IntPolynomialMap& p);

struct ComplexityBound {
  Int q;  // largest invariant factor; certified by a randomized spot check
  std::vector<Int> invariant_factors;
};
// Uniform bound Q with gcd(coeffs((P - P(0)) . a), q) <= Q over all coprime (a, q).
ComplexityBound multiplicative_complexity_bound(const IntPolynomialMap& p);

struct SmallestFactorCounterexample {
  std::vector<Int> a;
  Int q;
  Int gcd_value;        // gcd(coeffs, q), exceeds the smallest invariant factor
  Int smallest_factor;  // the invalid candidate bound
};
// Search for coprime (a, q) refuting the smallest-invariant-factor reading
// of the uniform bound.  Empty when none exists in the search box.
std::optional<SmallestFactorCounterexample> smallest_factor_counterexample(
    const IntPolynomialMap& p);

// d x d integer matrix with first row v and determinant exactly 1.
IntMatrix complete_primitive_to_unimodular(const std::vector<Int>& v);

struct Haystack {
  int dim;
  std::vector<Int> ts;                     // parameters t with v_t admitted
  std::vector<std::vector<Int>> vectors;   // v_t = (1, t, ..., t^{d-1})
};
// Moment-curve vectors with d! * t^{d(d-1)} <= m, i.e. sup norm <= (m/d!)^{1/d}.
Haystack haystack_window(int d, const Int& m);

// All grid points alpha with v . alpha == 0 (mod 1) for every v.
std::vector<TorusRational> annihilator_on_grid(
    const std::vector<std::vector<Int>>& vectors, const std::vector<Int>& grid);

struct AnnihilatorReport {
  std::vector<TorusRational> points;
  Int max_denom;  // over nonzero points; 0 when the annihilator is trivial
};
// For d independent vectors from haystack_window(d, m), confirms every joint
// annihilator point on the grid lies in Rat(m) + {0}.
AnnihilatorReport annihilator_in_rat(const std::vector<std::vector<Int>>& vectors,
                                     const std::vector<Int>& grid, const Int& m);

}  // namespace orbitspec
