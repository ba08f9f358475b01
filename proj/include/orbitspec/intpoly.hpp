#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "orbitspec/common.hpp"

namespace orbitspec {

struct Monomial {
  std::vector<std::int64_t> exponents;
  std::int64_t degree() const;
  bool operator==(const Monomial&) const = default;
};

// graded lexicographic: total degree first, then exponent vector
bool operator<(const Monomial& a, const Monomial& b);

// Integer-coefficient polynomial map Z^r -> Z^d.
class IntPolynomialMap {
 public:
  using Component = std::map<Monomial, Int>;

  IntPolynomialMap(int arity, std::vector<Component> components);

  // Components separated by ';', variables x0..x{r-1} ('n' aliases x0),
  // terms like "3*x0^2*x1 - x1". Integer coefficients only.
  static IntPolynomialMap parse(const std::string& text);

  int arity() const { return arity_; }
  int dim() const { return static_cast<int>(components_.size()); }
  const std::vector<Component>& components() const { return components_; }

  std::int64_t degree() const;  // max total degree, 0 for the zero map
  std::vector<Int> constant_term() const;
  bool zero_constant_term() const;

  std::vector<Int> evaluate(const std::vector<Int>& x) const;
  std::vector<std::int64_t> evaluate_mod(const std::vector<std::int64_t>& x,
                                         std::int64_t q) const;

  std::string to_string() const;

 private:
  int arity_;
  std::vector<Component> components_;
};

// x_j -> n^{(D+1)^{j+1}} with D = deg(P); injective on monomials of degree <= D,
// so each output component keeps the same coefficient multiset.
IntPolynomialMap curry_to_single_variable(const IntPolynomialMap& p);

// P(k*x)/k; requires zero constant term so the division stays integral.
IntPolynomialMap rescale_orbit(const IntPolynomialMap& p, const Int& k);

struct RankResult {
  int rank;
  // present iff rank < dim: integer a != 0 with sum a_i P_i = 0,
  // first nonzero entry positive, entries coprime
  std::optional<std::vector<Int>> kernel_witness;
};
RankResult component_rank(const IntPolynomialMap& p);

struct DegenerateCombination {
  std::vector<Int> alpha;  // length dim
  std::vector<Int> beta;   // length max(arity, dim)
};
// alpha != 0 with sum alpha_i P_i = sum beta_j x_j, if one exists.
// Requires zero constant term.
std::optional<DegenerateCombination> linear_degenerate_combination(
    const IntPolynomialMap& p);

}  // namespace orbitspec
