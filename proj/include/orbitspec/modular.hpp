#pragma once

#include <utility>
#include <vector>

#include "orbitspec/common.hpp"

namespace orbitspec {

Rat frac_part(const Rat& x);  // x mod 1 in [0, 1)

// Point of the d-torus with reduced coordinates in [0, 1).
class TorusRational {
 public:
  TorusRational() = default;
  explicit TorusRational(std::vector<Rat> coords);  // reduces mod 1
  static TorusRational zero(int dim);

  const std::vector<Rat>& coords() const { return coords_; }
  int dim() const { return static_cast<int>(coords_.size()); }
  Int denom() const;  // lcm of coordinate denominators; 1 iff zero point
  bool is_zero() const;

  bool operator==(const TorusRational&) const = default;
  bool operator<(const TorusRational& o) const { return coords_ < o.coords_; }

 private:
  std::vector<Rat> coords_;
};

TorusRational reduce_torus_point(const std::vector<std::pair<Int, Int>>& raw);

// Nonzero grid points (a_1/g_1, ..., a_d/g_d) with denom <= m, sorted.
std::vector<TorusRational> enumerate_rat(const Int& m, const std::vector<Int>& grid);

// Unique residue mod the product; moduli must be pairwise coprime.
Int crt_combine(const std::vector<Int>& residues, const std::vector<Int>& moduli);

struct Factorization {
  std::vector<std::pair<Int, int>> factors;  // strictly increasing primes
  Int value() const;
  bool squarefree() const;
};

Factorization factorize(const Int& n);  // trial division, desk-scale bound
bool is_prime(const Int& n);

}  // namespace orbitspec
