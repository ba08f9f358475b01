#pragma once

#include <cstdint>
#include <vector>

#include "orbitspec/common.hpp"
#include "orbitspec/intpoly.hpp"
#include "orbitspec/modular.hpp"

namespace orbitspec {

struct ValueSet {
  Int modulus;
  std::vector<std::int64_t> residues;  // sorted, nonempty
};

// Exact image of Z/pZ under an arity-1 single-output polynomial.
ValueSet value_set_mod_prime(const IntPolynomialMap& p, const Int& prime);

struct DeficientPrimes {
  Rat lambda;               // 1 - 1/(2 deg P); 2/3 for quadratics (certified per prime)
  std::vector<Int> primes;  // first `count` primes with |V(P,p)| < p
  std::vector<std::int64_t> value_set_sizes;
};
DeficientPrimes find_deficient_primes(const IntPolynomialMap& p, int count,
                                      const Int& scan_bound);

// S(q) for squarefree q via CRT over the prime factors; |S(q)| = prod |V(P,p_j)|.
ValueSet value_set_mod_squarefree(const IntPolynomialMap& p, const Int& q);

// Levels X_i = Z/q_iZ with q_1 = p_1, q_2 = p_2 p_3, ..., A_i = X_i \ (-S(q_i)).
struct CounterexampleBlueprint {
  IntPolynomialMap poly;
  int depth;
  Rat lambda;
  std::vector<Int> primes;  // depth(depth+1)/2 deficient primes, consumed in order
  std::vector<Int> moduli;
  std::vector<std::vector<std::int64_t>> value_sets;  // S(q_i)
  std::vector<std::vector<std::int64_t>> sets;        // A_i
  Int period() const;                                 // prod q_i
};
CounterexampleBlueprint build_counterexample(const IntPolynomialMap& p, int depth);

struct ProgressionLength {
  int level;    // 1-based; smallest level with gcd(k, q_level) = 1
  Int m;        // longest run a, a+k, ..., a+(m-1)k inside A_i + S(q_i)
  Int witness;  // starting residue of one maximal run
};
ProgressionLength max_progression_length(const CounterexampleBlueprint& bp, const Int& k);

// Smallest residue of each A_i: a concrete point with every coordinate inside A.
std::vector<Int> default_base_point(const CounterexampleBlueprint& bp);

// {n in [lo, hi) : (x_i + n) mod q_i in A_i for all i}
std::vector<Int> return_time_set(const CounterexampleBlueprint& bp,
                                 const std::vector<Int>& x, const Int& lo, const Int& hi);

struct LevelRefutation {
  int level;
  Int modulus;
  std::int64_t pair_count;      // |A_i|^2 pinned pairs at this level
  bool refuted;                 // every pair misses some multiple jk, j <= m
  Int m_prime;                  // max over pairs of the smallest failing j
  std::vector<Int> worst_pair;  // (alpha, beta) needing the longest pattern
  std::vector<Int> covering_pair;  // nonempty when some pair covers all of {k..mk}
};
// Level-projected pinned refutation: a pair (a, b) in the ambient product is
// covered at multiple jk only if its level-i residues are covered at level i,
// so refuting every residue pair at a k-coprime level refutes every ambient pair.
LevelRefutation pinned_refute_level(const CounterexampleBlueprint& bp, const Int& k,
                                    const Int& m);

}  // namespace orbitspec
