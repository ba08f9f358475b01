#pragma once

#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include "orbitspec/common.hpp"
#include "orbitspec/intpoly.hpp"

namespace orbitspec {

// Finite subset of Z^d carried inside a half-open box window.
struct WindowedSet {
  int dim = 0;
  std::vector<std::pair<Int, Int>> window;  // [lo_i, hi_i) per coordinate
  std::vector<std::vector<Int>> members;    // sorted lexicographically, distinct
  Rat density() const;                      // |E| / volume of the window
  bool contains(const std::vector<Int>& x) const;
};
WindowedSet make_windowed_set(std::vector<std::pair<Int, Int>> window,
                              std::vector<std::vector<Int>> members);

WindowedSet difference_set(const WindowedSet& e);  // E - E, windowed accordingly

struct BogolyubovTrail {
  Int k;
  bool covered = false;
  std::vector<Int> uncovered_point;  // a box point k m outside (E-E) + P(E-E)
};
struct BogolyubovResult {
  std::optional<Int> k;  // smallest k <= k_max covering the whole scanned box
  bool windowed_evidence = true;  // positives are certified on the box only
  std::vector<BogolyubovTrail> trail;
};
// Smallest k with { k m : |m|_inf <= radius } inside D + P(D), D = E - E.
// Failures are exact: D is complete, so a missed point refutes k outright.
BogolyubovResult bogolyubov_min_k(const WindowedSet& e, const IntPolynomialMap& p,
                                  const Int& k_max, const Int& radius);

// Signed d-volumes spanned by (d+1)-point tuples of E; 0 enters via repetition.
std::vector<Int> volspec(const WindowedSet& e);
// Every d! * k * j with |j| <= bound appears in volspec(E).
bool volspec_coverage(const WindowedSet& e, const Int& k, const Int& bound);

// { n in [lo, hi) : dist(n alpha, Z) < eps }, decided exactly.
std::vector<Int> bohr_set(const Rat& alpha, const Rat& eps, const Int& lo, const Int& hi);

struct AppendixCheck {
  DegenerateCombination comb;  // alpha . P = beta . x
  Rat fat_eps;                 // 2 eps (sum|alpha_i| + sum|beta_j|)
  Int set_size;
  std::vector<std::pair<Int, std::vector<Int>>> uncovered;  // per k, point k m
  bool none_certified = false;  // every k <= k_max has a certified miss
  BogolyubovResult bogolyubov;  // windowed cross-check on the same E
};
// E = (Bohr(a, eps) cap [lo, hi))^d.  Every point of (E-E) + P(E-E) lands in
// the fat Bohr set at eps'; a multiple k m outside it certifies that no
// translate structure at step k can cover Z^d, for any window.
AppendixCheck appendix_necessity_check(const IntPolynomialMap& p, const Rat& a,
                                       const Rat& eps, const Int& lo, const Int& hi,
                                       const Int& k_max, const Int& radius);

struct PinnedRefutation {
  bool refuted = false;  // every pinned pair misses some step j <= m
  bool periodic = false; // decided over a full period rather than a finite window
  Int m{0};
  Int m_prime{0};                  // max over pairs of the smallest failing j
  std::vector<Int> worst_pair;     // (x, y) needing the longest pattern
  std::vector<Int> covering_pair;  // present when some pair covers {k..mk}
  std::int64_t pair_count = 0;
};
// Pinned pair (x, y) covers step j when jk + x lies in E + P(E - y).
// With a period, membership is reduced mod the period and the verdict is exact.
PinnedRefutation pinned_delta_refuter(const WindowedSet& e, const IntPolynomialMap& p,
                                      const Int& k, const Int& m,
                                      const std::optional<Int>& period);

}  // namespace orbitspec
