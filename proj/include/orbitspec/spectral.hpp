#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "orbitspec/bitset.hpp"
#include "orbitspec/common.hpp"
#include "orbitspec/intpoly.hpp"
#include "orbitspec/modular.hpp"

namespace orbitspec {

// X = prod_i Z/q_i with d commuting rotations T_j x = x + g_j.
// Elements are mixed-radix indices; level 0 is the most significant digit.
class RotationSystem {
 public:
  RotationSystem(std::vector<std::int64_t> moduli,
                 std::vector<std::vector<std::int64_t>> generators);
  static RotationSystem cyclic(std::int64_t q);               // Z/q, T = +1
  static RotationSystem diagonal(std::vector<std::int64_t> moduli);  // one T = +(1,...,1)
  static RotationSystem torus(std::int64_t q, int d);         // (Z/q)^d, T_j = +e_j

  int levels() const { return static_cast<int>(q_.size()); }
  int dim() const { return static_cast<int>(g_.size()); }
  std::int64_t size() const { return size_; }
  const std::vector<std::int64_t>& moduli() const { return q_; }
  const std::vector<std::vector<std::int64_t>>& generators() const { return g_; }
  std::int64_t exponent() const;  // lcm of the level moduli

  std::int64_t index_of(const std::vector<std::int64_t>& coords) const;
  std::vector<std::int64_t> element_at(std::int64_t idx) const;
  std::int64_t add(std::int64_t a, std::int64_t b) const;
  std::int64_t negate(std::int64_t a) const;
  std::int64_t translation_index(const std::vector<Int>& v) const;  // index of sum v_j g_j

  // the translations generate all of X, i.e. the action is minimal
  bool ergodic() const;

 private:
  std::vector<std::int64_t> q_, strides_;
  std::vector<std::vector<std::int64_t>> g_;
  std::int64_t size_ = 1;
  mutable int ergodic_cache_ = -1;
};

Rat set_measure(const RotationSystem& sys, const Bitset& a);
Bitset set_from_indices(const RotationSystem& sys, const std::vector<std::int64_t>& indices);
// A = prod A_i given per-level residue lists
Bitset product_set(const RotationSystem& sys,
                   const std::vector<std::vector<std::int64_t>>& level_sets);

struct SpectralAtom {
  TorusRational point;  // alpha(chi) in (Q/Z)^d
  double mass;          // |<1_A, chi>|^2
};

class SpectralMeasureTable {
 public:
  SpectralMeasureTable(int dim, std::vector<SpectralAtom> atoms);

  int dim() const { return dim_; }
  const std::vector<SpectralAtom>& atoms() const { return atoms_; }

  double total_mass() const;
  double mass_at_zero() const;
  // nonzero atoms with every coordinate denominator dividing into lcm <= m
  double rat_mass(const Int& m) const;
  // atoms alpha with k * alpha = 0, zero atom included
  double mass_annihilated_by(const Int& k) const;
  // atoms with v . alpha integral; the zero atom is optional
  double line_orthogonal_mass(const std::vector<Int>& v, bool include_zero) const;
  std::vector<Int> denominators() const;  // distinct denominators of nonzero atoms

 private:
  int dim_;
  std::vector<SpectralAtom> atoms_;  // sorted by point
};

// sigma_A of an ergodic system: one atom per character, computed by axis DFTs
// after splitting each level into prime-power levels.
SpectralMeasureTable spectral_measure(const RotationSystem& sys, const Bitset& a);

Rat intersection_measure(const RotationSystem& sys, const Bitset& a,
                         const std::vector<Int>& v);  // mu(A meet T^v A)
// sum of mass * cos(2 pi v.alpha); equals the intersection measure above
double bochner_value(const SpectralMeasureTable& table, const std::vector<Int>& v);

// Cosets of H = <k g_1, ..., k g_d>; the T^k-ergodic components.
struct ErgodicComponents {
  Int k;
  std::vector<std::int64_t> subgroup;  // sorted indices of H
  std::vector<std::int64_t> reps;      // ascending coset representatives
  std::int64_t count() const { return static_cast<std::int64_t>(reps.size()); }
};
ErgodicComponents ergodic_components(const RotationSystem& sys, const Int& k);
// mu(A | H + rep) for each representative, aligned with comps.reps
std::vector<Rat> component_measures(const RotationSystem& sys, const ErgodicComponents& comps,
                                    const Bitset& a);

// One component as a rotation system in its own right: H presented as
// prod Z/D_t via Smith form of the relation lattice of (k g_1, ..., k g_d).
struct ComponentSubsystem {
  RotationSystem system;
  Bitset set;                       // A pulled back to component coordinates
  std::vector<std::int64_t> embed;  // component index -> ambient index
};
ComponentSubsystem component_subsystem(const RotationSystem& sys, const Bitset& a,
                                       const ErgodicComponents& comps, std::int64_t rep,
                                       const Int& k);

// union over n in Z^r of T^{P(n)} A; exact via the periodicity of P mod exponent
Bitset orbit_union_polynomial(const RotationSystem& sys, const Bitset& a,
                              const IntPolynomialMap& p);
// union over n of T^{n v} A
Bitset orbit_union_directional(const RotationSystem& sys, const Bitset& a,
                               const std::vector<Int>& v);

struct ReturnTime {
  Int m;  // multiple of k with mu(A meet T^{m v} A) > mu(A)^2 / 2
  Rat intersection;
};
ReturnTime find_return_time(const RotationSystem& sys, const Bitset& a,
                            const std::vector<Int>& v, const Int& k);

struct DirectionSearch {
  bool found = false;
  bool cap_exceeded = false;        // scan stopped at the cap before t_target
  std::vector<Int> direction;       // winning v_t = (1, t, ..., t^{d-1})
  double line_mass = 0;             // sigma(L_v^perp minus {0})
  double line_mass_with_zero = 0;
  Rat union_measure{0};
  double lower_bound = 0;           // mu^2 / line_mass_with_zero
  std::int64_t t_scanned = 0;
  std::int64_t t_target = 0;        // ceil(4(d-1)/gamma)
  Int window_bound{0};              // d! t_scanned^{d(d-1)}
  std::vector<Int> best_direction;  // smallest excluded-zero line mass seen
  double best_line_mass = 0;
  double gamma = 0;
};
// Scan the curve directions v_t until sigma(L_v^perp minus {0}) < gamma/2.
// Exhausting t_target forces sigma of the rational window to be >= gamma/4:
// each alpha outside the window lies on at most d-1 of the scanned lines.
DirectionSearch find_expansive_direction(const RotationSystem& sys, const Bitset& a,
                                         double gamma);

struct IncrementStep {
  double nu_before = 0;
  double nu_after = 0;
  double kappa = 0;                    // required rational mass
  double window_mass = 0;              // sigma(Rat(M)) actually found
  Int denominator_bound{0};            // M
  std::optional<Int> factorial_cap;    // M! when M <= 20 capped the divisor scan
  Int k_step{1};
  std::int64_t component_count = 0;
  std::optional<Rat> union_before;     // polynomial mode
  std::vector<Int> best_direction;     // directional mode: best failed direction
  double best_line_mass = 0;
};

struct IncrementTrace {
  std::string mode;  // "polynomial" | "directional"
  double eps = 0;
  double gamma = 0;  // directional mode only
  double initial_measure = 0;
  std::vector<IncrementStep> steps;
  std::string status;  // "success" | "step-cap-exceeded"
  Int k_total{1};
  double final_nu = 0;
  std::int64_t final_size = 0;
  std::optional<Rat> final_union;
  std::optional<DirectionSearch> final_direction;
};

// Grow the relative measure of A by passing to T^k-components until the
// polynomial orbit union of the current piece exceeds 1 - eps.
IncrementTrace increment_run(const RotationSystem& sys, const Bitset& a,
                             const IntPolynomialMap& p, double eps);
// Same loop, stopping when some curve direction is expansive for the piece.
IncrementTrace increment_run_directional(const RotationSystem& sys, const Bitset& a,
                                         double eps);

}  // namespace orbitspec
