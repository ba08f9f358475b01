#include "orbitspec/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <map>
#include <numeric>
#include <utility>

#include "orbitspec/intlinalg.hpp"
#include "orbitspec/ratmat.hpp"

namespace orbitspec {

namespace {

constexpr double kPi = 3.141592653589793238462643383279502884;

std::int64_t norm_mod(std::int64_t x, std::int64_t q) {
  std::int64_t r = x % q;
  return r < 0 ? r + q : r;
}

// sorted subgroup generated by the given element indices
std::vector<std::int64_t> subgroup_closure(const RotationSystem& sys,
                                           const std::vector<std::int64_t>& gens) {
  Bitset seen(sys.size());
  seen.set(0);
  std::vector<std::int64_t> stack{0}, out;
  while (!stack.empty()) {
    const std::int64_t cur = stack.back();
    stack.pop_back();
    out.push_back(cur);
    for (std::int64_t g : gens) {
      const std::int64_t nxt = sys.add(cur, g);
      if (!seen.test(nxt)) {
        seen.set(nxt);
        stack.push_back(nxt);
      }
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

// cycles of the permutation x -> x + w; all have the same length, the order of w
struct OrbitCycles {
  std::int64_t order = 0;
  std::vector<std::vector<std::int64_t>> cycles;
};

OrbitCycles orbit_cycles(const RotationSystem& sys, std::int64_t w) {
  OrbitCycles out;
  Bitset seen(sys.size());
  for (std::int64_t idx = 0; idx < sys.size(); ++idx) {
    if (seen.test(idx)) continue;
    std::vector<std::int64_t> cyc;
    std::int64_t cur = idx;
    do {
      seen.set(cur);
      cyc.push_back(cur);
      cur = sys.add(cur, w);
    } while (cur != idx);
    if (out.order == 0)
      out.order = static_cast<std::int64_t>(cyc.size());
    else
      OSPEC_CHECK(out.order == static_cast<std::int64_t>(cyc.size()),
                  "translation cycles have unequal lengths");
    out.cycles.push_back(std::move(cyc));
  }
  return out;
}

std::vector<Int> divisors_of(std::int64_t n) {
  std::vector<Int> divs{1};
  for (const auto& [p, e] : factorize(Int(n)).factors) {
    const std::size_t base = divs.size();
    Int pw = 1;
    for (int t = 0; t < e; ++t) {
      pw *= p;
      for (std::size_t i = 0; i < base; ++i) divs.push_back(divs[i] * pw);
    }
  }
  std::sort(divs.begin(), divs.end());
  return divs;
}

IntMatrix unimodular_inverse(const IntMatrix& m) {
  const std::size_t n = m.size();
  RatMatrix rm(n, std::vector<Rat>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) rm[i][j] = Rat(m[i][j]);
  const RatMatrix inv = rat_inverse(rm);
  IntMatrix out(n, std::vector<Int>(n));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      OSPEC_CHECK(inv[i][j].get_den() == 1, "unimodular inverse is not integral");
      out[i][j] = inv[i][j].get_num();
    }
  return out;
}

}  // namespace

RotationSystem::RotationSystem(std::vector<std::int64_t> moduli,
                               std::vector<std::vector<std::int64_t>> generators)
    : q_(std::move(moduli)), g_(std::move(generators)) {
  if (q_.empty()) throw UsageError("rotation system: at least one level is required");
  if (g_.empty()) throw UsageError("rotation system: at least one rotation is required");
  size_ = 1;
  for (std::int64_t q : q_) {
    if (q < 1) throw UsageError("rotation system: moduli must be positive");
    if (size_ > Limits::get().max_space / q)
      throw BoundError("rotation system: state space exceeds the space cap");
    size_ *= q;
  }
  strides_.assign(q_.size(), 1);
  for (int i = static_cast<int>(q_.size()) - 2; i >= 0; --i)
    strides_[static_cast<std::size_t>(i)] =
        strides_[static_cast<std::size_t>(i) + 1] * q_[static_cast<std::size_t>(i) + 1];
  for (auto& g : g_) {
    if (g.size() != q_.size())
      throw UsageError("rotation system: generator does not match the level count");
    for (std::size_t i = 0; i < g.size(); ++i) g[i] = norm_mod(g[i], q_[i]);
  }
}

RotationSystem RotationSystem::cyclic(std::int64_t q) { return RotationSystem({q}, {{1}}); }

RotationSystem RotationSystem::diagonal(std::vector<std::int64_t> moduli) {
  const std::vector<std::int64_t> ones(moduli.size(), 1);
  return RotationSystem(std::move(moduli), {ones});
}

RotationSystem RotationSystem::torus(std::int64_t q, int d) {
  if (d < 1) throw UsageError("rotation system: torus dimension must be positive");
  std::vector<std::vector<std::int64_t>> gens(static_cast<std::size_t>(d),
                                              std::vector<std::int64_t>(static_cast<std::size_t>(d), 0));
  for (int j = 0; j < d; ++j) gens[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)] = 1;
  return RotationSystem(std::vector<std::int64_t>(static_cast<std::size_t>(d), q), std::move(gens));
}

std::int64_t RotationSystem::exponent() const {
  std::int64_t l = 1;
  for (std::int64_t q : q_) l = std::lcm(l, q);
  return l;
}

std::int64_t RotationSystem::index_of(const std::vector<std::int64_t>& coords) const {
  if (coords.size() != q_.size()) throw UsageError("rotation system: coordinate count mismatch");
  std::int64_t idx = 0;
  for (std::size_t i = 0; i < q_.size(); ++i) idx += norm_mod(coords[i], q_[i]) * strides_[i];
  return idx;
}

std::vector<std::int64_t> RotationSystem::element_at(std::int64_t idx) const {
  std::vector<std::int64_t> coords(q_.size());
  for (std::size_t i = 0; i < q_.size(); ++i) coords[i] = (idx / strides_[i]) % q_[i];
  return coords;
}

std::int64_t RotationSystem::add(std::int64_t a, std::int64_t b) const {
  std::int64_t out = 0;
  for (std::size_t i = 0; i < q_.size(); ++i) {
    std::int64_t s = (a / strides_[i]) % q_[i] + (b / strides_[i]) % q_[i];
    if (s >= q_[i]) s -= q_[i];
    out += s * strides_[i];
  }
  return out;
}

std::int64_t RotationSystem::negate(std::int64_t a) const {
  std::int64_t out = 0;
  for (std::size_t i = 0; i < q_.size(); ++i) {
    const std::int64_t ai = (a / strides_[i]) % q_[i];
    out += (ai == 0 ? 0 : q_[i] - ai) * strides_[i];
  }
  return out;
}

std::int64_t RotationSystem::translation_index(const std::vector<Int>& v) const {
  if (static_cast<int>(v.size()) != dim())
    throw UsageError("rotation system: translation exponent count mismatch");
  std::int64_t idx = 0;
  for (std::size_t i = 0; i < q_.size(); ++i) {
    std::int64_t t = 0;
    for (std::size_t j = 0; j < g_.size(); ++j)
      t = (t + mod_reduce(v[j], q_[i]) * g_[j][i]) % q_[i];
    idx += t * strides_[i];
  }
  return idx;
}

bool RotationSystem::ergodic() const {
  if (ergodic_cache_ < 0) {
    std::vector<std::int64_t> gens;
    for (const auto& g : g_) {
      std::int64_t idx = 0;
      for (std::size_t i = 0; i < q_.size(); ++i) idx += g[i] * strides_[i];
      gens.push_back(idx);
    }
    ergodic_cache_ =
        static_cast<std::int64_t>(subgroup_closure(*this, gens).size()) == size_ ? 1 : 0;
  }
  return ergodic_cache_ == 1;
}

Rat set_measure(const RotationSystem& sys, const Bitset& a) {
  OSPEC_CHECK(a.size() == sys.size(), "set lives on a different system");
  return make_rat(a.count(), sys.size());
}

Bitset set_from_indices(const RotationSystem& sys, const std::vector<std::int64_t>& indices) {
  Bitset a(sys.size());
  for (std::int64_t idx : indices) {
    if (idx < 0 || idx >= sys.size()) throw UsageError("set: element index out of range");
    a.set(idx);
  }
  return a;
}

Bitset product_set(const RotationSystem& sys,
                   const std::vector<std::vector<std::int64_t>>& level_sets) {
  if (static_cast<int>(level_sets.size()) != sys.levels())
    throw UsageError("product set: level count mismatch");
  std::int64_t expect = 1;
  for (const auto& s : level_sets) {
    if (s.empty()) return Bitset(sys.size());
    expect *= static_cast<std::int64_t>(s.size());
  }
  Bitset a(sys.size());
  const int lv = sys.levels();
  std::vector<std::size_t> pick(static_cast<std::size_t>(lv), 0);
  std::vector<std::int64_t> coords(static_cast<std::size_t>(lv));
  while (true) {
    for (int i = 0; i < lv; ++i)
      coords[static_cast<std::size_t>(i)] =
          level_sets[static_cast<std::size_t>(i)][pick[static_cast<std::size_t>(i)]];
    a.set(sys.index_of(coords));
    int i = lv - 1;
    while (i >= 0 &&
           ++pick[static_cast<std::size_t>(i)] == level_sets[static_cast<std::size_t>(i)].size()) {
      pick[static_cast<std::size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
  }
  OSPEC_CHECK(a.count() == expect, "product set count differs from the factor product");
  return a;
}

SpectralMeasureTable::SpectralMeasureTable(int dim, std::vector<SpectralAtom> atoms)
    : dim_(dim), atoms_(std::move(atoms)) {
  std::sort(atoms_.begin(), atoms_.end(),
            [](const SpectralAtom& x, const SpectralAtom& y) { return x.point < y.point; });
}

double SpectralMeasureTable::total_mass() const {
  double s = 0;
  for (const auto& a : atoms_) s += a.mass;
  return s;
}

double SpectralMeasureTable::mass_at_zero() const {
  double s = 0;
  for (const auto& a : atoms_)
    if (a.point.is_zero()) s += a.mass;
  return s;
}

double SpectralMeasureTable::rat_mass(const Int& m) const {
  double s = 0;
  for (const auto& a : atoms_)
    if (!a.point.is_zero() && a.point.denom() <= m) s += a.mass;
  return s;
}

double SpectralMeasureTable::mass_annihilated_by(const Int& k) const {
  double s = 0;
  for (const auto& a : atoms_) {
    const Int den = a.point.denom();
    if (mpz_divisible_p(k.get_mpz_t(), den.get_mpz_t())) s += a.mass;
  }
  return s;
}

double SpectralMeasureTable::line_orthogonal_mass(const std::vector<Int>& v,
                                                  bool include_zero) const {
  if (static_cast<int>(v.size()) != dim_) throw UsageError("line mass: dimension mismatch");
  double s = 0;
  for (const auto& a : atoms_) {
    if (a.point.is_zero()) {
      if (include_zero) s += a.mass;
      continue;
    }
    Rat dot(0);
    for (int j = 0; j < dim_; ++j) dot += Rat(v[static_cast<std::size_t>(j)]) *
                                          a.point.coords()[static_cast<std::size_t>(j)];
    if (frac_part(dot) == 0) s += a.mass;
  }
  return s;
}

std::vector<Int> SpectralMeasureTable::denominators() const {
  std::vector<Int> out;
  for (const auto& a : atoms_)
    if (!a.point.is_zero()) out.push_back(a.point.denom());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

SpectralMeasureTable spectral_measure(const RotationSystem& sys, const Bitset& a) {
  if (!sys.ergodic()) throw UsageError("spectral measure: the rotation action is not ergodic");
  const std::int64_t n = sys.size();
  OSPEC_CHECK(a.size() == n, "set lives on a different system");
  if (n > 1000000) throw BoundError("spectral measure: state space exceeds the atom-table cap");

  // split levels into prime powers so each axis DFT stays short
  std::vector<std::int64_t> sq;
  std::vector<int> parent;
  for (int i = 0; i < sys.levels(); ++i) {
    const Factorization f = factorize(Int(sys.moduli()[static_cast<std::size_t>(i)]));
    if (f.factors.empty()) {
      sq.push_back(1);
      parent.push_back(i);
      continue;
    }
    for (const auto& [p, e] : f.factors) {
      Int pe;
      mpz_pow_ui(pe.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(e));
      sq.push_back(to_i64(pe));
      parent.push_back(i);
    }
  }
  const int sl = static_cast<int>(sq.size());
  std::vector<std::int64_t> sstrides(static_cast<std::size_t>(sl), 1);
  for (int i = sl - 2; i >= 0; --i)
    sstrides[static_cast<std::size_t>(i)] =
        sstrides[static_cast<std::size_t>(i) + 1] * sq[static_cast<std::size_t>(i) + 1];
  std::int64_t axis_sum = 0;
  for (std::int64_t q : sq) axis_sum += q;
  if (axis_sum > (std::int64_t(1) << 31) / n)
    throw BoundError("spectral measure: DFT cost exceeds the work cap");

  std::vector<std::complex<double>> f(static_cast<std::size_t>(n), 0.0);
  for (std::int64_t idx = 0; idx < n; ++idx) {
    if (!a.test(idx)) continue;
    const auto coords = sys.element_at(idx);
    std::int64_t s = 0;
    for (int i = 0; i < sl; ++i)
      s += (coords[static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])] %
            sq[static_cast<std::size_t>(i)]) *
           sstrides[static_cast<std::size_t>(i)];
    f[static_cast<std::size_t>(s)] = 1.0;
  }

  std::vector<std::complex<double>> roots, buf;
  for (int axis = 0; axis < sl; ++axis) {
    const std::int64_t q = sq[static_cast<std::size_t>(axis)];
    if (q == 1) continue;
    const std::int64_t stride = sstrides[static_cast<std::size_t>(axis)];
    const std::int64_t block = stride * q;
    roots.assign(static_cast<std::size_t>(q), 0.0);
    for (std::int64_t t = 0; t < q; ++t)
      roots[static_cast<std::size_t>(t)] =
          std::polar(1.0, -2.0 * kPi * static_cast<double>(t) / static_cast<double>(q));
    buf.assign(static_cast<std::size_t>(q), 0.0);
    for (std::int64_t base = 0; base < n; base += block)
      for (std::int64_t off = 0; off < stride; ++off) {
        for (std::int64_t c = 0; c < q; ++c) {
          std::complex<double> acc = 0.0;
          for (std::int64_t x = 0; x < q; ++x)
            acc += f[static_cast<std::size_t>(base + off + x * stride)] *
                   roots[static_cast<std::size_t>((c * x) % q)];
          buf[static_cast<std::size_t>(c)] = acc;
        }
        for (std::int64_t c = 0; c < q; ++c)
          f[static_cast<std::size_t>(base + off + c * stride)] = buf[static_cast<std::size_t>(c)];
      }
  }

  // alpha(chi_c)_j = sum_i c_i g_{j,i} / sq_i over the common denominator lcm
  const std::int64_t big = sys.exponent();
  const int d = sys.dim();
  std::vector<std::vector<std::int64_t>> w(static_cast<std::size_t>(d),
                                           std::vector<std::int64_t>(static_cast<std::size_t>(sl)));
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < sl; ++i)
      w[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)] =
          mod_mul(sys.generators()[static_cast<std::size_t>(j)]
                                  [static_cast<std::size_t>(parent[static_cast<std::size_t>(i)])] %
                      sq[static_cast<std::size_t>(i)],
                  big / sq[static_cast<std::size_t>(i)], big);

  const double nd = static_cast<double>(n);
  std::map<TorusRational, double> table;
  std::vector<std::int64_t> c(static_cast<std::size_t>(sl), 0);
  for (std::int64_t idx = 0; idx < n; ++idx) {
    std::vector<std::pair<Int, Int>> coords;
    coords.reserve(static_cast<std::size_t>(d));
    for (int j = 0; j < d; ++j) {
      std::int64_t num = 0;
      for (int i = 0; i < sl; ++i)
        num = (num + mod_mul(c[static_cast<std::size_t>(i)],
                             w[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)], big)) %
              big;
      coords.emplace_back(num, big);
    }
    table[reduce_torus_point(coords)] += std::norm(f[static_cast<std::size_t>(idx)]) / (nd * nd);
    for (int i = sl - 1; i >= 0; --i) {
      if (++c[static_cast<std::size_t>(i)] < sq[static_cast<std::size_t>(i)]) break;
      c[static_cast<std::size_t>(i)] = 0;
    }
  }
  OSPEC_CHECK(static_cast<std::int64_t>(table.size()) == n,
              "character frequencies collide on an ergodic system");

  std::vector<SpectralAtom> atoms;
  atoms.reserve(table.size());
  double total = 0;
  double zero_mass = 0;
  for (auto& [pt, mass] : table) {
    total += mass;
    if (pt.is_zero()) zero_mass += mass;
    atoms.push_back(SpectralAtom{pt, mass});
  }
  const double mu = static_cast<double>(a.count()) / nd;
  OSPEC_CHECK(std::abs(total - mu) < 1e-8, "total spectral mass differs from the set measure");
  OSPEC_CHECK(std::abs(zero_mass - mu * mu) < 1e-8,
              "zero atom differs from the squared set measure");
  return SpectralMeasureTable(d, std::move(atoms));
}

Rat intersection_measure(const RotationSystem& sys, const Bitset& a,
                         const std::vector<Int>& v) {
  OSPEC_CHECK(a.size() == sys.size(), "set lives on a different system");
  const std::int64_t back = sys.negate(sys.translation_index(v));
  std::int64_t cnt = 0;
  for (std::int64_t x = 0; x < sys.size(); ++x)
    if (a.test(x) && a.test(sys.add(x, back))) ++cnt;
  return make_rat(cnt, sys.size());
}

double bochner_value(const SpectralMeasureTable& table, const std::vector<Int>& v) {
  if (static_cast<int>(v.size()) != table.dim()) throw UsageError("bochner: dimension mismatch");
  double acc = 0;
  for (const auto& atom : table.atoms()) {
    Rat dot(0);
    for (int j = 0; j < table.dim(); ++j)
      dot += Rat(v[static_cast<std::size_t>(j)]) * atom.point.coords()[static_cast<std::size_t>(j)];
    acc += atom.mass * std::cos(2.0 * kPi * frac_part(dot).get_d());
  }
  return acc;
}

ErgodicComponents ergodic_components(const RotationSystem& sys, const Int& k) {
  if (k < 1) throw UsageError("components: k must be positive");
  const int d = sys.dim();
  std::vector<std::int64_t> gens;
  for (int j = 0; j < d; ++j) {
    std::vector<Int> v(static_cast<std::size_t>(d), Int(0));
    v[static_cast<std::size_t>(j)] = k;
    gens.push_back(sys.translation_index(v));
  }
  ErgodicComponents out{k, subgroup_closure(sys, gens), {}};
  Bitset assigned(sys.size());
  for (std::int64_t idx = 0; idx < sys.size(); ++idx) {
    if (assigned.test(idx)) continue;
    out.reps.push_back(idx);
    for (std::int64_t h : out.subgroup) assigned.set(sys.add(idx, h));
  }
  OSPEC_CHECK(out.count() * static_cast<std::int64_t>(out.subgroup.size()) == sys.size(),
              "cosets fail to tile the system");
  Int bound = 1;
  for (std::int64_t q : sys.moduli()) {
    Int g, qi(q);
    mpz_gcd(g.get_mpz_t(), k.get_mpz_t(), qi.get_mpz_t());
    bound *= g;
  }
  OSPEC_CHECK(Int(out.count()) <= bound, "component count exceeds the gcd bound");
  return out;
}

std::vector<Rat> component_measures(const RotationSystem& sys, const ErgodicComponents& comps,
                                    const Bitset& a) {
  OSPEC_CHECK(a.size() == sys.size(), "set lives on a different system");
  std::vector<Rat> out;
  out.reserve(comps.reps.size());
  const auto h = static_cast<std::int64_t>(comps.subgroup.size());
  for (std::int64_t rep : comps.reps) {
    std::int64_t cnt = 0;
    for (std::int64_t e : comps.subgroup)
      if (a.test(sys.add(rep, e))) ++cnt;
    out.push_back(make_rat(cnt, h));
  }
  return out;
}

ComponentSubsystem component_subsystem(const RotationSystem& sys, const Bitset& a,
                                       const ErgodicComponents& comps, std::int64_t rep,
                                       const Int& k) {
  const int d = sys.dim();
  const int lv = sys.levels();

  // relation lattice of phi(a) = sum a_j (k g_j): the kernel of [W | diag(q)]
  IntMatrix b(static_cast<std::size_t>(lv), std::vector<Int>(static_cast<std::size_t>(d + lv), 0));
  for (int i = 0; i < lv; ++i) {
    const Int qi(sys.moduli()[static_cast<std::size_t>(i)]);
    for (int j = 0; j < d; ++j)
      b[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = mod_floor(
          k * sys.generators()[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)], qi);
    b[static_cast<std::size_t>(i)][static_cast<std::size_t>(d + i)] = qi;
  }
  const SmithDecomposition s1 = smith_normal_form(b);
  int rank = 0;
  for (int t = 0; t < lv; ++t)
    if (s1.d[static_cast<std::size_t>(t)][static_cast<std::size_t>(t)] != 0) ++rank;
  OSPEC_CHECK(rank == lv, "relation lattice lost full rank");
  const IntMatrix rinv = unimodular_inverse(s1.r);

  // kernel basis = columns lv..lv+d-1 of rinv; project onto the first d rows
  IntMatrix mk(static_cast<std::size_t>(d), std::vector<Int>(static_cast<std::size_t>(d)));
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j)
      mk[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
          rinv[static_cast<std::size_t>(i)][static_cast<std::size_t>(lv + j)];
  for (int j = 0; j < d; ++j)
    for (int i = 0; i < lv; ++i) {
      Int acc = 0;
      for (int t = 0; t < d + lv; ++t)
        acc += b[static_cast<std::size_t>(i)][static_cast<std::size_t>(t)] *
               rinv[static_cast<std::size_t>(t)][static_cast<std::size_t>(lv + j)];
      OSPEC_CHECK(acc == 0, "kernel basis fails the relation equations");
    }

  const SmithDecomposition s2 = smith_normal_form(mk);
  const IntMatrix u2inv = unimodular_inverse(s2.l);
  std::vector<Int> diag(static_cast<std::size_t>(d));
  std::vector<int> kept;
  for (int t = 0; t < d; ++t) {
    diag[static_cast<std::size_t>(t)] = s2.d[static_cast<std::size_t>(t)][static_cast<std::size_t>(t)];
    OSPEC_CHECK(diag[static_cast<std::size_t>(t)] >= 1, "component lattice is degenerate");
    if (diag[static_cast<std::size_t>(t)] > 1) kept.push_back(t);
  }
  std::vector<std::int64_t> nq;
  for (int t : kept) nq.push_back(to_i64(diag[static_cast<std::size_t>(t)]));
  if (nq.empty()) nq.push_back(1);
  std::vector<std::vector<std::int64_t>> ng(static_cast<std::size_t>(d),
                                            std::vector<std::int64_t>(nq.size(), 0));
  for (int j = 0; j < d; ++j)
    for (std::size_t t = 0; t < kept.size(); ++t)
      ng[static_cast<std::size_t>(j)][t] =
          to_i64(mod_floor(u2inv[static_cast<std::size_t>(kept[t])][static_cast<std::size_t>(j)],
                           diag[static_cast<std::size_t>(kept[t])]));
  RotationSystem sub(nq, ng);
  OSPEC_CHECK(sub.size() == static_cast<std::int64_t>(comps.subgroup.size()),
              "component chart size differs from the subgroup order");

  Bitset coset(sys.size());
  for (std::int64_t h : comps.subgroup) coset.set(sys.add(rep, h));
  const auto repc = sys.element_at(rep);
  Bitset seen(sys.size());
  Bitset aset(sub.size());
  std::vector<std::int64_t> embed(static_cast<std::size_t>(sub.size()));
  for (std::int64_t yidx = 0; yidx < sub.size(); ++yidx) {
    const auto yc = sub.element_at(yidx);
    // lift through U2, then apply phi levelwise and offset by the representative
    std::vector<Int> av(static_cast<std::size_t>(d), Int(0));
    for (int i = 0; i < d; ++i)
      for (std::size_t t = 0; t < kept.size(); ++t)
        av[static_cast<std::size_t>(i)] +=
            s2.l[static_cast<std::size_t>(i)][static_cast<std::size_t>(kept[t])] * yc[t];
    std::vector<std::int64_t> lev(static_cast<std::size_t>(lv));
    for (int i = 0; i < lv; ++i) {
      Int acc = repc[static_cast<std::size_t>(i)];
      for (int j = 0; j < d; ++j)
        acc += av[static_cast<std::size_t>(j)] *
               b[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      lev[static_cast<std::size_t>(i)] =
          to_i64(mod_floor(acc, Int(sys.moduli()[static_cast<std::size_t>(i)])));
    }
    const std::int64_t amb = sys.index_of(lev);
    OSPEC_CHECK(coset.test(amb) && !seen.test(amb), "component chart fails to cover its coset");
    seen.set(amb);
    embed[static_cast<std::size_t>(yidx)] = amb;
    if (a.test(amb)) aset.set(yidx);
  }
  return ComponentSubsystem{std::move(sub), std::move(aset), std::move(embed)};
}

Bitset orbit_union_polynomial(const RotationSystem& sys, const Bitset& a,
                              const IntPolynomialMap& p) {
  OSPEC_CHECK(a.size() == sys.size(), "set lives on a different system");
  if (p.dim() != sys.dim()) throw UsageError("orbit union: polynomial dimension mismatch");
  const int r = p.arity();
  const std::int64_t bigl = sys.exponent();
  Int grid;
  mpz_ui_pow_ui(grid.get_mpz_t(), static_cast<unsigned long>(bigl),
                static_cast<unsigned long>(r));
  if (grid > Limits::get().max_enum)
    throw BoundError("orbit union: parameter grid exceeds the enumeration cap");

  std::vector<std::int64_t> nvec(static_cast<std::size_t>(r), 0);
  if (sys.dim() == 1) {
    // every shift is a power of the single translation: rotate along its cycles
    const std::int64_t w = sys.translation_index({Int(1)});
    const OrbitCycles cyc = orbit_cycles(sys, w);
    const std::int64_t ord = cyc.order;
    std::vector<char> shift(static_cast<std::size_t>(ord), 0);
    while (true) {
      shift[static_cast<std::size_t>(p.evaluate_mod(nvec, bigl)[0] % ord)] = 1;
      int i = r - 1;
      while (i >= 0 && ++nvec[static_cast<std::size_t>(i)] == bigl) {
        nvec[static_cast<std::size_t>(i)] = 0;
        --i;
      }
      if (i < 0) break;
    }
    Bitset u(sys.size());
    for (const auto& cycle : cyc.cycles) {
      Bitset bits(ord);
      bool hit = false;
      for (std::int64_t pos = 0; pos < ord; ++pos)
        if (a.test(cycle[static_cast<std::size_t>(pos)])) {
          bits.set(pos);
          hit = true;
        }
      if (!hit) continue;
      Bitset acc(ord);
      for (std::int64_t s = 0; s < ord; ++s)
        if (shift[static_cast<std::size_t>(s)]) or_rotated(acc, bits, s);
      for (std::int64_t pos = 0; pos < ord; ++pos)
        if (acc.test(pos)) u.set(cycle[static_cast<std::size_t>(pos)]);
    }
    return u;
  }

  Bitset tseen(sys.size());
  std::vector<std::int64_t> tlist;
  while (true) {
    const auto val = p.evaluate_mod(nvec, bigl);
    const std::vector<Int> v(val.begin(), val.end());
    const std::int64_t t = sys.translation_index(v);
    if (!tseen.test(t)) {
      tseen.set(t);
      tlist.push_back(t);
    }
    int i = r - 1;
    while (i >= 0 && ++nvec[static_cast<std::size_t>(i)] == bigl) {
      nvec[static_cast<std::size_t>(i)] = 0;
      --i;
    }
    if (i < 0) break;
  }
  if (Int(static_cast<std::int64_t>(tlist.size())) * sys.size() > Limits::get().tuple_cap)
    throw BoundError("orbit union: translate sweep exceeds the work cap");
  Bitset u(sys.size());
  for (std::int64_t t : tlist)
    for (std::int64_t x = 0; x < sys.size(); ++x)
      if (a.test(x)) u.set(sys.add(x, t));
  return u;
}

Bitset orbit_union_directional(const RotationSystem& sys, const Bitset& a,
                               const std::vector<Int>& v) {
  OSPEC_CHECK(a.size() == sys.size(), "set lives on a different system");
  Int g(0);
  for (const Int& c : v) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  if (g != 1) throw UsageError("orbit union: direction must be primitive");
  const std::int64_t w = sys.translation_index(v);
  Bitset u(sys.size());
  for (const auto& cycle : orbit_cycles(sys, w).cycles) {
    bool hit = false;
    for (std::int64_t x : cycle)
      if (a.test(x)) {
        hit = true;
        break;
      }
    if (hit)
      for (std::int64_t x : cycle) u.set(x);
  }
  return u;
}

ReturnTime find_return_time(const RotationSystem& sys, const Bitset& a,
                            const std::vector<Int>& v, const Int& k) {
  if (k < 1) throw UsageError("return time: k must be positive");
  const std::int64_t cnt = a.count();
  if (cnt == 0) throw UsageError("return time: the set is empty");
  const Rat nu = set_measure(sys, a);
  const std::int64_t scan = (2 * sys.size() + cnt - 1) / cnt;  // ceil(2 / nu)
  for (std::int64_t j = 1; j <= scan; ++j) {
    const Int m = Int(j) * k;
    std::vector<Int> mv(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) mv[i] = m * v[i];
    const Rat hit = intersection_measure(sys, a, mv);
    if (hit * 2 > nu * nu) return ReturnTime{m, hit};
  }
  throw InternalError("invariant: no heavy return time within the averaging window");
}

DirectionSearch find_expansive_direction(const RotationSystem& sys, const Bitset& a,
                                         double gamma) {
  const int d = sys.dim();
  if (d < 2) throw UsageError("direction search: at least two rotations are required");
  if (!(gamma > 0.0) || gamma >= 1.0)
    throw UsageError("direction search: gamma must lie in (0, 1)");
  const SpectralMeasureTable sigma = spectral_measure(sys, a);
  const double mu = static_cast<double>(a.count()) / static_cast<double>(sys.size());

  DirectionSearch out;
  out.gamma = gamma;
  out.t_target =
      std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(4.0 * (d - 1) / gamma)));
  const std::int64_t cap = Limits::get().direction_cap;
  out.cap_exceeded = out.t_target > cap;
  const std::int64_t scan_to = std::min(out.t_target, cap);
  out.best_line_mass = 2.0;

  for (std::int64_t t = 1; t <= scan_to; ++t) {
    std::vector<Int> v(static_cast<std::size_t>(d));
    Int pw = 1;
    for (int j = 0; j < d; ++j) {
      v[static_cast<std::size_t>(j)] = pw;
      pw *= t;
    }
    out.t_scanned = t;
    const double excl = sigma.line_orthogonal_mass(v, false);
    if (excl < out.best_line_mass) {
      out.best_line_mass = excl;
      out.best_direction = v;
    }
    if (excl < gamma / 2.0) {
      out.found = true;
      out.direction = v;
      out.line_mass = excl;
      out.line_mass_with_zero = sigma.line_orthogonal_mass(v, true);
      const Bitset u = orbit_union_directional(sys, a, v);
      out.union_measure = set_measure(sys, u);
      out.lower_bound = out.line_mass_with_zero > 0 ? mu * mu / out.line_mass_with_zero : 0.0;
      OSPEC_CHECK(out.union_measure.get_d() >= out.lower_bound - 1e-9,
                  "directional union fell below the spectral lower bound");
      break;
    }
  }
  Int tp;
  mpz_ui_pow_ui(tp.get_mpz_t(), static_cast<unsigned long>(std::max<std::int64_t>(out.t_scanned, 1)),
                static_cast<unsigned long>(d) * static_cast<unsigned long>(d - 1));
  out.window_bound = factorial(d) * tp;
  return out;
}

namespace {

struct StepChoice {
  Int denominator_bound;
  std::optional<Int> factorial_cap;
  double window_mass = 0;
  Int k{1};
  ErgodicComponents comps;
  std::int64_t best_rep = 0;
  double nu_best = 0;
};

StepChoice choose_step(const RotationSystem& sys, const Bitset& a,
                       const SpectralMeasureTable& sigma, double nu, double kappa) {
  Int m(-1);
  double window = 0;
  for (const Int& cand : sigma.denominators()) {
    const double mass = sigma.rat_mass(cand);
    if (mass >= kappa - 1e-12) {
      m = cand;
      window = mass;
      break;
    }
  }
  if (m < 0)
    throw InternalError("invariant: no denominator window reaches the required mass");
  std::optional<Int> cap;
  if (m <= 20) cap = factorial(to_i64(m));

  const double target = std::sqrt(nu * nu + window) - 1e-9;
  for (const Int& k : divisors_of(sys.exponent())) {
    if (cap && k > *cap) break;  // divisors ascend
    ErgodicComponents comps = ergodic_components(sys, k);
    if (comps.count() < 2) continue;
    const std::vector<Rat> nus = component_measures(sys, comps, a);
    Rat best(-1);
    std::int64_t best_rep = 0;
    for (std::size_t i = 0; i < nus.size(); ++i)
      if (nus[i] > best) {
        best = nus[i];
        best_rep = comps.reps[i];
      }
    if (best.get_d() >= target)
      return StepChoice{m, cap, window, k, std::move(comps), best_rep, best.get_d()};
  }
  throw InternalError("invariant: no admissible step parameter realizes the increment");
}

IncrementTrace run_increment(RotationSystem sys, Bitset a, double eps, bool directional,
                             const IntPolynomialMap* poly) {
  if (!(eps > 0.0) || eps >= 1.0) throw UsageError("increment: eps must lie in (0, 1)");
  if (!a.any()) throw UsageError("increment: the set is empty");
  if (!sys.ergodic()) throw UsageError("increment: the rotation action is not ergodic");

  IncrementTrace trace;
  trace.mode = directional ? "directional" : "polynomial";
  trace.eps = eps;
  trace.initial_measure = static_cast<double>(a.count()) / static_cast<double>(sys.size());

  std::optional<IntPolynomialMap> curp;
  if (directional) {
    if (sys.dim() < 2)
      throw UsageError("increment: directional mode needs at least two rotations");
    const double delta = trace.initial_measure;
    trace.gamma = delta * delta * eps / (2.0 * (1.0 - eps));
  } else {
    if (poly->dim() != sys.dim())
      throw UsageError("increment: polynomial dimension must match the rotation count");
    if (!poly->zero_constant_term())
      throw UsageError("increment: polynomial must vanish at 0");
    curp = *poly;
  }
  const Rat eps_rat(eps);
  const Rat union_target = Rat(1) - eps_rat;

  const int step_cap = Limits::get().step_cap;
  for (int step = 0; step < step_cap; ++step) {
    const double nu = static_cast<double>(a.count()) / static_cast<double>(sys.size());
    std::optional<Rat> union_now;
    std::optional<DirectionSearch> scan;
    if (directional) {
      scan = find_expansive_direction(sys, a, trace.gamma);
      if (scan->found) {
        trace.status = "success";
        trace.final_direction = std::move(*scan);
        break;
      }
      if (scan->cap_exceeded)
        throw BoundError("increment: direction scan cap cuts the pigeonhole window");
    } else {
      union_now = set_measure(sys, orbit_union_polynomial(sys, a, *curp));
      if (*union_now > union_target) {
        trace.status = "success";
        trace.final_union = std::move(*union_now);
        break;
      }
    }

    const SpectralMeasureTable sigma = spectral_measure(sys, a);
    const double kappa = directional ? trace.gamma / 4.0 : nu * nu * eps * eps / 4.0;
    StepChoice choice = choose_step(sys, a, sigma, nu, kappa);
    OSPEC_CHECK(choice.nu_best - nu >= kappa / 3.0 - 1e-9,
                "increment fell below a third of the window mass");

    IncrementStep rec;
    rec.nu_before = nu;
    rec.nu_after = choice.nu_best;
    rec.kappa = kappa;
    rec.window_mass = choice.window_mass;
    rec.denominator_bound = choice.denominator_bound;
    rec.factorial_cap = choice.factorial_cap;
    rec.k_step = choice.k;
    rec.component_count = choice.comps.count();
    if (directional) {
      rec.best_direction = scan->best_direction;
      rec.best_line_mass = scan->best_line_mass;
    } else {
      rec.union_before = *union_now;
    }
    trace.steps.push_back(std::move(rec));

    ComponentSubsystem sub = component_subsystem(sys, a, choice.comps, choice.best_rep, choice.k);
    sys = std::move(sub.system);
    a = std::move(sub.set);
    if (!directional) curp = rescale_orbit(*curp, choice.k);
    trace.k_total *= choice.k;
  }
  if (trace.status.empty()) trace.status = "step-cap-exceeded";
  trace.final_nu = static_cast<double>(a.count()) / static_cast<double>(sys.size());
  trace.final_size = sys.size();
  return trace;
}

}  // namespace

IncrementTrace increment_run(const RotationSystem& sys, const Bitset& a,
                             const IntPolynomialMap& p, double eps) {
  return run_increment(sys, a, eps, false, &p);
}

IncrementTrace increment_run_directional(const RotationSystem& sys, const Bitset& a,
                                         double eps) {
  return run_increment(sys, a, eps, true, nullptr);
}

}  // namespace orbitspec
