#include "orbitspec/combinatorics.hpp"

#include <algorithm>
#include <set>
#include <utility>

#include "orbitspec/bitset.hpp"
#include "orbitspec/intlinalg.hpp"
#include "orbitspec/modular.hpp"

namespace orbitspec {

namespace {

// distance of x to the nearest integer, compared exactly against eps
bool near_integer(const Rat& x, const Rat& eps) {
  const Rat f = frac_part(x);
  return f < eps || Rat(1) - f < eps;
}

std::vector<Int> sub(const std::vector<Int>& a, const std::vector<Int>& b) {
  std::vector<Int> out(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
  return out;
}

}  // namespace

Rat WindowedSet::density() const {
  Int vol = 1;
  for (const auto& [lo, hi] : window) vol *= hi - lo;
  return make_rat(Int(static_cast<std::int64_t>(members.size())), vol);
}

bool WindowedSet::contains(const std::vector<Int>& x) const {
  return std::binary_search(members.begin(), members.end(), x);
}

WindowedSet make_windowed_set(std::vector<std::pair<Int, Int>> window,
                              std::vector<std::vector<Int>> members) {
  if (window.empty()) throw UsageError("windowed set: window must have a dimension");
  for (const auto& [lo, hi] : window)
    if (lo >= hi) throw UsageError("windowed set: empty window side");
  const int dim = static_cast<int>(window.size());
  for (const auto& x : members) {
    if (static_cast<int>(x.size()) != dim)
      throw UsageError("windowed set: member dimension mismatch");
    for (int i = 0; i < dim; ++i)
      if (x[static_cast<std::size_t>(i)] < window[static_cast<std::size_t>(i)].first ||
          x[static_cast<std::size_t>(i)] >= window[static_cast<std::size_t>(i)].second)
        throw UsageError("windowed set: member outside the window");
  }
  std::sort(members.begin(), members.end());
  members.erase(std::unique(members.begin(), members.end()), members.end());
  return WindowedSet{dim, std::move(window), std::move(members)};
}

WindowedSet difference_set(const WindowedSet& e) {
  if (Int(static_cast<std::int64_t>(e.members.size())) *
          static_cast<std::int64_t>(e.members.size()) >
      Limits::get().max_enum)
    throw BoundError("difference set: pair count exceeds the enumeration cap");
  std::set<std::vector<Int>> diffs;
  for (const auto& x : e.members)
    for (const auto& y : e.members) diffs.insert(sub(x, y));
  std::vector<std::pair<Int, Int>> window;
  for (const auto& [lo, hi] : e.window) window.emplace_back(lo - hi + 1, hi - lo);
  return make_windowed_set(std::move(window),
                           std::vector<std::vector<Int>>(diffs.begin(), diffs.end()));
}

namespace {

// z in D + P(D), checked against the complete difference set
bool sum_covers(const WindowedSet& d, const IntPolynomialMap& p, const std::vector<Int>& z) {
  for (const auto& y : d.members)
    if (d.contains(sub(z, p.evaluate(y)))) return true;
  return false;
}

}  // namespace

BogolyubovResult bogolyubov_min_k(const WindowedSet& e, const IntPolynomialMap& p,
                                  const Int& k_max, const Int& radius) {
  if (p.arity() != e.dim || p.dim() != e.dim)
    throw UsageError("bogolyubov: polynomial must act on the ambient dimension");
  if (k_max < 1) throw UsageError("bogolyubov: k_max must be positive");
  if (radius < 0) throw UsageError("bogolyubov: radius must be nonnegative");
  const WindowedSet d = difference_set(e);

  const std::int64_t r = to_i64(radius);
  const std::int64_t side = 2 * r + 1;
  Int box = 1;
  for (int i = 0; i < e.dim; ++i) box *= side;
  if (box * static_cast<std::int64_t>(d.members.size()) * k_max > Limits::get().tuple_cap)
    throw BoundError("bogolyubov: scan exceeds the work cap");

  BogolyubovResult out;
  for (Int k = 1; k <= k_max; ++k) {
    BogolyubovTrail trail{k, true, {}};
    std::vector<std::int64_t> mv(static_cast<std::size_t>(e.dim), -r);
    while (true) {
      std::vector<Int> z(static_cast<std::size_t>(e.dim));
      for (int i = 0; i < e.dim; ++i) z[static_cast<std::size_t>(i)] = k * mv[static_cast<std::size_t>(i)];
      if (!sum_covers(d, p, z)) {
        trail.covered = false;
        trail.uncovered_point = z;
        break;
      }
      int i = e.dim - 1;
      while (i >= 0 && ++mv[static_cast<std::size_t>(i)] > r) {
        mv[static_cast<std::size_t>(i)] = -r;
        --i;
      }
      if (i < 0) break;
    }
    const bool covered = trail.covered;
    out.trail.push_back(std::move(trail));
    if (covered) {
      out.k = k;
      break;
    }
  }
  return out;
}

std::vector<Int> volspec(const WindowedSet& e) {
  const int d = e.dim;
  const auto n = static_cast<std::int64_t>(e.members.size());
  std::set<Int> vols;
  if (n >= 1) vols.insert(0);  // repeated points span a degenerate simplex
  if (n >= d + 1) {
    Int tuples;
    mpz_bin_uiui(tuples.get_mpz_t(), static_cast<unsigned long>(n),
                 static_cast<unsigned long>(d + 1));
    if (tuples > Limits::get().tuple_cap)
      throw BoundError("volume spectrum: tuple count exceeds the work cap");
    std::vector<std::int64_t> pick(static_cast<std::size_t>(d) + 1);
    for (std::size_t i = 0; i < pick.size(); ++i) pick[i] = static_cast<std::int64_t>(i);
    while (true) {
      IntMatrix mat(static_cast<std::size_t>(d), std::vector<Int>(static_cast<std::size_t>(d)));
      const auto& base = e.members[static_cast<std::size_t>(pick[0])];
      for (int i = 0; i < d; ++i) {
        const auto& row = e.members[static_cast<std::size_t>(pick[static_cast<std::size_t>(i) + 1])];
        for (int j = 0; j < d; ++j)
          mat[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] =
              row[static_cast<std::size_t>(j)] - base[static_cast<std::size_t>(j)];
      }
      const Int det = determinant(std::move(mat));
      vols.insert(det);
      vols.insert(-det);
      int i = d;
      while (i >= 0 && pick[static_cast<std::size_t>(i)] == n - (d + 1) + i) --i;
      if (i < 0) break;
      ++pick[static_cast<std::size_t>(i)];
      for (int j = i + 1; j <= d; ++j)
        pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j) - 1] + 1;
    }
  }
  return std::vector<Int>(vols.begin(), vols.end());
}

bool volspec_coverage(const WindowedSet& e, const Int& k, const Int& bound) {
  if (bound < 0) throw UsageError("volume coverage: bound must be nonnegative");
  const std::vector<Int> spec = volspec(e);
  const Int step = factorial(e.dim) * k;
  for (Int j = -bound; j <= bound; ++j)
    if (!std::binary_search(spec.begin(), spec.end(), step * j)) return false;
  return true;
}

std::vector<Int> bohr_set(const Rat& alpha, const Rat& eps, const Int& lo, const Int& hi) {
  if (lo >= hi) throw UsageError("bohr set: empty window");
  if (hi - lo > Limits::get().max_enum)
    throw BoundError("bohr set: window exceeds the enumeration cap");
  if (eps <= 0) throw UsageError("bohr set: eps must be positive");
  std::vector<Int> out;
  for (Int n = lo; n < hi; ++n)
    if (near_integer(Rat(n) * alpha, eps)) out.push_back(n);
  return out;
}

AppendixCheck appendix_necessity_check(const IntPolynomialMap& p, const Rat& a,
                                       const Rat& eps, const Int& lo, const Int& hi,
                                       const Int& k_max, const Int& radius) {
  const auto comb = linear_degenerate_combination(p);
  if (!comb)
    throw UsageError("necessity check: the polynomial has no degenerate combination");
  const int d = p.dim();
  if (p.arity() != d)
    throw UsageError("necessity check: polynomial must act on the ambient dimension");

  const std::vector<Int> line = bohr_set(a, eps, lo, hi);
  Int count = 1;
  for (int i = 0; i < d; ++i) count *= static_cast<std::int64_t>(line.size());
  if (count > Limits::get().max_enum)
    throw BoundError("necessity check: Bohr box exceeds the enumeration cap");

  std::vector<std::vector<Int>> members;
  std::vector<std::size_t> pick(static_cast<std::size_t>(d), 0);
  if (!line.empty()) {
    while (true) {
      std::vector<Int> x(static_cast<std::size_t>(d));
      for (int i = 0; i < d; ++i) x[static_cast<std::size_t>(i)] = line[pick[static_cast<std::size_t>(i)]];
      members.push_back(std::move(x));
      int i = d - 1;
      while (i >= 0 && ++pick[static_cast<std::size_t>(i)] == line.size()) {
        pick[static_cast<std::size_t>(i)] = 0;
        --i;
      }
      if (i < 0) break;
    }
  }
  const WindowedSet e = make_windowed_set(
      std::vector<std::pair<Int, Int>>(static_cast<std::size_t>(d), {lo, hi}), std::move(members));

  AppendixCheck out{*comb, Rat(0), Int(static_cast<std::int64_t>(e.members.size())), {}, false,
                    BogolyubovResult{}};
  Rat weight(0);
  for (const Int& c : comb->alpha) weight += Rat(abs(c));
  for (const Int& c : comb->beta) weight += Rat(abs(c));
  out.fat_eps = Rat(2) * eps * weight;

  // factorwise fat-Bohr certificate: alpha.(s + P(y)) a = (alpha.s) a + (beta.y) a,
  // and each factor stays within half of eps' for s, y in E - E
  const WindowedSet diff = difference_set(e);
  const Rat half_alpha = Rat(2) * eps * [&] {
    Rat s(0);
    for (const Int& c : comb->alpha) s += Rat(abs(c));
    return s;
  }();
  const Rat half_beta = out.fat_eps - half_alpha;
  for (const auto& s : diff.members) {
    Rat dot(0);
    for (int i = 0; i < d; ++i) dot += Rat(comb->alpha[static_cast<std::size_t>(i)] *
                                           s[static_cast<std::size_t>(i)]);
    OSPEC_CHECK(half_alpha == 0 ? frac_part(dot * a) == 0 : near_integer(dot * a, half_alpha),
                "difference point escapes its Bohr radius");
    const std::vector<Int> pv = p.evaluate(s);
    Rat pd(0), bd(0);
    for (int i = 0; i < d; ++i) {
      pd += Rat(comb->alpha[static_cast<std::size_t>(i)] * pv[static_cast<std::size_t>(i)]);
      bd += Rat(comb->beta[static_cast<std::size_t>(i)] * s[static_cast<std::size_t>(i)]);
    }
    OSPEC_CHECK(pd == bd, "degenerate combination identity fails on a difference point");
    OSPEC_CHECK(half_beta == 0 ? frac_part(bd * a) == 0 : near_integer(bd * a, half_beta),
                "polynomial image escapes its Bohr radius");
  }

  // a multiple k m with alpha.(k m) a outside the fat radius cannot lie in
  // (E - E) + P(E - E), whatever the window: certified miss for step k
  const std::int64_t r = to_i64(radius);
  bool all = true;
  for (Int k = 1; k <= k_max; ++k) {
    bool found = false;
    std::vector<std::int64_t> mv(static_cast<std::size_t>(d), -r);
    while (true) {
      Rat dot(0);
      for (int i = 0; i < d; ++i)
        dot += Rat(comb->alpha[static_cast<std::size_t>(i)]) * Rat(k) *
               Rat(mv[static_cast<std::size_t>(i)]);
      if (!near_integer(dot * a, out.fat_eps)) {
        std::vector<Int> z(static_cast<std::size_t>(d));
        for (int i = 0; i < d; ++i) z[static_cast<std::size_t>(i)] = k * mv[static_cast<std::size_t>(i)];
        out.uncovered.emplace_back(k, std::move(z));
        found = true;
        break;
      }
      int i = d - 1;
      while (i >= 0 && ++mv[static_cast<std::size_t>(i)] > r) {
        mv[static_cast<std::size_t>(i)] = -r;
        --i;
      }
      if (i < 0) break;
    }
    all = all && found;
  }
  out.bogolyubov = bogolyubov_min_k(e, p, k_max, radius);
  out.none_certified = all && !out.bogolyubov.k.has_value();
  return out;
}

namespace {

PinnedRefutation refute_periodic(const WindowedSet& e, const IntPolynomialMap& p,
                                 const Int& k, const Int& m, const Int& period) {
  if (period < 1) throw UsageError("pinned refutation: period must be positive");
  if (e.window[0].second - e.window[0].first < period)
    throw UsageError("pinned refutation: window shorter than one period");
  const std::int64_t lam = to_i64(period);
  if (lam > Limits::get().max_space)
    throw BoundError("pinned refutation: period exceeds the space cap");

  Bitset base(lam);
  std::vector<std::int64_t> e0;
  for (const auto& x : e.members) {
    const std::int64_t rx = mod_reduce(x[0], lam);
    if (!base.test(rx)) {
      base.set(rx);
      e0.push_back(rx);
    }
  }
  std::sort(e0.begin(), e0.end());
  const auto sz = static_cast<std::int64_t>(e0.size());
  const std::int64_t mm = to_i64(m);
  if (Int(sz) * sz * (lam / 64 + mm + 1) > Limits::get().tuple_cap)
    throw BoundError("pinned refutation: work exceeds the cap");

  PinnedRefutation out;
  out.periodic = true;
  out.m = m;
  out.pair_count = sz * sz;
  if (sz == 0) {
    out.refuted = true;  // no pairs to cover anything
    return out;
  }
  if (mm == 0) {
    out.covering_pair = {Int(e0.front()), Int(e0.front())};
    return out;
  }

  std::vector<std::int64_t> ptable(static_cast<std::size_t>(lam));
  for (std::int64_t t = 0; t < lam; ++t)
    ptable[static_cast<std::size_t>(t)] = p.evaluate_mod({t}, lam)[0];
  const std::int64_t kq = mod_reduce(k, lam);

  std::int64_t worst = 0;
  std::vector<Int> worst_pair;
  for (std::int64_t y : e0) {
    std::vector<std::int64_t> shifts;
    shifts.reserve(e0.size());
    for (std::int64_t ep : e0)
      shifts.push_back(ptable[static_cast<std::size_t>((ep - y + lam) % lam)]);
    std::sort(shifts.begin(), shifts.end());
    shifts.erase(std::unique(shifts.begin(), shifts.end()), shifts.end());
    Bitset covered(lam);
    for (std::int64_t s : shifts) or_rotated(covered, base, s);

    for (std::int64_t x : e0) {
      std::int64_t pos = x;
      std::int64_t fail = 0;
      for (std::int64_t j = 1; j <= mm; ++j) {
        pos += kq;
        if (pos >= lam) pos -= lam;
        if (!covered.test(pos)) {
          fail = j;
          break;
        }
      }
      if (fail == 0) {
        out.covering_pair = {Int(x), Int(y)};
        return out;
      }
      if (fail > worst) {
        worst = fail;
        worst_pair = {Int(x), Int(y)};
      }
    }
  }
  out.refuted = true;
  out.m_prime = worst;
  out.worst_pair = std::move(worst_pair);
  return out;
}

PinnedRefutation refute_finite(const WindowedSet& e, const IntPolynomialMap& p,
                               const Int& k, const Int& m) {
  const auto sz = static_cast<std::int64_t>(e.members.size());
  if (Int(sz) * sz * sz > Limits::get().tuple_cap)
    throw BoundError("pinned refutation: work exceeds the cap");
  PinnedRefutation out;
  out.m = m;
  out.pair_count = sz * sz;
  if (sz == 0) {
    out.refuted = true;
    return out;
  }
  if (m == 0) {
    out.covering_pair = {e.members.front()[0], e.members.front()[0]};
    return out;
  }
  std::vector<Int> ev;
  ev.reserve(e.members.size());
  for (const auto& x : e.members) ev.push_back(x[0]);

  Int worst = 0;
  std::vector<Int> worst_pair;
  for (const Int& y : ev) {
    std::set<Int> covered;
    for (const Int& ep : ev) {
      const Int shift = p.evaluate({ep - y})[0];
      for (const Int& base : ev) covered.insert(base + shift);
    }
    for (const Int& x : ev) {
      Int fail = 0;
      for (Int j = 1; j <= m; ++j)
        if (!covered.count(j * k + x)) {
          fail = j;
          break;
        }
      if (fail == 0) {
        out.covering_pair = {x, y};
        return out;
      }
      if (fail > worst) {
        worst = fail;
        worst_pair = {x, y};
      }
    }
  }
  out.refuted = true;
  out.m_prime = worst;
  out.worst_pair = std::move(worst_pair);
  return out;
}

}  // namespace

PinnedRefutation pinned_delta_refuter(const WindowedSet& e, const IntPolynomialMap& p,
                                      const Int& k, const Int& m,
                                      const std::optional<Int>& period) {
  if (e.dim != 1) throw UsageError("pinned refutation: the set must be one-dimensional");
  if (p.arity() != 1 || p.dim() != 1)
    throw UsageError("pinned refutation: polynomial must map one variable to one value");
  if (k < 1) throw UsageError("pinned refutation: k must be positive");
  if (m < 0) throw UsageError("pinned refutation: m must be nonnegative");
  return period ? refute_periodic(e, p, k, m, *period) : refute_finite(e, p, k, m);
}

}  // namespace orbitspec
