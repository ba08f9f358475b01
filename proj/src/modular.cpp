#include "orbitspec/modular.hpp"

#include <algorithm>

namespace orbitspec {

Rat frac_part(const Rat& x) {
  Rat f = x - Rat(floor_div(x.get_num(), x.get_den()));
  return f;
}

TorusRational::TorusRational(std::vector<Rat> coords) : coords_(std::move(coords)) {
  for (Rat& c : coords_) c = frac_part(c);
}

TorusRational TorusRational::zero(int dim) {
  return TorusRational(std::vector<Rat>(dim, Rat(0)));
}

Int TorusRational::denom() const {
  Int l(1);
  for (const Rat& c : coords_) l = lcm(l, c.get_den());
  return l;
}

bool TorusRational::is_zero() const {
  for (const Rat& c : coords_)
    if (c != 0) return false;
  return true;
}

TorusRational reduce_torus_point(const std::vector<std::pair<Int, Int>>& raw) {
  std::vector<Rat> coords;
  coords.reserve(raw.size());
  for (const auto& [num, den] : raw) coords.push_back(make_rat(num, den));
  return TorusRational(std::move(coords));
}

std::vector<TorusRational> enumerate_rat(const Int& m, const std::vector<Int>& grid) {
  for (const Int& g : grid)
    if (g < 1) throw UsageError("enumerate_rat: grid moduli must be positive");
  const int d = static_cast<int>(grid.size());
  std::vector<TorusRational> out;
  std::vector<Rat> point(d, Rat(0));
  const std::int64_t cap = Limits::get().max_enum;

  // depth-first over coordinates, pruning on the partial lcm of denominators
  auto rec = [&](auto&& self, int coord, const Int& l) -> void {
    if (coord == d) {
      TorusRational p(point);
      if (!p.is_zero()) out.push_back(std::move(p));
      return;
    }
    for (Int a(0); a < grid[coord]; ++a) {
      Rat c = make_rat(a, grid[coord]);
      Int l2 = lcm(l, c.get_den());
      if (l2 > m) continue;
      point[coord] = c;
      if (static_cast<std::int64_t>(out.size()) > cap)
        throw BoundError("enumerate_rat: too many grid points");
      self(self, coord + 1, l2);
    }
    point[coord] = 0;
  };
  rec(rec, 0, Int(1));
  std::sort(out.begin(), out.end());
  return out;
}

Int crt_combine(const std::vector<Int>& residues, const std::vector<Int>& moduli) {
  if (residues.size() != moduli.size())
    throw UsageError("crt_combine: residue/modulus count mismatch");
  if (moduli.empty()) throw UsageError("crt_combine: empty input");
  Int r = mod_floor(residues[0], moduli[0]);
  Int m = moduli[0];
  for (size_t i = 1; i < moduli.size(); ++i) {
    if (moduli[i] < 1) throw UsageError("crt_combine: moduli must be positive");
    Int inv;
    if (mpz_invert(inv.get_mpz_t(), m.get_mpz_t(), moduli[i].get_mpz_t()) == 0)
      throw UsageError("crt_combine: moduli not pairwise coprime");
    Int t = mod_floor((mod_floor(residues[i], moduli[i]) - r) * inv, moduli[i]);
    r += m * t;
    m *= moduli[i];
  }
  return r;
}

Int Factorization::value() const {
  Int v(1);
  for (const auto& [p, e] : factors) {
    Int pw;
    mpz_pow_ui(pw.get_mpz_t(), p.get_mpz_t(), static_cast<unsigned long>(e));
    v *= pw;
  }
  return v;
}

bool Factorization::squarefree() const {
  for (const auto& [p, e] : factors)
    if (e > 1) return false;
  return true;
}

Factorization factorize(const Int& n) {
  if (n < 1) throw UsageError("factorize: input must be positive");
  if (n > Limits::get().factor_bound)
    throw BoundError("factorize: input above desk-scale bound " +
                     Limits::get().factor_bound.get_str());
  Factorization f;
  Int rest = n;
  auto strip = [&](const Int& p) {
    int e = 0;
    while (rest % p == 0) {
      rest /= p;
      ++e;
    }
    if (e > 0) f.factors.emplace_back(p, e);
  };
  strip(Int(2));
  strip(Int(3));
  for (Int p(5); p * p <= rest; p += 4) {
    strip(p);
    p += 2;
    if (p * p > rest) break;
    strip(p);
  }
  if (rest > 1) f.factors.emplace_back(rest, 1);
  return f;
}

bool is_prime(const Int& n) {
  if (n < 2) return false;
  Factorization f = factorize(n);
  return f.factors.size() == 1 && f.factors[0].second == 1;
}

}  // namespace orbitspec
