#include "orbitspec/intlinalg.hpp"

#include <algorithm>
#include <random>

namespace orbitspec {

IntMatrix identity_matrix(int n) {
  IntMatrix m(n, std::vector<Int>(n, Int(0)));
  for (int i = 0; i < n; ++i) m[i][i] = 1;
  return m;
}

IntMatrix matrix_product(const IntMatrix& a, const IntMatrix& b) {
  if (a.empty() || b.empty()) throw UsageError("matrix_product: empty matrix");
  const size_t n = a.size(), k = b.size(), m = b[0].size();
  for (const auto& row : a)
    if (row.size() != k) throw UsageError("matrix_product: shape mismatch");
  IntMatrix c(n, std::vector<Int>(m, Int(0)));
  for (size_t i = 0; i < n; ++i)
    for (size_t t = 0; t < k; ++t) {
      if (a[i][t] == 0) continue;
      for (size_t j = 0; j < m; ++j) c[i][j] += a[i][t] * b[t][j];
    }
  return c;
}

Int determinant(IntMatrix m) {
  const int n = static_cast<int>(m.size());
  for (const auto& row : m)
    if (static_cast<int>(row.size()) != n) throw UsageError("determinant: not square");
  if (n == 0) return Int(1);
  Int prev(1);
  int sign = 1;
  for (int k = 0; k < n - 1; ++k) {
    if (m[k][k] == 0) {
      int sel = -1;
      for (int i = k + 1; i < n; ++i)
        if (m[i][k] != 0) {
          sel = i;
          break;
        }
      if (sel < 0) return Int(0);
      std::swap(m[k], m[sel]);
      sign = -sign;
    }
    for (int i = k + 1; i < n; ++i)
      for (int j = k + 1; j < n; ++j)
        m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) / prev;
    prev = m[k][k];
  }
  return sign * m[n - 1][n - 1];
}

namespace {

// Tracks b = l * d * r while elementary operations run on d.
struct SnfWork {
  IntMatrix l, d, r;
  int rows, cols;

  explicit SnfWork(const IntMatrix& b)
      : l(identity_matrix(static_cast<int>(b.size()))),
        d(b),
        r(identity_matrix(static_cast<int>(b[0].size()))),
        rows(static_cast<int>(b.size())),
        cols(static_cast<int>(b[0].size())) {}

  void row_swap(int i, int j) {
    std::swap(d[i], d[j]);
    for (int t = 0; t < rows; ++t) std::swap(l[t][i], l[t][j]);
  }
  void row_negate(int i) {
    for (int j = 0; j < cols; ++j) d[i][j] = -d[i][j];
    for (int t = 0; t < rows; ++t) l[t][i] = -l[t][i];
  }
  // d.row_i += c * d.row_j  =>  l.col_j -= c * l.col_i
  void row_add(int i, int j, const Int& c) {
    for (int t = 0; t < cols; ++t) d[i][t] += c * d[j][t];
    for (int t = 0; t < rows; ++t) l[t][j] -= c * l[t][i];
  }
  void col_swap(int i, int j) {
    for (int t = 0; t < rows; ++t) std::swap(d[t][i], d[t][j]);
    std::swap(r[i], r[j]);
  }
  // d.col_i += c * d.col_j  =>  r.row_j -= c * r.row_i
  void col_add(int i, int j, const Int& c) {
    for (int t = 0; t < rows; ++t) d[t][i] += c * d[t][j];
    for (int t = 0; t < cols; ++t) r[j][t] -= c * r[i][t];
  }

  bool find_pivot(int t, int* pi, int* pj) const {
    Int best(0);
    for (int i = t; i < rows; ++i)
      for (int j = t; j < cols; ++j) {
        if (d[i][j] == 0) continue;
        Int a = abs(d[i][j]);
        if (best == 0 || a < best) {
          best = a;
          *pi = i;
          *pj = j;
        }
      }
    return best != 0;
  }

  // Clear row t and column t outside (t,t); returns false when the submatrix is zero.
  bool diagonalize_at(int t) {
    while (true) {
      int pi, pj;
      if (!find_pivot(t, &pi, &pj)) return false;
      if (pi != t) row_swap(t, pi);
      if (pj != t) col_swap(t, pj);
      if (d[t][t] < 0) row_negate(t);
      bool dirty = false;
      for (int i = t + 1; i < rows; ++i) {
        if (d[i][t] == 0) continue;
        row_add(i, t, -floor_div(d[i][t], d[t][t]));
        if (d[i][t] != 0) dirty = true;
      }
      for (int j = t + 1; j < cols; ++j) {
        if (d[t][j] == 0) continue;
        col_add(j, t, -floor_div(d[t][j], d[t][t]));
        if (d[t][j] != 0) dirty = true;
      }
      if (!dirty) return true;
    }
  }
};

}  // namespace

std::vector<Int> SmithDecomposition::invariant_factors() const {
  std::vector<Int> out;
  const size_t k = std::min(d.size(), d.empty() ? 0 : d[0].size());
  for (size_t t = 0; t < k; ++t)
    if (d[t][t] != 0) out.push_back(d[t][t]);
  return out;
}

SmithDecomposition smith_normal_form(const IntMatrix& b) {
  if (b.empty() || b[0].empty()) throw UsageError("smith_normal_form: empty matrix");
  for (const auto& row : b)
    if (row.size() != b[0].size()) throw UsageError("smith_normal_form: ragged matrix");

  SnfWork w(b);
  const int k = std::min(w.rows, w.cols);
  // diagonalize, then enforce the divisibility chain; a chain fix can create
  // fill-in, so re-diagonalize from scratch after each one
  while (true) {
    int done = 0;
    for (; done < k; ++done)
      if (!w.diagonalize_at(done)) break;
    int bad = -1;
    for (int t = 0; t + 1 < done; ++t)
      if (w.d[t + 1][t + 1] % w.d[t][t] != 0) {
        bad = t;
        break;
      }
    if (bad < 0) break;
    w.col_add(bad, bad + 1, Int(1));
  }

  SmithDecomposition out{std::move(w.l), std::move(w.d), std::move(w.r)};
  for (int i = 0; i < w.rows; ++i)
    for (int j = 0; j < w.cols; ++j)
      OSPEC_CHECK(i == j || out.d[i][j] == 0, "SNF middle factor must be diagonal");
  OSPEC_CHECK(matrix_product(out.l, matrix_product(out.d, out.r)) == b,
              "SNF roundtrip failed");
  OSPEC_CHECK(abs(determinant(out.l)) == 1 && abs(determinant(out.r)) == 1,
              "SNF transforms must be unimodular");
  auto inv = out.invariant_factors();
  for (size_t i = 0; i + 1 < inv.size(); ++i)
    OSPEC_CHECK(inv[i + 1] % inv[i] == 0, "SNF divisibility chain failed");
  for (const Int& v : inv) OSPEC_CHECK(v > 0, "invariant factors must be positive");
  return out;
}

IntMatrix coefficient_matrix(const IntPolynomialMap& p) {
  if (p.arity() != 1) throw UsageError("coefficient_matrix: arity-1 polynomial required");
  const std::int64_t deg = p.degree();
  if (deg < 1) throw UsageError("coefficient_matrix: constant polynomial");
  IntMatrix b(deg, std::vector<Int>(p.dim(), Int(0)));
  for (int i = 0; i < p.dim(); ++i)
    for (const auto& [mon, c] : p.components()[i])
      if (mon.degree() >= 1) b[mon.degree() - 1][i] = c;
  return b;
}

namespace {

Int coefficient_gcd_with_q(const IntMatrix& b, const std::vector<Int>& a, const Int& q) {
  Int g = q;
  for (const auto& row : b) {
    Int bt(0);
    for (size_t i = 0; i < a.size(); ++i) bt += row[i] * a[i];
    g = gcd(g, bt);
  }
  return g;
}

}  // namespace

ComplexityBound multiplicative_complexity_bound(const IntPolynomialMap& p) {
  IntMatrix b = coefficient_matrix(p);
  SmithDecomposition snf = smith_normal_form(b);
  auto inv = snf.invariant_factors();
  if (static_cast<int>(inv.size()) < p.dim())
    throw UsageError("multiplicative_complexity_bound: components not independent");
  Int q_bound = inv.back();

  // randomized spot check of the certified bound
  std::mt19937_64 rng(0x0f2b5eed);
  std::uniform_int_distribution<int> qdist(2, 50), adist(-25, 25);
  for (int trial = 0; trial < 64; ++trial) {
    Int q(qdist(rng));
    std::vector<Int> a(p.dim());
    Int g;
    do {
      g = q;
      for (auto& ai : a) {
        ai = adist(rng);
        g = gcd(g, ai);
      }
    } while (g != 1);
    Int got = coefficient_gcd_with_q(b, a, q);
    OSPEC_CHECK(got <= q_bound, "multiplicative complexity bound violated at q=" +
                                    q.get_str() + ", gcd=" + got.get_str());
  }
  return {q_bound, std::move(inv)};
}

std::optional<SmallestFactorCounterexample> smallest_factor_counterexample(
    const IntPolynomialMap& p) {
  IntMatrix b = coefficient_matrix(p);
  auto inv = smith_normal_form(b).invariant_factors();
  if (static_cast<int>(inv.size()) < p.dim())
    throw UsageError("smallest_factor_counterexample: components not independent");
  const Int d1 = inv.front();
  const int d = p.dim();

  std::vector<Int> a(d, Int(-6));
  auto advance = [&]() {
    for (int i = 0; i < d; ++i) {
      if (a[i] < 6) {
        ++a[i];
        return true;
      }
      a[i] = -6;
    }
    return false;
  };
  for (Int q(2); q <= 12; ++q) {
    std::fill(a.begin(), a.end(), Int(-6));
    do {
      Int g = q;
      for (const Int& ai : a) g = gcd(g, ai);
      if (g != 1) continue;
      Int got = coefficient_gcd_with_q(b, a, q);
      if (got > d1) return SmallestFactorCounterexample{a, q, got, d1};
    } while (advance());
  }
  return std::nullopt;
}

IntMatrix complete_primitive_to_unimodular(const std::vector<Int>& v) {
  const int d = static_cast<int>(v.size());
  if (d < 1) throw UsageError("complete_primitive_to_unimodular: empty vector");
  Int g(0);
  for (const Int& x : v) g = gcd(g, x);
  if (g != 1) throw UsageError("complete_primitive_to_unimodular: vector not primitive");
  if (d == 1) {
    if (v[0] != 1)
      throw UsageError("complete_primitive_to_unimodular: no det-1 completion in width 1");
    return identity_matrix(1);
  }
  SmithDecomposition snf = smith_normal_form({v});
  // [v] = l * (1 0 ... 0) * r, so row 0 of r equals +-v
  IntMatrix m = snf.r;
  if (m[0] != v) {
    for (Int& x : m[0]) x = -x;
    OSPEC_CHECK(m[0] == v, "SNF row transform must recover the input vector");
  }
  if (determinant(m) != 1)
    for (Int& x : m[1]) x = -x;
  OSPEC_CHECK(determinant(m) == 1, "completion determinant must be one");
  return m;
}

Haystack haystack_window(int d, const Int& m) {
  if (d < 2) throw UsageError("haystack_window: dimension must be >= 2");
  if (m < 1) throw UsageError("haystack_window: window bound must be positive");
  Haystack h{d, {}, {}};
  const Int dfact = factorial(d);
  const std::int64_t cap = Limits::get().direction_cap;
  for (Int t(1);; ++t) {
    Int pw;
    mpz_pow_ui(pw.get_mpz_t(), t.get_mpz_t(),
               static_cast<unsigned long>(d) * static_cast<unsigned long>(d - 1));
    if (dfact * pw > m) break;
    std::vector<Int> v(d);
    v[0] = 1;
    for (int j = 1; j < d; ++j) v[j] = v[j - 1] * t;
    h.ts.push_back(t);
    h.vectors.push_back(std::move(v));
    if (static_cast<std::int64_t>(h.ts.size()) > cap)
      throw BoundError("haystack_window: scan cap exceeded");
  }
  return h;
}

std::vector<TorusRational> annihilator_on_grid(
    const std::vector<std::vector<Int>>& vectors, const std::vector<Int>& grid) {
  const int d = static_cast<int>(grid.size());
  for (const auto& v : vectors)
    if (static_cast<int>(v.size()) != d)
      throw UsageError("annihilator_on_grid: vector/grid dimension mismatch");
  Int total(1);
  for (const Int& g : grid) {
    if (g < 1) throw UsageError("annihilator_on_grid: grid moduli must be positive");
    total *= g;
  }
  if (total > Limits::get().max_enum)
    throw BoundError("annihilator_on_grid: grid too large");

  Int big(1);
  for (const Int& g : grid) big = lcm(big, g);
  // v . alpha = sum v_j a_j / g_j; integral iff sum v_j a_j (big/g_j) = 0 mod big
  std::vector<std::vector<Int>> weights;
  for (const auto& v : vectors) {
    std::vector<Int> w(d);
    for (int j = 0; j < d; ++j) w[j] = mod_floor(v[j] * (big / grid[j]), big);
    weights.push_back(std::move(w));
  }
  std::vector<TorusRational> out;
  std::vector<Int> a(d, Int(0));
  auto advance = [&]() {
    for (int i = d - 1; i >= 0; --i) {
      if (a[i] + 1 < grid[i]) {
        ++a[i];
        return true;
      }
      a[i] = 0;
    }
    return false;
  };
  do {
    bool ok = true;
    for (const auto& w : weights) {
      Int s(0);
      for (int j = 0; j < d; ++j) s += w[j] * a[j];
      if (mod_floor(s, big) != 0) {
        ok = false;
        break;
      }
    }
    if (!ok) continue;
    std::vector<Rat> coords;
    coords.reserve(d);
    for (int j = 0; j < d; ++j) coords.push_back(make_rat(a[j], grid[j]));
    out.emplace_back(std::move(coords));
  } while (advance());
  return out;
}

AnnihilatorReport annihilator_in_rat(const std::vector<std::vector<Int>>& vectors,
                                     const std::vector<Int>& grid, const Int& m) {
  const int d = static_cast<int>(grid.size());
  if (static_cast<int>(vectors.size()) == d) {
    IntMatrix sq(vectors.begin(), vectors.end());
    if (determinant(sq) == 0)
      throw UsageError("annihilator_in_rat: vectors not linearly independent");
  }
  AnnihilatorReport rep{annihilator_on_grid(vectors, grid), Int(0)};
  for (const TorusRational& p : rep.points) {
    if (p.is_zero()) continue;
    Int den = p.denom();
    rep.max_denom = std::max(rep.max_denom, den);
    OSPEC_CHECK(den <= m,
                "joint annihilator point outside Rat(M): denom " + den.get_str());
  }
  return rep;
}

}  // namespace orbitspec
