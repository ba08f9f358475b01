#include "orbitspec/ratmat.hpp"

namespace orbitspec {

namespace {

// Reduced row echelon form; returns pivot column per pivot row.
std::vector<int> rref(RatMatrix& m) {
  std::vector<int> pivots;
  if (m.empty()) return pivots;
  const int rows = static_cast<int>(m.size());
  const int cols = static_cast<int>(m[0].size());
  int r = 0;
  for (int c = 0; c < cols && r < rows; ++c) {
    int sel = -1;
    for (int i = r; i < rows; ++i)
      if (m[i][c] != 0) {
        sel = i;
        break;
      }
    if (sel < 0) continue;
    std::swap(m[r], m[sel]);
    Rat inv = 1 / m[r][c];
    for (int j = c; j < cols; ++j) m[r][j] *= inv;
    for (int i = 0; i < rows; ++i) {
      if (i == r || m[i][c] == 0) continue;
      Rat f = m[i][c];
      for (int j = c; j < cols; ++j) m[i][j] -= f * m[r][j];
    }
    pivots.push_back(c);
    ++r;
  }
  return pivots;
}

}  // namespace

int rat_rank(RatMatrix m) { return static_cast<int>(rref(m).size()); }

std::vector<std::vector<Rat>> rat_kernel(const RatMatrix& m) {
  if (m.empty()) return {};
  RatMatrix w = m;
  std::vector<int> pivots = rref(w);
  const int cols = static_cast<int>(m[0].size());
  std::vector<int> pivot_of_col(cols, -1);
  for (int i = 0; i < static_cast<int>(pivots.size()); ++i) pivot_of_col[pivots[i]] = i;
  std::vector<std::vector<Rat>> basis;
  for (int c = 0; c < cols; ++c) {
    if (pivot_of_col[c] >= 0) continue;
    std::vector<Rat> v(cols, Rat(0));
    v[c] = 1;
    for (int j = 0; j < cols; ++j)
      if (pivot_of_col[j] >= 0) v[j] = -w[pivot_of_col[j]][c];
    basis.push_back(std::move(v));
  }
  return basis;
}

RatMatrix rat_inverse(RatMatrix m) {
  const int n = static_cast<int>(m.size());
  for (auto& row : m) {
    if (static_cast<int>(row.size()) != n) throw UsageError("rat_inverse: not square");
    row.resize(2 * n, Rat(0));
  }
  for (int i = 0; i < n; ++i) m[i][n + i] = 1;
  std::vector<int> pivots = rref(m);
  if (static_cast<int>(pivots.size()) < n || pivots[n - 1] != n - 1)
    throw UsageError("rat_inverse: singular matrix");
  RatMatrix inv(n, std::vector<Rat>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) inv[i][j] = m[i][n + j];
  return inv;
}

std::vector<Int> normalize_integer_vector(const std::vector<Rat>& v) {
  Int l(1);
  for (const Rat& x : v) l = lcm(l, x.get_den());
  std::vector<Int> out;
  out.reserve(v.size());
  Int g(0);
  for (const Rat& x : v) {
    Int e = x.get_num() * (l / x.get_den());
    g = gcd(g, e);
    out.push_back(e);
  }
  if (g == 0) return out;
  int sign = 0;
  for (const Int& e : out)
    if (e != 0) {
      sign = (e > 0) ? 1 : -1;
      break;
    }
  for (Int& e : out) e = e / g * sign;
  return out;
}

}  // namespace orbitspec
