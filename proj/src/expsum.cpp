#include "orbitspec/expsum.hpp"

#include <cmath>
#include <numbers>
#include <numeric>

namespace orbitspec {

WeylAverage weyl_average(const IntPolynomialMap& p, const TorusRational& alpha) {
  if (p.arity() != 1) throw UsageError("weyl_average: arity-1 polynomial required");
  if (alpha.dim() != p.dim())
    throw UsageError("weyl_average: frequency dimension must match output dimension");
  const std::int64_t big = to_i64(alpha.denom());
  if (big > Limits::get().max_enum) throw BoundError("weyl_average: period too large");

  // phase(n) = sum_j P_j(n) p_j / q_j = (integer mod big) / big
  std::vector<std::int64_t> nums(p.dim()), dens(p.dim()), scale(p.dim());
  for (int j = 0; j < p.dim(); ++j) {
    nums[j] = to_i64(alpha.coords()[j].get_num());
    dens[j] = to_i64(alpha.coords()[j].get_den());
    scale[j] = big / dens[j];
  }
  std::complex<double> acc(0.0, 0.0);
  const double tau = 2.0 * std::numbers::pi;
  for (std::int64_t n = 0; n < big; ++n) {
    std::vector<std::int64_t> vals = p.evaluate_mod({n}, big);
    std::int64_t num = 0;
    for (int j = 0; j < p.dim(); ++j)
      num = (num + mod_mul(vals[j] % dens[j], mod_mul(nums[j], scale[j], big), big)) % big;
    double phase = tau * static_cast<double>(num) / static_cast<double>(big);
    acc += std::complex<double>(std::cos(phase), std::sin(phase));
  }
  acc /= static_cast<double>(big);
  return {alpha, Int(static_cast<long>(big)), acc};
}

PsiValue psi_empirical(const IntPolynomialMap& p, std::int64_t q) {
  if (q < 2) throw UsageError("psi_empirical: q must be >= 2");
  if (p.arity() != 1) throw UsageError("psi_empirical: arity-1 polynomial required");
  const int d = p.dim();
  double count_guard = std::pow(static_cast<double>(q), d);
  if (count_guard > static_cast<double>(Limits::get().max_enum))
    throw BoundError("psi_empirical: frequency grid too large");

  // tables: P_j(n) mod q and the q-th roots of unity
  std::vector<std::vector<std::int64_t>> table(d, std::vector<std::int64_t>(q));
  for (std::int64_t n = 0; n < q; ++n) {
    auto vals = p.evaluate_mod({n}, q);
    for (int j = 0; j < d; ++j) table[j][n] = vals[j];
  }
  const double tau = 2.0 * std::numbers::pi;
  std::vector<std::complex<double>> roots(q);
  for (std::int64_t k = 0; k < q; ++k) {
    double phase = tau * static_cast<double>(k) / static_cast<double>(q);
    roots[k] = {std::cos(phase), std::sin(phase)};
  }

  PsiValue best{0.0, {}};
  std::vector<std::int64_t> a(d, 0);
  auto advance = [&]() {
    for (int i = d - 1; i >= 0; --i) {
      if (a[i] + 1 < q) {
        ++a[i];
        return true;
      }
      a[i] = 0;
    }
    return false;
  };
  while (advance()) {
    // denom(a/q) = q exactly iff gcd(a_1, ..., a_d, q) = 1
    std::int64_t g = q;
    for (std::int64_t ai : a) g = std::gcd(g, ai);
    if (g != 1) continue;
    std::complex<double> acc(0.0, 0.0);
    for (std::int64_t n = 0; n < q; ++n) {
      std::int64_t k = 0;
      for (int j = 0; j < d; ++j) k = (k + mod_mul(table[j][n], a[j], q)) % q;
      acc += roots[k];
    }
    double mag = std::abs(acc) / static_cast<double>(q);
    if (mag > best.value) {
      best.value = mag;
      best.best_numerators = a;
    }
  }
  if (best.best_numerators.empty()) best.best_numerators = std::vector<std::int64_t>(d, 0);
  return best;
}

HuaThreshold hua_threshold(const IntPolynomialMap& p, double target,
                           std::int64_t scan_bound) {
  if (!(target > 0.0) || target > 1.0)
    throw UsageError("hua_threshold: target must be in (0, 1]");
  if (scan_bound < 2) throw UsageError("hua_threshold: scan bound must be >= 2");
  std::int64_t worst = 1;
  for (std::int64_t q = 2; q <= scan_bound; ++q)
    if (psi_empirical(p, q).value >= target) worst = q;
  if (worst == scan_bound)
    throw BoundError("hua_threshold: no threshold below the scan bound");
  return {worst, true};
}

}  // namespace orbitspec
