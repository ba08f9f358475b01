#pragma once

#include <complex>
#include <cstdint>
#include <vector>

#include "orbitspec/common.hpp"
#include "orbitspec/intpoly.hpp"
#include "orbitspec/modular.hpp"

namespace orbitspec {

struct WeylAverage {
  TorusRational alpha;
  Int period;  // denom(alpha): the average over one period equals the limit
  std::complex<double> value;
};
// (1/L) sum_{n=0}^{L-1} e(P(n) . alpha) with L = denom(alpha); exact because
// P(n+L) . alpha = P(n) . alpha (mod 1) for integer coefficients.
WeylAverage weyl_average(const IntPolynomialMap& p, const TorusRational& alpha);

struct PsiValue {
  double value;
  std::vector<std::int64_t> best_numerators;  // maximizing frequency, over denominator q
};
// max |weyl_average(P, alpha)| over frequencies on (1/q)Z^d with denom exactly q.
PsiValue psi_empirical(const IntPolynomialMap& p, std::int64_t q);

struct HuaThreshold {
  std::int64_t m;  // psi(q) < target for all q in (m, scan_bound]
  bool empirical;  // always true: nothing is certified beyond scan_bound
};
HuaThreshold hua_threshold(const IntPolynomialMap& p, double target,
                           std::int64_t scan_bound);

}  // namespace orbitspec
