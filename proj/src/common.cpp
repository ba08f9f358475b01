#include "orbitspec/common.hpp"

#include <cstdlib>
#include <numeric>

namespace orbitspec {

namespace {

std::int64_t env_i64(const char* name, std::int64_t fallback) {
  const char* v = std::getenv(name);
  if (!v || !*v) return fallback;
  try {
    return std::stoll(v);
  } catch (const std::exception&) {
    throw UsageError(std::string(name) + ": not an integer: " + v);
  }
}

Limits load_limits() {
  Limits l;
  if (const char* v = std::getenv("ORBITSPEC_FACTOR_BOUND"); v && *v) l.factor_bound = Int(v);
  l.max_space = env_i64("ORBITSPEC_MAX_SPACE", l.max_space);
  l.max_enum = env_i64("ORBITSPEC_MAX_ENUM", l.max_enum);
  l.tuple_cap = env_i64("ORBITSPEC_TUPLE_CAP", l.tuple_cap);
  l.step_cap = static_cast<int>(env_i64("ORBITSPEC_STEP_CAP", l.step_cap));
  l.direction_cap = env_i64("ORBITSPEC_DIRECTION_CAP", l.direction_cap);
  return l;
}

}  // namespace

const Limits& Limits::get() {
  static const Limits limits = load_limits();
  return limits;
}

Rat make_rat(const Int& num, const Int& den) {
  if (den == 0) throw UsageError("zero denominator");
  Rat r(num, den);
  r.canonicalize();
  return r;
}

Rat make_rat(std::int64_t num, std::int64_t den) {
  return make_rat(Int(static_cast<long>(num)), Int(static_cast<long>(den)));
}

std::string rational_string(const Rat& r) {
  return r.get_num().get_str() + "/" + r.get_den().get_str();
}

Rat parse_rational(const std::string& s) {
  auto slash = s.find('/');
  try {
    if (slash == std::string::npos) return make_rat(Int(s), Int(1));
    return make_rat(Int(s.substr(0, slash)), Int(s.substr(slash + 1)));
  } catch (const std::invalid_argument&) {
    throw UsageError("bad rational: " + s);
  }
}

Int floor_div(const Int& a, const Int& b) {
  Int q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

Int mod_floor(const Int& a, const Int& b) {
  Int r, ab = abs(b);
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), ab.get_mpz_t());
  return r;
}

std::int64_t to_i64(const Int& v) {
  if (!v.fits_slong_p()) throw BoundError("value exceeds 64-bit range: " + v.get_str());
  return v.get_si();
}

Int factorial(std::int64_t n) {
  Int f;
  mpz_fac_ui(f.get_mpz_t(), static_cast<unsigned long>(n));
  return f;
}

std::int64_t mod_reduce(const Int& a, std::int64_t m) {
  return to_i64(mod_floor(a, Int(static_cast<long>(m))));
}

std::int64_t mod_mul(std::int64_t a, std::int64_t b, std::int64_t m) {
  return static_cast<std::int64_t>(static_cast<__int128>(a) * b % m);
}

std::int64_t mod_pow(std::int64_t base, std::int64_t exp, std::int64_t m) {
  if (m == 1) return 0;
  std::int64_t r = 1 % m;
  base %= m;
  if (base < 0) base += m;
  while (exp > 0) {
    if (exp & 1) r = mod_mul(r, base, m);
    base = mod_mul(base, base, m);
    exp >>= 1;
  }
  return r;
}

std::int64_t mod_inv(std::int64_t a, std::int64_t m) {
  std::int64_t g = m, x = 0, x1 = 1, b = a % m;
  if (b < 0) b += m;
  while (b != 0) {
    std::int64_t q = g / b;
    g -= q * b;
    std::swap(g, b);
    x -= q * x1;
    std::swap(x, x1);
  }
  if (g != 1) throw UsageError("not invertible: gcd != 1");
  x %= m;
  if (x < 0) x += m;
  return x;
}

}  // namespace orbitspec
