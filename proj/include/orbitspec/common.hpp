#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace orbitspec {

using Int = mpz_class;
using Rat = mpq_class;

// Bad input or precondition violation; CLI exit code 1.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Desk-scale computational bound exceeded; CLI exit code 2.
struct BoundError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A checked mathematical invariant failed; CLI exit code 3.
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

#define OSPEC_CHECK(cond, msg)                                            \
  do {                                                                    \
    if (!(cond))                                                          \
      throw ::orbitspec::InternalError(std::string("invariant: ") + (msg)); \
  } while (0)

// Runtime size guards; each field overridable via the matching
// ORBITSPEC_* environment variable (read once per process).
struct Limits {
  Int factor_bound{"1000000000000"};     // ORBITSPEC_FACTOR_BOUND
  std::int64_t max_space = 1 << 22;      // ORBITSPEC_MAX_SPACE: largest explicit state space
  std::int64_t max_enum = 8000000;       // ORBITSPEC_MAX_ENUM: generic enumeration cap
  std::int64_t tuple_cap = 60000000;     // ORBITSPEC_TUPLE_CAP: simplex tuples in volspec
  int step_cap = 64;                     // ORBITSPEC_STEP_CAP: increment_run iterations
  std::int64_t direction_cap = 4096;     // ORBITSPEC_DIRECTION_CAP: haystack scan length
  static const Limits& get();
};

Rat make_rat(const Int& num, const Int& den);
Rat make_rat(std::int64_t num, std::int64_t den);
std::string rational_string(const Rat& r);  // always "num/den"
Rat parse_rational(const std::string& s);   // "p/q" or "p"

Int floor_div(const Int& a, const Int& b);
Int mod_floor(const Int& a, const Int& b);  // representative in [0, |b|)
std::int64_t to_i64(const Int& v);          // BoundError when out of range
Int factorial(std::int64_t n);

std::int64_t mod_reduce(const Int& a, std::int64_t m);  // into [0, m)
std::int64_t mod_mul(std::int64_t a, std::int64_t b, std::int64_t m);
std::int64_t mod_pow(std::int64_t base, std::int64_t exp, std::int64_t m);
std::int64_t mod_inv(std::int64_t a, std::int64_t m);   // requires gcd(a, m) = 1

}  // namespace orbitspec
