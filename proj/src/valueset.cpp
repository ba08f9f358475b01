#include "orbitspec/valueset.hpp"

#include <algorithm>
#include <numeric>
#include <utility>

#include "orbitspec/bitset.hpp"

namespace orbitspec {

namespace {

void require_orbit_poly(const IntPolynomialMap& p, const char* what) {
  if (p.arity() != 1 || p.dim() != 1)
    throw UsageError(std::string(what) + ": polynomial must map one variable to one value");
}

std::vector<std::int64_t> sorted_unique(std::vector<std::int64_t> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

// P(t) mod q for t = 0..q-1
std::vector<std::int64_t> value_table(const IntPolynomialMap& p, std::int64_t q) {
  std::vector<std::int64_t> table(static_cast<std::size_t>(q));
  for (std::int64_t t = 0; t < q; ++t) table[static_cast<std::size_t>(t)] = p.evaluate_mod({t}, q)[0];
  return table;
}

}  // namespace

ValueSet value_set_mod_prime(const IntPolynomialMap& p, const Int& prime) {
  require_orbit_poly(p, "value set");
  if (!is_prime(prime)) throw UsageError("value set: modulus is not prime");
  const std::int64_t q = to_i64(prime);
  if (q > Limits::get().max_enum) throw BoundError("value set: prime exceeds enumeration cap");
  return ValueSet{prime, sorted_unique(value_table(p, q))};
}

DeficientPrimes find_deficient_primes(const IntPolynomialMap& p, int count,
                                      const Int& scan_bound) {
  require_orbit_poly(p, "deficient primes");
  const std::int64_t deg = p.degree();
  if (deg < 2) throw UsageError("deficient primes: polynomial degree must be at least 2");
  if (count < 1) throw UsageError("deficient primes: count must be positive");
  // Quadratics hit exactly (p+1)/2 residues at odd primes, certified below at 2/3;
  // higher degrees get the non-permutation value-set bound 1 - 1/(2 deg).
  const Rat lambda = deg == 2 ? make_rat(2, 3) : make_rat(2 * deg - 1, 2 * deg);
  DeficientPrimes out{lambda, {}, {}};
  Int prime = 2;
  while (static_cast<int>(out.primes.size()) < count) {
    if (prime > scan_bound)
      throw BoundError("deficient primes: scan bound exhausted before finding enough primes");
    const ValueSet v = value_set_mod_prime(p, prime);
    const auto size = static_cast<std::int64_t>(v.residues.size());
    if (size < prime) {
      OSPEC_CHECK(Int(size) * lambda.get_den() <= lambda.get_num() * prime,
                  "deficient value set exceeds its lambda fraction");
      out.primes.push_back(prime);
      out.value_set_sizes.push_back(size);
    }
    mpz_nextprime(prime.get_mpz_t(), prime.get_mpz_t());
  }
  return out;
}

ValueSet value_set_mod_squarefree(const IntPolynomialMap& p, const Int& q) {
  require_orbit_poly(p, "value set");
  if (q < 2) throw UsageError("value set: modulus must be at least 2");
  const Factorization f = factorize(q);
  if (!f.squarefree()) throw UsageError("value set: modulus must be squarefree");

  std::vector<std::vector<std::int64_t>> parts;
  std::vector<Int> moduli;
  Int total = 1;
  for (const auto& [pr, e] : f.factors) {
    parts.push_back(value_set_mod_prime(p, pr).residues);
    moduli.push_back(pr);
    total *= static_cast<std::int64_t>(parts.back().size());
  }
  if (total > Limits::get().max_enum)
    throw BoundError("value set: combined value set exceeds enumeration cap");

  // CRT is a bijection Z/q -> prod Z/p_j, so |S(q)| = prod |V(P, p_j)|.
  const int levels = static_cast<int>(parts.size());
  std::vector<std::size_t> idx(static_cast<std::size_t>(levels), 0);
  std::vector<Int> residue(static_cast<std::size_t>(levels));
  std::vector<std::int64_t> values;
  values.reserve(static_cast<std::size_t>(to_i64(total)));
  while (true) {
    for (int j = 0; j < levels; ++j)
      residue[static_cast<std::size_t>(j)] =
          parts[static_cast<std::size_t>(j)][idx[static_cast<std::size_t>(j)]];
    values.push_back(to_i64(crt_combine(residue, moduli)));
    int j = levels - 1;
    while (j >= 0 && ++idx[static_cast<std::size_t>(j)] == parts[static_cast<std::size_t>(j)].size()) {
      idx[static_cast<std::size_t>(j)] = 0;
      --j;
    }
    if (j < 0) break;
  }
  values = sorted_unique(std::move(values));
  OSPEC_CHECK(Int(static_cast<std::int64_t>(values.size())) == total,
              "CRT collision while lifting value sets");

  if (q <= 10000) {
    const std::vector<std::int64_t> direct = sorted_unique(value_table(p, to_i64(q)));
    OSPEC_CHECK(direct == values, "lifted value set disagrees with direct enumeration");
  }
  return ValueSet{q, std::move(values)};
}

Int CounterexampleBlueprint::period() const {
  Int prod = 1;
  for (const Int& q : moduli) prod *= q;
  return prod;
}

CounterexampleBlueprint build_counterexample(const IntPolynomialMap& p, int depth) {
  require_orbit_poly(p, "counterexample");
  if (p.degree() < 2) throw UsageError("counterexample: polynomial degree must be at least 2");
  if (!p.zero_constant_term()) throw UsageError("counterexample: polynomial must vanish at 0");
  if (depth < 1) throw UsageError("counterexample: depth must be at least 1");

  const int need = depth * (depth + 1) / 2;
  const DeficientPrimes dp = find_deficient_primes(p, need, Int(100000));

  CounterexampleBlueprint bp{p, depth, dp.lambda, dp.primes, {}, {}, {}};
  // Level i consumes the next i primes: q_1 = p_1, q_2 = p_2 p_3, ...
  std::size_t next = 0;
  for (int i = 1; i <= depth; ++i) {
    Int q = 1;
    for (int j = 0; j < i; ++j) q *= dp.primes[next++];
    if (q > Limits::get().max_space)
      throw BoundError("counterexample: level modulus exceeds space cap");
    const std::int64_t qi = to_i64(q);

    const std::vector<std::int64_t> s = value_set_mod_squarefree(p, q).residues;
    std::vector<char> in_minus_s(static_cast<std::size_t>(qi), 0);
    for (std::int64_t v : s) in_minus_s[static_cast<std::size_t>((qi - v) % qi)] = 1;
    std::vector<std::int64_t> a;
    a.reserve(static_cast<std::size_t>(qi - static_cast<std::int64_t>(s.size())));
    for (std::int64_t x = 0; x < qi; ++x)
      if (!in_minus_s[static_cast<std::size_t>(x)]) a.push_back(x);

    // |S(q_i)| <= lambda^i q_i, hence |A_i| >= (1 - lambda^i) q_i.
    Int num_pow, den_pow;
    mpz_pow_ui(num_pow.get_mpz_t(), Int(bp.lambda.get_num()).get_mpz_t(),
               static_cast<unsigned long>(i));
    mpz_pow_ui(den_pow.get_mpz_t(), Int(bp.lambda.get_den()).get_mpz_t(),
               static_cast<unsigned long>(i));
    OSPEC_CHECK(Int(static_cast<std::int64_t>(s.size())) * den_pow <= num_pow * q,
                "level value set exceeds its lambda power fraction");
    OSPEC_CHECK(static_cast<std::int64_t>(a.size()) + static_cast<std::int64_t>(s.size()) == qi,
                "level set and negated value set fail to partition the level");
    OSPEC_CHECK(!a.empty(), "level set is empty");

    bp.moduli.push_back(q);
    bp.value_sets.push_back(s);
    bp.sets.push_back(std::move(a));
  }

  for (std::size_t i = 0; i < bp.moduli.size(); ++i)
    for (std::size_t j = i + 1; j < bp.moduli.size(); ++j) {
      Int g;
      mpz_gcd(g.get_mpz_t(), bp.moduli[i].get_mpz_t(), bp.moduli[j].get_mpz_t());
      OSPEC_CHECK(g == 1, "level moduli are not pairwise coprime");
    }
  return bp;
}

namespace {

// Smallest 1-based level whose modulus is coprime to k.
int coprime_level(const CounterexampleBlueprint& bp, const Int& k) {
  for (std::size_t i = 0; i < bp.moduli.size(); ++i) {
    Int g;
    mpz_gcd(g.get_mpz_t(), k.get_mpz_t(), bp.moduli[i].get_mpz_t());
    if (g == 1) return static_cast<int>(i) + 1;
  }
  throw BoundError("no level modulus is coprime to k; increase the depth");
}

// A_i + S(q_i) as a bitset over Z/q_i; never contains 0.
Bitset thickened_level_set(const CounterexampleBlueprint& bp, int level, std::int64_t q) {
  const auto& a = bp.sets[static_cast<std::size_t>(level - 1)];
  Bitset base(q);
  for (std::int64_t x : a) base.set(x);
  Bitset acc(q);
  for (std::int64_t s : bp.value_sets[static_cast<std::size_t>(level - 1)])
    or_rotated(acc, base, s);
  OSPEC_CHECK(!acc.test(0), "thickened level set contains 0");
  return acc;
}

}  // namespace

ProgressionLength max_progression_length(const CounterexampleBlueprint& bp, const Int& k) {
  if (k < 1) throw UsageError("progression length: k must be positive");
  const int level = coprime_level(bp, k);
  const std::int64_t q = to_i64(bp.moduli[static_cast<std::size_t>(level - 1)]);
  const Bitset thick = thickened_level_set(bp, level, q);

  // Runs of x with kx in A+S; 0 is never in A+S, so no run wraps around.
  const std::int64_t kq = mod_reduce(k, q);
  std::int64_t best = 0, best_start = 0, run = 0, y = 0;
  for (std::int64_t x = 1; x < q; ++x) {
    y += kq;
    if (y >= q) y -= q;
    if (thick.test(y)) {
      if (++run > best) {
        best = run;
        best_start = x - run + 1;
      }
    } else {
      run = 0;
    }
  }
  return ProgressionLength{level, Int(best), Int(mod_mul(kq, best_start, q))};
}

std::vector<Int> default_base_point(const CounterexampleBlueprint& bp) {
  std::vector<Int> x;
  for (const auto& a : bp.sets) x.emplace_back(a.front());
  return x;
}

std::vector<Int> return_time_set(const CounterexampleBlueprint& bp,
                                 const std::vector<Int>& x, const Int& lo, const Int& hi) {
  if (static_cast<int>(x.size()) != bp.depth)
    throw UsageError("return times: base point dimension mismatch");
  if (hi - lo > Limits::get().max_enum)
    throw BoundError("return times: window exceeds enumeration cap");

  const int depth = bp.depth;
  std::vector<std::int64_t> q(static_cast<std::size_t>(depth));
  std::vector<Bitset> member;
  std::vector<std::int64_t> cursor(static_cast<std::size_t>(depth));
  for (int i = 0; i < depth; ++i) {
    q[static_cast<std::size_t>(i)] = to_i64(bp.moduli[static_cast<std::size_t>(i)]);
    Bitset b(q[static_cast<std::size_t>(i)]);
    for (std::int64_t v : bp.sets[static_cast<std::size_t>(i)]) b.set(v);
    member.push_back(std::move(b));
    cursor[static_cast<std::size_t>(i)] =
        mod_reduce(x[static_cast<std::size_t>(i)] + lo, q[static_cast<std::size_t>(i)]);
  }

  std::vector<Int> times;
  for (Int n = lo; n < hi; ++n) {
    bool all = true;
    for (int i = 0; i < depth && all; ++i)
      all = member[static_cast<std::size_t>(i)].test(cursor[static_cast<std::size_t>(i)]);
    if (all) times.push_back(n);
    for (int i = 0; i < depth; ++i) {
      auto& c = cursor[static_cast<std::size_t>(i)];
      if (++c == q[static_cast<std::size_t>(i)]) c = 0;
    }
  }
  return times;
}

LevelRefutation pinned_refute_level(const CounterexampleBlueprint& bp, const Int& k,
                                    const Int& m) {
  if (k < 1) throw UsageError("pinned refutation: k must be positive");
  if (m < 0) throw UsageError("pinned refutation: m must be nonnegative");
  const int level = coprime_level(bp, k);
  const std::int64_t q = to_i64(bp.moduli[static_cast<std::size_t>(level - 1)]);
  const auto& a = bp.sets[static_cast<std::size_t>(level - 1)];
  const std::int64_t mm = to_i64(m);
  const std::int64_t kq = mod_reduce(k, q);

  LevelRefutation out{level, bp.moduli[static_cast<std::size_t>(level - 1)],
                      static_cast<std::int64_t>(a.size()) * static_cast<std::int64_t>(a.size()),
                      true, Int(0), {}, {}};
  if (mm == 0) {
    // Nothing to cover: every pair covers {k..0} vacuously.
    out.refuted = false;
    if (!a.empty()) out.covering_pair = {Int(a.front()), Int(a.front())};
    return out;
  }

  const std::vector<std::int64_t> ptable = value_table(bp.poly, q);
  Bitset base(q);
  for (std::int64_t x : a) base.set(x);

  std::int64_t worst_j = 0;
  std::vector<Int> worst_pair;
  for (std::int64_t beta : a) {
    // W_beta = { a' + P(b'' - beta) mod q : a', b'' in A }
    std::vector<std::int64_t> shifts;
    shifts.reserve(a.size());
    for (std::int64_t b2 : a)
      shifts.push_back(ptable[static_cast<std::size_t>((b2 - beta + q) % q)]);
    shifts = sorted_unique(std::move(shifts));
    Bitset covered(q);
    for (std::int64_t s : shifts) or_rotated(covered, base, s);

    for (std::int64_t alpha : a) {
      std::int64_t y = alpha;
      std::int64_t fail_j = 0;
      for (std::int64_t j = 1; j <= mm; ++j) {
        y += kq;
        if (y >= q) y -= q;
        if (!covered.test(y)) {
          fail_j = j;
          break;
        }
      }
      if (fail_j == 0) {
        out.refuted = false;
        out.covering_pair = {Int(alpha), Int(beta)};
        out.m_prime = 0;
        return out;
      }
      if (fail_j > worst_j) {
        worst_j = fail_j;
        worst_pair = {Int(alpha), Int(beta)};
      }
    }
  }
  out.m_prime = worst_j;
  out.worst_pair = std::move(worst_pair);
  return out;
}

}  // namespace orbitspec
