#include <doctest.h>

#include <random>
#include <vector>

#include "orbitspec/bitset.hpp"
#include "orbitspec/common.hpp"
#include "orbitspec/modular.hpp"

using namespace orbitspec;

TEST_SUITE("modular") {

TEST_CASE("rational helpers normalize and print") {
  CHECK(make_rat(2, 4) == Rat(1, 2));
  CHECK(make_rat(1, -2) == Rat(-1, 2));
  CHECK(rational_string(Rat(3)) == "3/1");
  CHECK(rational_string(make_rat(-4, 6)) == "-2/3");
  CHECK(parse_rational("7") == Rat(7));
  CHECK(parse_rational("-3/6") == make_rat(-1, 2));
  CHECK_THROWS_AS(parse_rational("1/0"), UsageError);
  CHECK_THROWS_AS(parse_rational("a/b"), UsageError);
  CHECK_THROWS_AS(make_rat(1, 0), UsageError);
}

TEST_CASE("floor division and modulus") {
  CHECK(floor_div(Int(7), Int(2)) == 3);
  CHECK(floor_div(Int(-7), Int(2)) == -4);
  CHECK(mod_floor(Int(-7), Int(3)) == 2);
  CHECK(mod_floor(Int(7), Int(-3)) == 1);
  CHECK(mod_floor(Int(0), Int(5)) == 0);
}

TEST_CASE("64-bit conversion guards") {
  CHECK(to_i64(Int(-5)) == -5);
  Int big = Int(1) << 70;
  CHECK_THROWS_AS(to_i64(big), BoundError);
  CHECK(factorial(5) == 120);
  CHECK(factorial(0) == 1);
  CHECK(factorial(20) == Int("2432902008176640000"));
}

TEST_CASE("modular scalar arithmetic matches big-integer arithmetic") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 200; ++t) {
    std::int64_t m = 2 + static_cast<std::int64_t>(rng() % 4000000000ULL);
    std::int64_t a = static_cast<std::int64_t>(rng() % m);
    std::int64_t b = static_cast<std::int64_t>(rng() % m);
    CHECK(Int(mod_mul(a, b, m)) == mod_floor(Int(a) * Int(b), Int(m)));
  }
  CHECK(mod_pow(3, 0, 7) == 1);
  CHECK(mod_pow(2, 10, 1000) == 24);
  CHECK(mod_inv(3, 7) == 5);
  CHECK(mod_inv(1, 2) == 1);
  CHECK_THROWS_AS(mod_inv(2, 4), UsageError);
  CHECK(mod_reduce(Int(-1), 5) == 4);
  CHECK(mod_reduce(Int("123456789123456789"), 97) ==
        to_i64(mod_floor(Int("123456789123456789"), Int(97))));
}

TEST_CASE("torus points reduce into [0,1)") {
  CHECK(frac_part(make_rat(-1, 3)) == make_rat(2, 3));
  CHECK(frac_part(Rat(2)) == 0);
  TorusRational t({make_rat(5, 3), make_rat(7, 2)});
  CHECK(t.coords()[0] == make_rat(2, 3));
  CHECK(t.coords()[1] == make_rat(1, 2));
  CHECK(t.denom() == 6);
  CHECK(!t.is_zero());
  CHECK(TorusRational::zero(3).is_zero());
  CHECK(TorusRational::zero(2).denom() == 1);

  auto r = reduce_torus_point({{Int(5), Int(3)}, {Int(-1), Int(4)}});
  CHECK(r.coords()[0] == make_rat(2, 3));
  CHECK(r.coords()[1] == make_rat(3, 4));
  CHECK_THROWS_AS(reduce_torus_point({{Int(1), Int(0)}}), UsageError);
}

TEST_CASE("rational grid enumeration") {
  auto pts = enumerate_rat(Int(2), {Int(4), Int(2)});
  // nonzero points with lcm of reduced denominators <= 2 on (1/4)Z x (1/2)Z
  REQUIRE(pts.size() == 3);
  for (const auto& p : pts) {
    CHECK(!p.is_zero());
    CHECK(p.denom() <= 2);
  }
  CHECK(std::is_sorted(pts.begin(), pts.end()));

  auto all = enumerate_rat(Int(4), {Int(4)});
  CHECK(all.size() == 3);  // 1/4, 1/2, 3/4
}

TEST_CASE("chinese remainders") {
  CHECK(crt_combine({Int(1), Int(2)}, {Int(3), Int(5)}) == 7);
  CHECK(crt_combine({Int(0), Int(0), Int(0)}, {Int(2), Int(3), Int(5)}) == 0);
  CHECK(crt_combine({Int(1), Int(3), Int(4)}, {Int(2), Int(5), Int(7)}) == 53);
  CHECK_THROWS_AS(crt_combine({Int(1), Int(1)}, {Int(2), Int(4)}), UsageError);
}

TEST_CASE("factorization by trial division") {
  auto f = factorize(Int(360));
  CHECK(f.value() == 360);
  CHECK(!f.squarefree());
  REQUIRE(f.factors.size() == 3);
  CHECK(f.factors[0].first == 2);
  CHECK(f.factors[0].second == 3);
  CHECK(f.factors[2].first == 5);

  CHECK(factorize(Int(105)).squarefree());
  CHECK(factorize(Int(1)).factors.empty());
  CHECK(factorize(Int(97)).factors.size() == 1);

  CHECK(is_prime(Int(2)));
  CHECK(is_prime(Int(2431 / 11 / 13)));  // 17
  CHECK(!is_prime(Int(1)));
  CHECK(!is_prime(Int(2431)));
  int count = 0;
  for (int n = 2; n <= 100; ++n)
    if (is_prime(Int(n))) ++count;
  CHECK(count == 25);
}

TEST_CASE("bitset basics") {
  Bitset b(130);
  CHECK(b.size() == 130);
  CHECK(!b.any());
  b.set(0);
  b.set(64);
  b.set(129);
  CHECK(b.count() == 3);
  CHECK(b.test(64));
  CHECK(!b.test(63));
  b.reset(64);
  CHECK(b.count() == 2);
  Bitset c(130);
  c.set(0);
  c |= b;
  CHECK(c.count() == 2);
  c &= b;
  CHECK(c == b);
}

TEST_CASE("rotated union matches the naive rotation") {
  std::mt19937_64 rng(99);
  for (std::int64_t n : {1, 2, 63, 64, 65, 100, 127, 128, 129, 200}) {
    for (int trial = 0; trial < 8; ++trial) {
      Bitset src(n), expect(n), got(n);
      for (std::int64_t i = 0; i < n; ++i)
        if (rng() & 1) src.set(i);
      std::int64_t s = static_cast<std::int64_t>(rng() % static_cast<std::uint64_t>(n));
      for (std::int64_t i = 0; i < n; ++i)
        if (src.test(i)) expect.set((i + s) % n);
      or_rotated(got, src, s);
      CHECK(got == expect);
      // accumulate: a second rotation ORs on top
      std::int64_t s2 = (s + 1) % n;
      for (std::int64_t i = 0; i < n; ++i)
        if (src.test(i)) expect.set((i + s2) % n);
      or_rotated(got, src, s2);
      CHECK(got == expect);
    }
  }
}

}  // TEST_SUITE
