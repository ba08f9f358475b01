#include <doctest.h>

#include <vector>

#include "orbitspec/common.hpp"
#include "orbitspec/intpoly.hpp"

using namespace orbitspec;

namespace {

std::vector<Int> ints(std::initializer_list<long> xs) {
  std::vector<Int> out;
  for (long x : xs) out.emplace_back(x);
  return out;
}

}  // namespace

TEST_SUITE("intpoly") {

TEST_CASE("parser reads powers, products, and signs") {
  auto p = IntPolynomialMap::parse("n^2");
  CHECK(p.arity() == 1);
  CHECK(p.dim() == 1);
  CHECK(p.degree() == 2);
  CHECK(p.evaluate(ints({3})) == ints({9}));
  CHECK(p.evaluate(ints({-3})) == ints({9}));

  auto q = IntPolynomialMap::parse("x0 - 2*x1 + x0^2*x1; -x1^3");
  CHECK(q.arity() == 2);
  CHECK(q.dim() == 2);
  CHECK(q.degree() == 3);
  CHECK(q.evaluate(ints({2, -1})) == ints({0, 1}));
  CHECK(q.evaluate(ints({0, 0})) == ints({0, 0}));

  auto c = IntPolynomialMap::parse("7");
  CHECK(c.degree() == 0);
  CHECK(c.evaluate(ints({5})) == ints({7}));

  CHECK(IntPolynomialMap::parse("2*n^2 - n").evaluate(ints({4})) == ints({28}));
  CHECK_THROWS_AS(IntPolynomialMap::parse("2n^2"), UsageError);
  CHECK(IntPolynomialMap::parse("n*n*n").evaluate(ints({2})) == ints({8}));
}

TEST_CASE("parser rejects malformed input") {
  CHECK_THROWS_AS(IntPolynomialMap::parse(""), UsageError);
  CHECK_THROWS_AS(IntPolynomialMap::parse("2 3"), UsageError);
  CHECK_THROWS_AS(IntPolynomialMap::parse("x0^"), UsageError);
  CHECK_THROWS_AS(IntPolynomialMap::parse("x0 +"), UsageError);
  CHECK_THROWS_AS(IntPolynomialMap::parse("y1"), UsageError);
  CHECK_THROWS_AS(IntPolynomialMap::parse("x0;;x1"), UsageError);
  CHECK_THROWS_AS(IntPolynomialMap::parse("x0^-2"), UsageError);
}

TEST_CASE("to_string round-trips through the parser") {
  for (const char* text : {"n^2", "x0 - 2*x1 + x0^2*x1; -x1^3", "3", "n^4 - n", "x0*x1"}) {
    auto p = IntPolynomialMap::parse(text);
    auto q = IntPolynomialMap::parse(p.to_string());
    CHECK(p.to_string() == q.to_string());
    std::vector<Int> at(p.arity(), Int(2));
    CHECK(p.evaluate(at) == q.evaluate(at));
  }
}

TEST_CASE("evaluate_mod agrees with exact evaluation") {
  auto p = IntPolynomialMap::parse("x0^3 - 4*x0*x1 + 9; x1^2 - x0");
  for (long a = -3; a <= 3; ++a)
    for (long b = -3; b <= 3; ++b)
      for (std::int64_t m : {2, 7, 12}) {
        auto exact = p.evaluate(ints({a, b}));
        auto mod = p.evaluate_mod({a, b}, m);
        REQUIRE(exact.size() == mod.size());
        for (std::size_t i = 0; i < exact.size(); ++i)
          CHECK(mod_floor(exact[i], Int(m)) == Int(mod[i]));
      }
}

TEST_CASE("constant terms") {
  CHECK(IntPolynomialMap::parse("n^2 + 1").constant_term() == ints({1}));
  CHECK(IntPolynomialMap::parse("n^2 + 1").zero_constant_term() == false);
  CHECK(IntPolynomialMap::parse("n^2 - n").zero_constant_term() == true);
  CHECK(IntPolynomialMap::parse("x0; x1^2 - 5").constant_term() == ints({0, -5}));
}

TEST_CASE("currying keeps one variable and the coefficient multiset") {
  auto p = IntPolynomialMap::parse("x0*x1; x0 + x1^2");
  auto c = curry_to_single_variable(p);
  CHECK(c.arity() == 1);
  CHECK(c.dim() == 2);
  // x_j -> n^{3^{j+1}} for degree 2: x0 -> n^3, x1 -> n^9
  CHECK(c.evaluate(ints({1})) == p.evaluate(ints({1, 1})));
  auto v = c.evaluate(ints({2}));
  CHECK(v[0] == Int(1) << 12);  // 2^3 * 2^9
  std::size_t terms = 0;
  for (const auto& comp : c.components()) terms += comp.size();
  std::size_t orig_terms = 0;
  for (const auto& comp : p.components()) orig_terms += comp.size();
  CHECK(terms == orig_terms);
}

TEST_CASE("orbit rescaling divides P(kn) by k exactly") {
  auto p = IntPolynomialMap::parse("n^2");
  auto r = rescale_orbit(p, Int(4));
  CHECK(r.evaluate(ints({3})) == ints({36}));  // (4*3)^2 / 4
  auto s = rescale_orbit(IntPolynomialMap::parse("n^3 - n"), Int(2));
  CHECK(s.evaluate(ints({5})) == ints({(1000 - 10) / 2}));
  CHECK_THROWS_AS(rescale_orbit(IntPolynomialMap::parse("n^2 + 1"), Int(2)), UsageError);
}

TEST_CASE("component rank detects dependent components") {
  auto dep = component_rank(IntPolynomialMap::parse("x0; x0^2; x0 + x0^2"));
  CHECK(dep.rank == 2);
  REQUIRE(dep.kernel_witness.has_value());
  const auto& w = *dep.kernel_witness;
  auto p = IntPolynomialMap::parse("x0; x0^2; x0 + x0^2");
  for (long x = -4; x <= 4; ++x) {
    auto vals = p.evaluate(ints({x}));
    Int acc = 0;
    for (std::size_t i = 0; i < vals.size(); ++i) acc += w[i] * vals[i];
    CHECK(acc == 0);
  }
  Int g = 0;
  for (const auto& e : w) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), e.get_mpz_t());
  CHECK(g == 1);

  auto indep = component_rank(IntPolynomialMap::parse("x0; x0^2"));
  CHECK(indep.rank == 2);
  CHECK(!indep.kernel_witness.has_value());
}

TEST_CASE("linear degenerate combinations") {
  CHECK(!linear_degenerate_combination(IntPolynomialMap::parse("n^2")).has_value());
  CHECK(!linear_degenerate_combination(IntPolynomialMap::parse("n^2; n^3")).has_value());

  auto p = IntPolynomialMap::parse("x0; x1^2");
  auto comb = linear_degenerate_combination(p);
  REQUIRE(comb.has_value());
  CHECK(comb->alpha.size() == 2);
  CHECK(comb->beta.size() == 2);
  bool nonzero = false;
  for (const auto& a : comb->alpha) nonzero = nonzero || a != 0;
  CHECK(nonzero);
  for (long x = -3; x <= 3; ++x)
    for (long y = -3; y <= 3; ++y) {
      auto vals = p.evaluate(ints({x, y}));
      Int lhs = comb->alpha[0] * vals[0] + comb->alpha[1] * vals[1];
      Int rhs = comb->beta[0] * Int(x) + comb->beta[1] * Int(y);
      CHECK(lhs == rhs);
    }

  auto mixed = IntPolynomialMap::parse("x0 + x1^2; x1^2");
  auto mc = linear_degenerate_combination(mixed);
  REQUIRE(mc.has_value());
  for (long x = -2; x <= 2; ++x)
    for (long y = -2; y <= 2; ++y) {
      auto vals = mixed.evaluate(ints({x, y}));
      Int lhs = mc->alpha[0] * vals[0] + mc->alpha[1] * vals[1];
      Int rhs = mc->beta[0] * Int(x) + mc->beta[1] * Int(y);
      CHECK(lhs == rhs);
    }
}

}  // TEST_SUITE
