#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "orbitspec/common.hpp"
#include "orbitspec/intpoly.hpp"
#include "orbitspec/valueset.hpp"

using namespace orbitspec;

namespace {

// independent brute-force image of Z/q under P
std::vector<std::int64_t> brute_values(const IntPolynomialMap& p, std::int64_t q) {
  std::set<std::int64_t> seen;
  for (std::int64_t n = 0; n < q; ++n) seen.insert(p.evaluate_mod({n}, q)[0]);
  return {seen.begin(), seen.end()};
}

}  // namespace

TEST_SUITE("valueset") {

TEST_CASE("squares modulo small primes") {
  auto p = IntPolynomialMap::parse("n^2");
  auto v7 = value_set_mod_prime(p, Int(7));
  CHECK(v7.residues == std::vector<std::int64_t>{0, 1, 2, 4});
  CHECK(value_set_mod_prime(p, Int(2)).residues == std::vector<std::int64_t>{0, 1});
  for (long pr : {3, 5, 7, 11, 13, 31, 97})
    CHECK(value_set_mod_prime(p, Int(pr)).residues.size() ==
          static_cast<std::size_t>((pr + 1) / 2));
  CHECK_THROWS_AS(value_set_mod_prime(p, Int(6)), UsageError);
}

TEST_CASE("cubes and a brute-force cross-check") {
  auto p = IntPolynomialMap::parse("n^3");
  CHECK(value_set_mod_prime(p, Int(7)).residues == std::vector<std::int64_t>{0, 1, 6});
  for (long pr : {2, 3, 5, 7, 11, 13, 17, 19})
    CHECK(value_set_mod_prime(p, Int(pr)).residues == brute_values(p, pr));
  auto mixed = IntPolynomialMap::parse("n^3 - 2*n + 5");
  for (long pr : {3, 5, 7, 11})
    CHECK(value_set_mod_prime(mixed, Int(pr)).residues == brute_values(mixed, pr));
}

TEST_CASE("deficient primes for the square map") {
  auto dp = find_deficient_primes(IntPolynomialMap::parse("n^2"), 4, Int(1000));
  CHECK(dp.lambda == make_rat(2, 3));
  REQUIRE(dp.primes.size() == 4);
  CHECK(dp.primes == std::vector<Int>{Int(3), Int(5), Int(7), Int(11)});
  CHECK(dp.value_set_sizes == std::vector<std::int64_t>{2, 3, 4, 6});
  // p = 2 is not deficient: both residues are squares
  CHECK(dp.primes.front() != 2);
  // certificate |V| <= lambda p holds exactly
  for (std::size_t i = 0; i < dp.primes.size(); ++i)
    CHECK(Int(dp.value_set_sizes[i]) * 3 <= 2 * dp.primes[i]);
}

TEST_CASE("deficient primes for the cube map") {
  auto dp = find_deficient_primes(IntPolynomialMap::parse("n^3"), 3, Int(1000));
  CHECK(dp.lambda == make_rat(5, 6));
  // cubes are deficient exactly at p = 1 mod 3
  CHECK(dp.primes == std::vector<Int>{Int(7), Int(13), Int(19)});
  CHECK(dp.value_set_sizes == std::vector<std::int64_t>{3, 5, 7});
}

TEST_CASE("deficient prime scan failures") {
  CHECK_THROWS_AS(find_deficient_primes(IntPolynomialMap::parse("n"), 2, Int(100)),
                  UsageError);  // degree < 2
  CHECK_THROWS_AS(find_deficient_primes(IntPolynomialMap::parse("n^2"), 100, Int(20)),
                  BoundError);  // scan bound too small
}

TEST_CASE("squarefree value sets via CRT") {
  auto p = IntPolynomialMap::parse("n^2");
  auto v35 = value_set_mod_squarefree(p, Int(35));
  CHECK(v35.residues.size() == 12);  // 4 * 3
  CHECK(v35.residues == brute_values(p, 35));
  auto v105 = value_set_mod_squarefree(p, Int(105));
  CHECK(v105.residues == brute_values(p, 105));
  CHECK_THROWS_AS(value_set_mod_squarefree(p, Int(12)), UsageError);
  // prime modulus degenerates to the prime case
  CHECK(value_set_mod_squarefree(p, Int(7)).residues ==
        value_set_mod_prime(p, Int(7)).residues);
}

TEST_CASE("depth-2 blueprint for the square map") {
  auto bp = build_counterexample(IntPolynomialMap::parse("n^2"), 2);
  CHECK(bp.depth == 2);
  CHECK(bp.lambda == make_rat(2, 3));
  CHECK(bp.primes == std::vector<Int>{Int(3), Int(5), Int(7)});
  CHECK(bp.moduli == std::vector<Int>{Int(3), Int(35)});
  CHECK(bp.period() == 105);
  CHECK(bp.value_sets[0] == std::vector<std::int64_t>{0, 1});
  CHECK(bp.sets[0] == std::vector<std::int64_t>{1});  // complement of -S = {0,2}
  CHECK(bp.value_sets[1].size() == 12);
  CHECK(bp.sets[1].size() == 23);
}

TEST_CASE("depth-3 blueprint hits the published level sizes") {
  auto bp = build_counterexample(IntPolynomialMap::parse("n^2"), 3);
  CHECK(bp.moduli == std::vector<Int>{Int(3), Int(35), Int(2431)});
  CHECK(bp.primes ==
        std::vector<Int>{Int(3), Int(5), Int(7), Int(11), Int(13), Int(17)});
  CHECK(bp.value_sets[2].size() == 378);  // 6 * 7 * 9
  CHECK(bp.sets[2].size() == 2053);
}

TEST_CASE("blueprint levels avoid zero after thickening") {
  for (int depth : {1, 2, 3}) {
    auto bp = build_counterexample(IntPolynomialMap::parse("n^2"), depth);
    for (int i = 0; i < depth; ++i) {
      std::int64_t q = to_i64(bp.moduli[i]);
      std::vector<bool> in_a(q, false), in_s(q, false);
      for (auto a : bp.sets[i]) in_a[a] = true;
      for (auto s : bp.value_sets[i]) in_s[s] = true;
      CHECK(bp.sets[i].size() + bp.value_sets[i].size() == static_cast<std::size_t>(q));
      bool zero_hit = false;
      for (auto a : bp.sets[i]) zero_hit = zero_hit || in_s[(q - a) % q];
      CHECK(!zero_hit);
    }
  }
}

TEST_CASE("blueprint rejects unsuitable polynomials") {
  CHECK_THROWS_AS(build_counterexample(IntPolynomialMap::parse("n"), 2), UsageError);
  CHECK_THROWS_AS(build_counterexample(IntPolynomialMap::parse("n^2 + 1"), 2), UsageError);
  CHECK_THROWS_AS(build_counterexample(IntPolynomialMap::parse("n^2"), 0), UsageError);
}

TEST_CASE("progression lengths at coprime levels") {
  auto bp = build_counterexample(IntPolynomialMap::parse("n^2"), 2);
  auto p1 = max_progression_length(bp, Int(1));
  CHECK(p1.level == 1);
  CHECK(p1.m == 2);  // A_1 + S(3) = {1,2}
  CHECK(p1.witness == 1);

  auto p3 = max_progression_length(bp, Int(3));
  CHECK(p3.level == 2);  // gcd(3,3)=3 pushes to the 35-level
  // independent oracle at the chosen level
  std::int64_t q = 35;
  std::vector<bool> thick(q, false);
  for (auto a : bp.sets[1])
    for (auto s : bp.value_sets[1]) thick[(a + s) % q] = true;
  CHECK(!thick[0]);
  std::int64_t best = 0, best_start = 0, run = 0;
  for (std::int64_t x = 1; x < q; ++x) {
    if (thick[(3 * x) % q]) {
      if (++run > best) {
        best = run;
        best_start = x - run + 1;
      }
    } else {
      run = 0;
    }
  }
  CHECK(p3.m == best);
  CHECK(p3.witness == (3 * best_start) % q);

  CHECK_THROWS_AS(max_progression_length(bp, Int(15)), BoundError);
  auto bp3 = build_counterexample(IntPolynomialMap::parse("n^2"), 3);
  CHECK(max_progression_length(bp3, Int(15)).level == 3);  // 2431 is coprime to 15
}

TEST_CASE("base points and return times") {
  auto bp = build_counterexample(IntPolynomialMap::parse("n^2"), 2);
  auto base = default_base_point(bp);
  REQUIRE(base.size() == 2);
  CHECK(base[0] == 1);
  CHECK(Int(bp.sets[1].front()) == base[1]);

  auto rt = return_time_set(bp, base, Int(0), Int(105));
  CHECK(rt.size() == 23);  // |A_1| * |A_2| by CRT over one full period
  for (const auto& n : rt) {
    std::int64_t n64 = to_i64(n);
    bool ok1 = std::binary_search(bp.sets[0].begin(), bp.sets[0].end(),
                                  (to_i64(base[0]) + n64) % 3);
    bool ok2 = std::binary_search(bp.sets[1].begin(), bp.sets[1].end(),
                                  (to_i64(base[1]) + n64) % 35);
    CHECK(ok1);
    CHECK(ok2);
  }
  CHECK(return_time_set(bp, base, Int(0), Int(1)).size() == 1);  // 0 itself
  CHECK_THROWS_AS(return_time_set(bp, {Int(1)}, Int(0), Int(10)), UsageError);
}

TEST_CASE("level refutation matches the run bound") {
  auto bp = build_counterexample(IntPolynomialMap::parse("n^2"), 2);
  auto r = pinned_refute_level(bp, Int(1), Int(2));
  CHECK(r.level == 1);
  CHECK(r.pair_count == 1);  // |A_1|^2
  CHECK(r.refuted);
  CHECK(r.m_prime == 1);  // pair (1,1): 1+1=2 not in {1}+P({0})
  CHECK(r.covering_pair.empty());

  // m = 0 is vacuously covered
  auto r0 = pinned_refute_level(bp, Int(1), Int(0));
  CHECK(!r0.refuted);
  CHECK(!r0.covering_pair.empty());

  // pattern-run link: refutation is guaranteed at m = longest run, every k
  for (long k = 1; k <= 8; ++k) {
    auto pl = max_progression_length(bp, Int(k));
    auto rr = pinned_refute_level(bp, Int(k), pl.m);
    CHECK(rr.refuted);
    CHECK(rr.m_prime <= pl.m);
    CHECK(rr.worst_pair.size() == 2);
  }
}

}  // TEST_SUITE
