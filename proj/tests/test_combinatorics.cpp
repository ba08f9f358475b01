#include <doctest.h>

#include <algorithm>
#include <set>
#include <vector>

#include "orbitspec/combinatorics.hpp"
#include "orbitspec/common.hpp"
#include "orbitspec/intpoly.hpp"
#include "orbitspec/modular.hpp"

using namespace orbitspec;

namespace {

WindowedSet line_set(std::vector<long> xs, long lo, long hi) {
  std::vector<std::vector<Int>> members;
  for (long x : xs) members.push_back({Int(x)});
  return make_windowed_set({{Int(lo), Int(hi)}}, std::move(members));
}

WindowedSet plane_set(std::vector<std::pair<long, long>> pts,
                      std::pair<long, long> xw, std::pair<long, long> yw) {
  std::vector<std::vector<Int>> members;
  for (auto [x, y] : pts) members.push_back({Int(x), Int(y)});
  return make_windowed_set({{Int(xw.first), Int(xw.second)},
                            {Int(yw.first), Int(yw.second)}},
                           std::move(members));
}

// brute-force pinned coverage: does some y-shifted polynomial image cover jk + x?
bool brute_covers(const std::vector<Int>& e, const IntPolynomialMap& p, const Int& x,
                  const Int& y, const Int& j, const Int& k,
                  const std::optional<Int>& period) {
  for (const Int& a : e)
    for (const Int& b : e) {
      Int val = a + p.evaluate({b - y})[0];
      Int lhs = j * k + x;
      if (period) {
        if (mod_floor(val, *period) == mod_floor(lhs, *period)) return true;
      } else if (val == lhs) {
        return true;
      }
    }
  return false;
}

}  // namespace

TEST_SUITE("combinatorics") {

TEST_CASE("windowed set construction and membership") {
  auto e = line_set({0, 2, 5}, 0, 6);
  CHECK(e.dim == 1);
  CHECK(e.density() == make_rat(1, 2));
  CHECK(e.contains({Int(2)}));
  CHECK(!e.contains({Int(3)}));
  CHECK(!e.contains({Int(6)}));

  CHECK_THROWS_AS(make_windowed_set({{Int(3), Int(3)}}, {}), UsageError);
  CHECK_THROWS_AS(make_windowed_set({{Int(0), Int(2)}}, {{Int(5)}}), UsageError);
  // duplicates collapse
  auto d = make_windowed_set({{Int(0), Int(4)}}, {{Int(1)}, {Int(1)}, {Int(3)}});
  CHECK(d.members.size() == 2);
}

TEST_CASE("difference sets") {
  auto e = line_set({0, 1, 3}, 0, 4);
  auto d = difference_set(e);
  CHECK(d.dim == 1);
  CHECK(d.members.size() == 7);  // {-3..3}
  CHECK(d.contains({Int(-3)}));
  CHECK(d.contains({Int(0)}));
  CHECK(d.contains({Int(3)}));
  CHECK(d.window.front().first == -3);
  CHECK(d.window.front().second == 4);

  auto p = plane_set({{0, 0}, {1, 2}}, {0, 2}, {0, 3});
  auto dp = difference_set(p);
  CHECK(dp.members.size() == 3);  // (0,0), (1,2), (-1,-2)
  CHECK(dp.contains({Int(-1), Int(-2)}));
}

TEST_CASE("even numbers need k = 2 for the square map") {
  std::vector<long> evens;
  for (long x = 0; x < 200; x += 2) evens.push_back(x);
  auto e = line_set(evens, 0, 200);
  auto br = bogolyubov_min_k(e, IntPolynomialMap::parse("n^2"), Int(4), Int(5));
  REQUIRE(br.k.has_value());
  CHECK(*br.k == 2);
  CHECK(br.windowed_evidence);
  REQUIRE(!br.trail.empty());
  CHECK(br.trail.front().k == 1);
  CHECK(!br.trail.front().covered);
  // odd points are exactly refuted: even + even^2 can never be odd
  REQUIRE(!br.trail.front().uncovered_point.empty());
  CHECK(mpz_odd_p(br.trail.front().uncovered_point.front().get_mpz_t()));
}

TEST_CASE("full intervals are covered at k = 1") {
  std::vector<long> all;
  for (long x = 0; x < 40; ++x) all.push_back(x);
  auto e = line_set(all, 0, 40);
  auto br = bogolyubov_min_k(e, IntPolynomialMap::parse("n^2"), Int(3), Int(6));
  REQUIRE(br.k.has_value());
  CHECK(*br.k == 1);
}

TEST_CASE("volume spectra") {
  auto tri = plane_set({{0, 0}, {1, 0}, {0, 1}}, {0, 2}, {0, 2});
  CHECK(volspec(tri) == std::vector<Int>{Int(-1), Int(0), Int(1)});

  auto collinear = plane_set({{0, 0}, {1, 1}, {2, 2}, {3, 3}}, {0, 4}, {0, 4});
  CHECK(volspec(collinear) == std::vector<Int>{Int(0)});

  auto seg = line_set({0, 2, 5}, 0, 6);
  CHECK(volspec(seg) ==
        std::vector<Int>{Int(-5), Int(-3), Int(-2), Int(0), Int(2), Int(3), Int(5)});

  auto single = line_set({7}, 7, 8);
  CHECK(volspec(single) == std::vector<Int>{Int(0)});
}

TEST_CASE("volume coverage scans scaled rows") {
  std::vector<std::pair<long, long>> grid;
  for (long x = 0; x < 4; ++x)
    for (long y = 0; y < 4; ++y) grid.emplace_back(x, y);
  auto e = plane_set(grid, {0, 4}, {0, 4});
  auto spec = volspec(e);
  // the 4x4 grid realizes every determinant in [-9, 9]
  for (long v = -9; v <= 9; ++v) CHECK(std::binary_search(spec.begin(), spec.end(), Int(v)));
  CHECK(volspec_coverage(e, Int(1), Int(4)));  // 2*1*j for |j| <= 4
  CHECK(volspec_coverage(e, Int(2), Int(2)));  // 2*2*j for |j| <= 2
  CHECK(!volspec_coverage(e, Int(5), Int(1)));  // needs 10
  CHECK(!volspec_coverage(plane_set({{0, 0}, {2, 2}}, {0, 3}, {0, 3}), Int(1), Int(1)));
}

TEST_CASE("bohr sets agree with a direct scan") {
  Rat alpha = make_rat(408, 577);
  Rat eps = make_rat(1, 20);
  auto b = bohr_set(alpha, eps, Int(0), Int(40));
  std::vector<Int> expect;
  for (long n = 0; n < 40; ++n) {
    Rat x = frac_part(Rat(n) * alpha);
    Rat mirror = 1 - x;
    Rat dist = std::min(x, mirror);
    if (dist < eps) expect.emplace_back(n);
  }
  CHECK(b == expect);
  CHECK(!b.empty());
  CHECK(b.front() == 0);

  CHECK(bohr_set(make_rat(1, 3), make_rat(1, 3), Int(0), Int(9)) ==
        std::vector<Int>{Int(0), Int(3), Int(6)});
  CHECK_THROWS_AS(bohr_set(alpha, Rat(0), Int(0), Int(10)), UsageError);
}

TEST_CASE("pinned refutation over a full period, brute-checked") {
  auto p = IntPolynomialMap::parse("n^2");
  auto e = line_set({0, 1}, 0, 5);
  Int period(5);
  for (long k = 1; k <= 3; ++k) {
    for (long m = 1; m <= 6; ++m) {
      auto r = pinned_delta_refuter(e, p, Int(k), Int(m), period);
      CHECK(r.periodic);
      CHECK(r.pair_count == 4);
      bool expect_refuted = true;
      Int expect_mprime(0);
      std::vector<Int> cover;
      for (const auto& xv : e.members)
        for (const auto& yv : e.members) {
          Int first_fail(0);
          for (long j = 1; j <= m; ++j)
            if (!brute_covers({Int(0), Int(1)}, p, xv[0], yv[0], Int(j), Int(k), period)) {
              first_fail = j;
              break;
            }
          if (first_fail == 0) {
            expect_refuted = false;
            if (cover.empty()) cover = {xv[0], yv[0]};
          } else {
            expect_mprime = std::max(expect_mprime, first_fail);
          }
        }
      CHECK(r.refuted == expect_refuted);
      if (expect_refuted) CHECK(r.m_prime == expect_mprime);
      if (!expect_refuted) CHECK(!r.covering_pair.empty());
    }
  }
}

TEST_CASE("pinned refutation on a finite window, brute-checked") {
  auto p = IntPolynomialMap::parse("n^2");
  auto e = line_set({0, 1, 4}, 0, 5);
  for (long k = 1; k <= 2; ++k)
    for (long m = 1; m <= 4; ++m) {
      auto r = pinned_delta_refuter(e, p, Int(k), Int(m), std::nullopt);
      CHECK(!r.periodic);
      std::vector<Int> vals{Int(0), Int(1), Int(4)};
      bool expect_refuted = true;
      for (const auto& xv : e.members)
        for (const auto& yv : e.members) {
          bool all = true;
          for (long j = 1; j <= m && all; ++j)
            all = brute_covers(vals, p, xv[0], yv[0], Int(j), Int(k), std::nullopt);
          if (all) expect_refuted = false;
        }
      CHECK(r.refuted == expect_refuted);
    }
  // m = 0 is covered vacuously
  CHECK(!pinned_delta_refuter(e, p, Int(1), Int(0), std::nullopt).refuted);
}

TEST_CASE("degenerate appendix example certifies misses for every k") {
  auto p = IntPolynomialMap::parse("x0; x1^2");
  auto ac = appendix_necessity_check(p, make_rat(408, 577), make_rat(1, 20), Int(0),
                                     Int(120), Int(10), Int(6));
  CHECK(ac.fat_eps == make_rat(1, 5));
  CHECK(ac.comb.alpha == std::vector<Int>{Int(1), Int(0)});
  CHECK(ac.set_size > 0);
  REQUIRE(ac.uncovered.size() == 10);  // one certified miss per k
  for (std::size_t i = 0; i < ac.uncovered.size(); ++i) {
    CHECK(ac.uncovered[i].first == Int(static_cast<long>(i + 1)));
    // the recorded point really escapes the fat Bohr set
    Int km = ac.uncovered[i].second[0];
    Rat x = frac_part(Rat(km) * make_rat(408, 577));
    Rat mirror = 1 - x;
    Rat dist = std::min(x, mirror);
    CHECK(dist >= make_rat(1, 5));
  }
  CHECK(ac.none_certified);
  CHECK(!ac.bogolyubov.k.has_value());

  CHECK_THROWS_AS(appendix_necessity_check(IntPolynomialMap::parse("n^2"),
                                           make_rat(408, 577), make_rat(1, 20), Int(0),
                                           Int(40), Int(3), Int(3)),
                  UsageError);
}

}  // TEST_SUITE
