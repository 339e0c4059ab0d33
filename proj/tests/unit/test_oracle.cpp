#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "cantor/errors.hpp"
#include "cantor/oracle.hpp"
#include "cantor/rng.hpp"
#include "cantor/schedule.hpp"
#include "cantor/sphere.hpp"
#include "cantor/tower.hpp"
#include "support/fixtures.hpp"

using namespace cantor;

namespace {

double rel_gap(cplx x, cplx y) { return std::abs(x - y) / (1.0 + std::abs(x)); }

}  // namespace

TEST_CASE("expanded coefficient pairs match closed forms at shallow levels") {
  ParameterSchedule s = fixtures::schedule(20260822ull, 4);
  RationalTower t = fixtures::tower(s);
  const cplx a1 = s.a[1], a2 = s.a[2];
  const double e1 = s.eps[1], e2 = s.eps[2];

  PolyPair p0 = oracle_expand(t, 0);
  REQUIRE(p0.num.size() == 2);
  CHECK(p0.num[0] == cplx{0.0, 0.0});
  CHECK(p0.num[1] == cplx{1.0, 0.0});
  REQUIRE(p0.den.size() == 1);
  CHECK(p0.den[0] == cplx{1.0, 0.0});

  PolyPair p1 = oracle_expand(t, 1);
  REQUIRE(p1.num.size() == 1);
  CHECK(p1.num[0] == cplx{e1, 0.0});
  REQUIRE(p1.den.size() == 2);
  CHECK(std::abs(p1.den[0] - (-a1)) == 0.0);
  CHECK(p1.den[1] == cplx{1.0, 0.0});
  std::vector<cplx> r1 = oracle_den_roots(p1);
  REQUIRE(r1.size() == 1);
  CHECK(std::abs(r1[0] - a1) < 1e-14 * std::abs(a1));

  // q_2 = e1 - a2 (z - a1),  p_2 = z (e1 - a2 (z - a1)) + e2 (z - a1)
  PolyPair p2 = oracle_expand(t, 2);
  REQUIRE(p2.den.size() == 2);
  CHECK(rel_gap(p2.den[0], e1 + a2 * a1) < 1e-15);
  CHECK(rel_gap(p2.den[1], -a2) < 1e-15);
  REQUIRE(p2.num.size() == 3);
  CHECK(rel_gap(p2.num[0], -e2 * a1) < 1e-15);
  CHECK(rel_gap(p2.num[1], e1 + a2 * a1 + e2) < 1e-15);
  CHECK(rel_gap(p2.num[2], -a2) < 1e-15);

  // the unique finite pole of r_2
  std::vector<cplx> r2 = oracle_den_roots(p2);
  REQUIRE(r2.size() == 1);
  CHECK(std::abs(r2[0] - (a1 + e1 / a2)) < 1e-13);

  // snapshot Horner agrees with the wide evaluator where doubles are healthy
  for (cplx z : {cplx{0.3, -1.2}, cplx{2.5, 0.4}, cplx{-4.0, 3.0}}) {
    EvalResult v = oracle_value(p2, z);
    REQUIRE(!v.infinite);
    cplx snap = poly_eval(p2.num, z) / poly_eval(p2.den, z);
    CHECK(rel_gap(v.value, snap) < 1e-12);
  }
}

TEST_CASE("degree law, root census, and pole matching across all levels") {
  ParameterSchedule s = fixtures::schedule(20260822ull, 12);
  RationalTower t = fixtures::tower(s);

  for (int n = 0; n <= 8; ++n) {
    CAPTURE(n);
    PolyPair pq = oracle_expand(t, n);
    CHECK(pq.level == n);
    const int kn = static_cast<int>(pole_count_expected(n));

    // Denominator degree: k_n finite poles for odd n; for even n the point
    // at infinity is one of the k_n poles and shows up as a degree deficit.
    const int expected_den = n % 2 == 0 ? kn - 1 : kn;
    CHECK(poly_degree(pq.den) == expected_den);
    if (n % 2 == 0)
      CHECK(poly_degree(pq.num) == kn);  // value is ~z at infinity
    else
      CHECK(poly_degree(pq.num) < kn);  // value decays at infinity

    if (n == 0) continue;
    std::vector<cplx> roots = oracle_den_roots(pq);
    CHECK(static_cast<int>(roots.size()) == expected_den);

    // every tracked finite pole sits on a certified denominator root
    double mismatch = max_pole_root_mismatch(t, pq);
    CHECK(mismatch < 1e-8);
    // away from the deepest pole clusters the match is near machine level
    if (n <= 7) CHECK(mismatch < 1e-12);
  }

  // the expansion is deterministic: identical coefficients on repeat
  PolyPair x = oracle_expand(t, 5), y = oracle_expand(t, 5);
  REQUIRE(x.den.size() == y.den.size());
  for (size_t i = 0; i < x.den.size(); ++i) CHECK(x.den[i] == y.den[i]);
  std::vector<cplx> rx = oracle_den_roots(x), ry = oracle_den_roots(y);
  REQUIRE(rx.size() == ry.size());
  for (size_t i = 0; i < rx.size(); ++i) CHECK(rx[i] == ry[i]);
}

TEST_CASE("recursive and expanded evaluation agree at random points") {
  ParameterSchedule s = fixtures::schedule(20260822ull, 12);
  RationalTower t = fixtures::tower(s);

  for (int n = 0; n <= 8; ++n) {
    CAPTURE(n);
    PolyPair pq = oracle_expand(t, n);
    std::vector<cplx> roots = n == 0 ? std::vector<cplx>{} : oracle_den_roots(pq);

    Rng rng(20260822ull, n, "oracle-agreement");
    double worst = 0.0;
    int accepted = 0, attempts = 0;
    while (accepted < 200 && attempts < 20000) {
      ++attempts;
      double th = rng.uniform() * 2.0 * M_PI;
      double rad = std::exp(rng.uniform() * std::log(1e4));
      cplx z = std::polar(rad, th);
      bool near_pole = false;
      for (cplx r : roots)
        if (std::abs(z - r) < 0.01 * (1.0 + std::abs(r))) near_pole = true;
      if (near_pole) continue;
      EvalResult ov = oracle_value(pq, z);
      EvalResult tv = evaluate_global(t, n, z);
      REQUIRE(!ov.infinite);
      REQUIRE(!tv.infinite);
      worst = std::max(worst, rel_gap(ov.value, tv.value));
      ++accepted;
    }
    REQUIRE(accepted == 200);
    CHECK(worst < 1e-9);
  }
}

TEST_CASE("large-argument behavior separates even and odd parity") {
  ParameterSchedule s = fixtures::schedule(20260822ull, 8);
  RationalTower t = fixtures::tower(s);
  const cplx z = {7.7e7, 3.1e7};

  for (int n = 0; n <= 8; ++n) {
    CAPTURE(n);
    PolyPair pq = oracle_expand(t, n);
    EvalResult v = oracle_value(pq, z);
    REQUIRE(!v.infinite);
    if (n % 2 == 0)
      CHECK(std::abs(v.value - z) < 1.0);  // pole at infinity: value ~ z
    else
      CHECK(std::abs(v.value) < 1.0);  // zero at infinity
  }
}

TEST_CASE("expansion guards reject out-of-range and overflowing requests") {
  ParameterSchedule s = fixtures::schedule(20260822ull, 9);
  RationalTower t = fixtures::tower(s);
  CHECK_THROWS_AS(oracle_expand(t, -1), usage_error);
  CHECK_THROWS_AS(oracle_expand(t, 10), usage_error);   // outside the tower
  CHECK_THROWS_AS(oracle_expand(t, 9), usage_error);    // beyond expansion depth

  // a parameter scale whose level-2 expansion exceeds the coefficient gate
  RationalTower huge;
  huge.depth = 2;
  huge.a = {cplx{0, 0}, cplx{1e200, 0.0}, cplx{1e200, 0.0}};
  huge.eps = {0.0, 0.5, 0.25};
  try {
    oracle_expand(huge, 2);
    CHECK(false);
  } catch (const verification_error& e) {
    CHECK(std::string(e.what()).find("oracle-overflow") != std::string::npos);
  }

  // a pair without its wide backend cannot answer value/root queries
  PolyPair bare;
  bare.level = 2;
  bare.num = {cplx{1.0, 0.0}};
  bare.den = {cplx{1.0, 0.0}};
  CHECK_THROWS_AS(oracle_value(bare, cplx{0.5, 0.5}), usage_error);
  CHECK_THROWS_AS(oracle_den_roots(bare), usage_error);
}
