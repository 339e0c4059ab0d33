#include "cantor/regions.hpp"

#include <cmath>
#include <complex>
#include <vector>

#include "cantor/errors.hpp"
#include "cantor/schedule.hpp"
#include "cantor/tower.hpp"
#include "doctest.h"
#include "support/fixtures.hpp"

using namespace cantor;

namespace {

constexpr uint64_t kSeed = 20260822ull;

struct RegionsFixture {
  ParameterSchedule s;
  RationalTower t;
  std::vector<RegionDecomposition> ds;  // level n at ds[n-1], n = 1..8
};

const RegionsFixture& fx() {
  static const RegionsFixture f = [] {
    RegionsFixture r;
    r.s = fixtures::schedule(kSeed, 9);
    r.t = fixtures::tower(r.s);
    for (int n = 1; n <= 8; ++n) r.ds.push_back(decompose(r.t, n, r.s.R[n]));
    for (int n = 2; n <= 8; ++n)
      link_decompositions(r.t, r.ds[n - 2], r.ds[n - 1]);
    return r;
  }();
  return f;
}

}  // namespace

TEST_CASE("membership separates escaping and kept points at level one") {
  const auto& f = fx();
  const double R = f.s.R[1];

  // the origin keeps both coordinates small: r_0 = 0 and |r_1| = eps/|a_1|
  CHECK(membership(f.t, 1, R, make_point({0.0, 0.0})) == Membership::kept);
  // the pole of r_1 and the pole of r_0 escape
  CHECK(membership(f.t, 1, R, make_point(f.s.a[1])) == Membership::escape);
  CHECK(membership(f.t, 1, R, CPoint::infinity()) == Membership::escape);
  // far outside the escape radius, r_0 = z alone is enough
  CHECK(membership(f.t, 1, R, make_point({3.0 * R, 0.0})) ==
        Membership::escape);
  // just inside the radius, both coordinates stay moderate
  CHECK(membership(f.t, 1, R, make_point({0.5 * R, 0.0})) == Membership::kept);
}

TEST_CASE("level-one decomposition finds one island per pole") {
  const auto& f = fx();
  const RegionDecomposition& d = f.ds[0];
  REQUIRE(d.components.size() == 2);
  CHECK(d.horizontal_count == 1);
  CHECK(d.vertical_count == 1);
  CHECK(d.disjoint);
  CHECK(ScaledReal() < d.min_pair_gap);
  for (const ComponentRegion& c : d.components) {
    // orientation follows the birth parity of the anchoring pole
    CHECK(c.horizontal == (c.pole_birth % 2 == 0));
    CHECK(!c.cells.empty());
    CHECK(ScaledReal() < c.in_radius);
    CHECK(c.in_radius <= c.out_radius);
    CHECK(ScaledReal() < c.diam_lo);
    CHECK(c.diam_lo <= c.diam_hi);
    CHECK(c.diam_hi < ScaledReal(0.5));
    // the island contains a disk and fits in a disk of comparable size
    CHECK(c.out_radius < 4.0 * c.in_radius);
  }
}

TEST_CASE("component census and orientation follow the pole counts") {
  const auto& f = fx();
  for (int n = 1; n <= 8; ++n) {
    const RegionDecomposition& d = f.ds[n - 1];
    CAPTURE(n);
    REQUIRE(static_cast<int64_t>(d.components.size()) == b_count(n));
    int64_t expect_h = n % 2 == 0 ? fib_k(n) : fib_k(n - 1);
    int64_t expect_v = n % 2 == 0 ? fib_k(n - 1) : fib_k(n);
    CHECK(d.horizontal_count == expect_h);
    CHECK(d.vertical_count == expect_v);
    CHECK(d.disjoint);
    CHECK(ScaledReal() < d.min_pair_gap);
    for (const ComponentRegion& c : d.components)
      CHECK(c.horizontal == (c.pole_birth % 2 == 0));
  }
}

TEST_CASE("certified diameters shrink below the contraction bound") {
  const auto& f = fx();
  for (int n = 1; n <= 8; ++n) {
    const double bound = std::pow(static_cast<double>(b_count(n)), -n);
    CAPTURE(n);
    for (const ComponentRegion& c : f.ds[n - 1].components) {
      CAPTURE(c.id);
      CHECK(c.diam_hi < ScaledReal(bound));
      CHECK(ScaledReal() < c.diam_lo);
    }
  }
}

TEST_CASE("consecutive levels nest with positive margins") {
  const auto& f = fx();
  for (int n = 2; n <= 8; ++n) {
    NestingReport rep = check_nesting(f.t, f.ds[n - 2], f.ds[n - 1]);
    CAPTURE(n);
    CHECK(rep.ok);
    CHECK(ScaledReal() < rep.min_margin);
    // margins clear the refinement resolution decisively
    CHECK(ScaledReal(1.0) < rep.min_margin_over_tol);
  }
}

TEST_CASE("parent links are total and anchored correctly") {
  const auto& f = fx();
  const RegionDecomposition& d2 = f.ds[1];
  for (const ComponentRegion& c : d2.components) {
    REQUIRE(c.parent >= 0);
    const ComponentRegion& par = f.ds[0].components[c.parent];
    if (c.pole_birth == 2)  // newborn: parent island anchored at its pole's parent
      CHECK(par.anchor == f.t.nodes[c.anchor].parent);
    else
      CHECK(par.anchor == c.anchor);
  }
}

TEST_CASE("split report: counts, types, and newborn loci") {
  const auto& f = fx();
  for (int n = 1; n <= 7; ++n) {
    SplitReport rep = split_report(f.t, f.ds[n - 1], f.ds[n]);
    CAPTURE(n);
    CHECK(rep.total);
    CHECK(rep.types_ok);
    CHECK(rep.counts_ok);
    CHECK(rep.shrink_count == fib_k(n - 1));
    CHECK(rep.split_count == fib_k(n));
    CHECK(rep.locus_ok);
    // the sampled shift ratio concentrates at one half by design
    CHECK(rep.worst_locus_ratio > 0.4);
    CHECK(rep.worst_locus_ratio < 0.6);
  }
}

TEST_CASE("radius certificates accept working radii and name failures") {
  const auto& f = fx();
  CHECK(certify_radius(f.t, 1, f.s.R[1], kSeed) == "");
  CHECK(certify_radius(f.t, 2, f.s.R[2], kSeed) == "");
  CHECK(certify_radius(f.t, 3, f.s.R[3], kSeed) == "");
  // far too small: the unbounded island violates the diameter bound
  CHECK(certify_radius(f.t, 1, f.s.R[1] / 4.0, kSeed) == "component-diameter");
  // small enough that islands merge: some certificate must fail
  CHECK(certify_radius(f.t, 3, f.s.R[3] / 8.0, kSeed) != "");
}

TEST_CASE("boundary and shell samples sit on the verified sides") {
  const auto& f = fx();
  const int n = 3;
  const RegionDecomposition& d = f.ds[n - 1];

  std::vector<AnchoredPoint> boundary = sample_kept_boundary(f.t, d);
  REQUIRE(boundary.size() > d.components.size());
  for (size_t i = 0; i < boundary.size(); i += 37) {
    EvalResult hi = evaluate_at(f.t, n, boundary[i]);
    EvalResult lo = evaluate_at(f.t, n - 1, boundary[i]);
    REQUIRE(!hi.infinite);
    REQUIRE(!lo.infinite);
    CHECK(std::abs(hi.value) <= d.R);
    CHECK(std::abs(lo.value) <= d.R);
  }

  std::vector<AnchoredPoint> shell = sample_shell(f.t, f.ds[n - 2], d, 16);
  CHECK(shell.size() == 16 * d.components.size());
  for (size_t i = 0; i < shell.size(); i += 11) {
    // kept at level n, escaping at level n-1
    EvalResult hi = evaluate_at(f.t, n, shell[i]);
    EvalResult lo1 = evaluate_at(f.t, n - 1, shell[i]);
    REQUIRE(!hi.infinite);
    CHECK(std::abs(hi.value) <= d.R);
    bool escapes_coarse =
        lo1.infinite || std::abs(lo1.value) > f.ds[n - 2].R ||
        [&] {
          EvalResult lo2 = evaluate_at(f.t, n - 2, shell[i]);
          return lo2.infinite || std::abs(lo2.value) > f.ds[n - 2].R;
        }();
    CHECK(escapes_coarse);
  }
}

TEST_CASE("random kept samples agree with global membership") {
  const auto& f = fx();
  const int n = 2;
  std::vector<AnchoredPoint> pts =
      sample_kept_random(f.t, n, f.s.R[n], 200, kSeed);
  REQUIRE(pts.size() == 200);
  for (const AnchoredPoint& p : pts) {
    REQUIRE(p.node < 0);
    CHECK(membership(f.t, n, f.s.R[n], p.global) == Membership::kept);
  }
}

TEST_CASE("anchored evaluation matches global evaluation") {
  const auto& f = fx();
  // a macroscopic offset from the level-1 pole lands at a collapsible point
  int node = f.t.level_poles[1][0];
  ScaledComplex off{cplx{0.2, -0.1}};
  AnchoredPoint local{node, off, CPoint{}};
  cplx z = node_chart_position(f.t, node).to_cplx() + cplx{0.2, -0.1};
  for (int n = 1; n <= 4; ++n) {
    EvalResult a = evaluate_at(f.t, n, local);
    EvalResult b = evaluate_global(f.t, n, z);
    REQUIRE(!a.infinite);
    REQUIRE(!b.infinite);
    CHECK(std::abs(a.value - b.value) <= 1e-9 * (1.0 + std::abs(b.value)));
  }
}

TEST_CASE("decomposition is deterministic and budget failures throw") {
  const auto& f = fx();
  RegionDecomposition again = decompose(f.t, 3, f.s.R[3]);
  const RegionDecomposition& first = f.ds[2];
  REQUIRE(again.components.size() == first.components.size());
  for (size_t i = 0; i < again.components.size(); ++i) {
    const ComponentRegion& a = again.components[i];
    const ComponentRegion& b = first.components[i];
    CHECK(a.anchor == b.anchor);
    CHECK(a.cells.size() == b.cells.size());
    CHECK(a.diam_hi.m == b.diam_hi.m);
    CHECK(a.diam_hi.e == b.diam_hi.e);
  }
  CHECK_THROWS_AS(decompose(f.t, 8, f.s.R[8], 3), verification_error);
  CHECK_THROWS_AS(decompose(f.t, 0, f.s.R[1]), usage_error);
  CHECK_THROWS_AS(decompose(f.t, 1, 0.5), usage_error);
}
