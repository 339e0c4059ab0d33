#include "cantor/cantor_set.hpp"

#include <cmath>
#include <set>
#include <vector>

#include "cantor/errors.hpp"
#include "cantor/schedule.hpp"
#include "cantor/tower.hpp"
#include "doctest.h"
#include "support/fixtures.hpp"

using namespace cantor;

namespace {

constexpr uint64_t kSeed = 20260822ull;

struct CantorFixture {
  ParameterSchedule s;
  RationalTower t;
  std::vector<RegionDecomposition> ds;  // level n at ds[n-1], n = 1..8
  std::vector<CantorApprox> ladder;     // depths 2..8
};

const CantorFixture& fx() {
  static const CantorFixture f = [] {
    CantorFixture r;
    r.s = fixtures::schedule(kSeed, 9);
    r.t = fixtures::tower(r.s);
    for (int n = 1; n <= 8; ++n) r.ds.push_back(decompose(r.t, n, r.s.R[n]));
    for (int n = 2; n <= 8; ++n)
      link_decompositions(r.t, r.ds[n - 2], r.ds[n - 1]);
    for (int N = 2; N <= 8; ++N)
      r.ladder.push_back(build_approx(r.t, N, r.ds));
    return r;
  }();
  return f;
}

}  // namespace

TEST_CASE("witness counts follow the pole ledger") {
  const auto& f = fx();
  // depth 1: the plain pole and the point at infinity
  CantorApprox a1 = build_approx(f.t, 1, f.ds);
  CHECK(a1.witnesses.size() == 2);
  // depth 3: b_3 = k_4 = 5
  CHECK(f.ladder[1].witnesses.size() == 5);
  // each new level adds exactly the newborn poles of that level, which
  // number k_{N-1} (so the totals walk the Fibonacci ledger b_N = k_{N+1})
  for (int N = 2; N <= 8; ++N) {
    const CantorApprox& ap = f.ladder[N - 2];
    CHECK(ap.depth == N);
    CHECK(static_cast<int64_t>(ap.witnesses.size()) == b_count(N));
    if (N >= 3) {
      int64_t added = static_cast<int64_t>(ap.witnesses.size()) -
                      static_cast<int64_t>(f.ladder[N - 3].witnesses.size());
      CHECK(added == fib_k(N - 1));
    }
  }
}

TEST_CASE("witness sets grow strictly and stay inside components") {
  const auto& f = fx();
  std::set<int> prev;
  for (const CantorApprox& ap : f.ladder) {
    std::set<int> cur;
    for (const AnchoredPoint& w : ap.witnesses) {
      REQUIRE(w.node >= 0);
      cur.insert(w.node);
    }
    CHECK(cur.size() == ap.witnesses.size());
    CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
    CHECK(cur.size() > prev.size());
    prev = cur;

    // anchors of the level-N islands are exactly the witnesses
    std::set<int> anchors;
    for (const ComponentRegion& comp : ap.components.components)
      anchors.insert(comp.anchor);
    CHECK(anchors == cur);
  }
}

TEST_CASE("per-level diameter maxima decay below the contraction law") {
  const auto& f = fx();
  const CantorApprox& ap = f.ladder.back();
  REQUIRE(ap.level_max_diam.size() == 8);
  for (int n = 1; n <= 8; ++n) {
    double b = static_cast<double>(b_count(n));
    CHECK(ap.level_max_diam[n - 1].log2_abs() < -n * std::log2(b));
    if (n >= 2) CHECK(ap.level_max_diam[n - 1] < ap.level_max_diam[n - 2]);
  }
}

TEST_CASE("cover sums respect the depth bound") {
  const auto& f = fx();
  for (const CantorApprox& ap : f.ladder) {
    double b = static_cast<double>(b_count(ap.depth));
    for (double eps : {1.0, 0.5, 0.25}) {
      double sum = cover_sum(ap, eps);
      CHECK(sum > 0.0);
      if (eps * ap.depth > 1.0) CHECK(sum < std::pow(b, 1.0 - eps * ap.depth));
    }
  }
  // the worked instance: eps = 0.5 at depth 6 stays under 21^-2
  const CantorApprox& a6 = f.ladder[4];
  REQUIRE(a6.depth == 6);
  CHECK(cover_sum(a6, 0.5) < 1.0 / (21.0 * 21.0));
}

TEST_CASE("power monotonicity of cover sums") {
  const auto& f = fx();
  for (const CantorApprox& ap : f.ladder) {
    // all diameters < 1, so a smaller exponent gives a larger sum
    CHECK(cover_sum(ap, 1.0) < cover_sum(ap, 0.5));
    CHECK(cover_sum(ap, 0.5) < cover_sum(ap, 0.25));
  }
  CHECK_THROWS_AS(cover_sum(f.ladder[0], 0.0), usage_error);
  CHECK_THROWS_AS(cover_sum(f.ladder[0], 1.5), usage_error);
}

TEST_CASE("dimension trend is monotone once the exponent bites") {
  const auto& f = fx();
  DimensionTrend tr = dimension_trend(f.ladder);
  REQUIRE(tr.eps.size() == 4);
  REQUIRE(tr.monotone.size() == 4);
  REQUIRE(tr.rows.size() == 4 * f.ladder.size());
  for (size_t i = 0; i < tr.eps.size(); ++i) CHECK(tr.monotone[i]);
  for (const DimensionTrendRow& row : tr.rows) {
    CHECK(row.sum > 0.0);
    CHECK(std::isfinite(row.sum));
    if (row.eps * row.depth > 1.0) CHECK(row.sum < row.bound);
  }
}

TEST_CASE("property report issues the finite-depth verdicts") {
  const auto& f = fx();
  CantorPropertyReport rep =
      cantor_property_report(f.t, f.ladder.back(), f.ds);
  CHECK(rep.depth == 8);
  CHECK(rep.nonempty);
  CHECK(rep.compact_proxy);
  CHECK(rep.splitting_proxy);
  CHECK(rep.min_three_level_children >= 2);
  CHECK(rep.diameter_trend);
  CHECK(rep.notes.empty());

  // shallow approximations cannot run the 3-level proxy and say so
  CantorPropertyReport shallow =
      cantor_property_report(f.t, f.ladder[0], f.ds);
  CHECK(shallow.nonempty);
  CHECK(!shallow.splitting_proxy);
  CHECK(!shallow.notes.empty());
}

TEST_CASE("approximation construction rejects bad inputs") {
  const auto& f = fx();
  CHECK_THROWS_AS(build_approx(f.t, 0, f.ds), usage_error);
  CHECK_THROWS_AS(build_approx(f.t, f.t.depth + 1, f.ds), usage_error);
  std::vector<RegionDecomposition> two(f.ds.begin(), f.ds.begin() + 2);
  CHECK_THROWS_AS(build_approx(f.t, 3, two), usage_error);
  std::vector<RegionDecomposition> swapped = {f.ds[1], f.ds[0]};
  CHECK_THROWS_AS(build_approx(f.t, 2, swapped), usage_error);
  CHECK_THROWS_AS(dimension_trend({}), usage_error);
  std::vector<CantorApprox> gap = {f.ladder[0], f.ladder[2]};
  CHECK_THROWS_AS(dimension_trend(gap), usage_error);
}
