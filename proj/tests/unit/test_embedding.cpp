#include "cantor/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <set>
#include <vector>

#include "cantor/errors.hpp"
#include "cantor/regions.hpp"
#include "cantor/rng.hpp"
#include "cantor/schedule.hpp"
#include "cantor/tolerances.hpp"
#include "cantor/tower.hpp"
#include "doctest.h"
#include "support/fixtures.hpp"

using namespace cantor;

namespace {

constexpr uint64_t kSeed = 20260822ull;

struct EmbeddingFixture {
  ParameterSchedule s;
  RationalTower t;
  std::vector<RegionDecomposition> ds;  // level n at ds[n-1], n = 1..8
};

const EmbeddingFixture& fx() {
  static const EmbeddingFixture f = [] {
    EmbeddingFixture r;
    r.s = fixtures::schedule(kSeed, 9);
    r.t = fixtures::tower(r.s);
    for (int n = 1; n <= 8; ++n) r.ds.push_back(decompose(r.t, n, r.s.R[n]));
    return r;
  }();
  return f;
}

AnchoredPoint at(cplx z) {
  AnchoredPoint p;
  p.global = make_point(z);
  return p;
}

}  // namespace

TEST_CASE("level-one map matches its closed form") {
  const auto& f = fx();
  Rng rng(kSeed, 1, "closed-form");
  for (int k = 0; k < 50; ++k) {
    cplx z = 3.0 * rng.unit_disc();
    if (std::abs(z - f.s.a[1]) < 1e-3) continue;
    C2Point g = gamma(f.t, 1, at(z));
    REQUIRE(!g.infinite);
    CHECK(std::abs(g.x - z) <= 1e-12 * (1.0 + std::abs(z)));
    cplx expect = f.s.eps[1] / (z - f.s.a[1]);
    CHECK(std::abs(g.y - expect) <= 1e-12 * (1.0 + std::abs(expect)));
  }
  // the level-zero map is the identity into the first coordinate
  C2Point g0 = gamma(f.t, 0, at({0.25, -0.5}));
  CHECK(g0.x == cplx{0.25, -0.5});
  CHECK(g0.y == cplx{0.0, 0.0});
}

TEST_CASE("poles and infinity go to the infinite point") {
  const auto& f = fx();
  // the plain pole of r_1
  CHECK(gamma(f.t, 1, at(f.s.a[1])).infinite);
  // the point at infinity is a pole of r_{n-1} or r_n at every level
  for (int n = 0; n <= 4; ++n) {
    AnchoredPoint p;
    p.global = CPoint::infinity();
    CHECK(gamma(f.t, n, p).infinite);
  }
  // every catalogued preimage node, addressed exactly, maps to infinity
  for (int n = 1; n <= 6; ++n) {
    for (int node : infinity_preimage_nodes(f.t, n)) {
      AnchoredPoint p;
      p.node = node;
      CHECK(gamma(f.t, n, p).infinite);
    }
  }
}

TEST_CASE("coordinate order alternates with level parity") {
  const auto& f = fx();
  cplx z = {0.375, 0.125};
  for (int n = 1; n <= 6; ++n) {
    C2Point g = gamma(f.t, n, at(z));
    REQUIRE(!g.infinite);
    EvalResult top = evaluate_global(f.t, n, z);
    EvalResult prev = evaluate_global(f.t, n - 1, z);
    REQUIRE(!top.infinite);
    REQUIRE(!prev.infinite);
    if (n % 2 == 0) {
      CHECK(g.x == top.value);
      CHECK(g.y == prev.value);
    } else {
      CHECK(g.x == prev.value);
      CHECK(g.y == top.value);
    }
  }
}

TEST_CASE("composed shear chain agrees with the rational pair") {
  const auto& f = fx();
  Rng rng(kSeed, 0, "compose-points");
  int compared = 0;
  for (int k = 0; k < 100; ++k) {
    cplx z = 2.0 * rng.unit_disc();
    if (std::abs(z - f.s.a[1]) < 0.05) continue;
    for (int n = 1; n <= 8; ++n) {
      C2Point direct = gamma(f.t, n, at(z));
      C2Point chain = gamma_composed(f.s, n, z);
      REQUIRE(!direct.infinite);
      REQUIRE(!chain.infinite);
      double scale = 1.0 + std::max(std::abs(direct.x), std::abs(direct.y));
      CHECK(std::abs(direct.x - chain.x) <= 1e-9 * scale);
      CHECK(std::abs(direct.y - chain.y) <= 1e-9 * scale);
      ++compared;
    }
  }
  CHECK(compared >= 90 * 8);
}

TEST_CASE("successive maps converge geometrically on kept compacts") {
  const auto& f = fx();
  for (int k = 1; k <= 4; ++k) {
    std::vector<AnchoredPoint> sample = sample_kept_boundary(f.t, f.ds[k - 1]);
    std::vector<AnchoredPoint> extra =
        sample_kept_random(f.t, k, f.s.R[k], 500, kSeed);
    sample.insert(sample.end(), extra.begin(), extra.end());
    REQUIRE(sample.size() >= 500);

    CauchyReport rep = cauchy_check(f.t, f.s, k, 8, sample);
    CHECK(rep.base == k);
    REQUIRE(rep.level.size() == static_cast<size_t>(8 - k));
    CHECK(rep.violations == 0);
    CHECK(rep.tail_sum < f.s.delta[k]);
    CHECK(rep.worst_ratio <= 0.6);
    CHECK(rep.ok);
    for (size_t i = 0; i < rep.level.size(); ++i) {
      int n = rep.level[i];
      CHECK(rep.bound[i] ==
            doctest::Approx(f.s.delta[k] * std::ldexp(1.0, -(n + 1 + k)))
                .epsilon(1e-15));
      CHECK(rep.max_residual[i] < rep.bound[i]);
      CHECK(rep.max_residual[i] > 0.0);
    }
  }
}

TEST_CASE("escaping shells stay far out at all later levels") {
  const auto& f = fx();
  double prev_margin = 0.0;
  for (int n = 3; n <= 7; ++n) {
    std::vector<AnchoredPoint> shell =
        sample_shell(f.t, f.ds[n - 2], f.ds[n - 1], 16);
    REQUIRE(!shell.empty());
    PropernessReport rep =
        properness_check(f.t, f.s, n, f.t.depth - n, shell);
    CHECK(rep.level == n);
    CHECK(rep.j_max == f.t.depth - n);
    CHECK(rep.threshold == f.s.R[n - 3]);
    CHECK(rep.ok);
    CHECK(rep.margin >= 1.0);
    // deeper shells sit farther out relative to their threshold
    CHECK(rep.margin > prev_margin);
    prev_margin = rep.margin;
  }
}

TEST_CASE("sampled injectivity clears the distance and derivative floors") {
  const auto& f = fx();
  for (int n : {3, 8}) {
    const RegionDecomposition& base = f.ds[n - 2];
    std::vector<AnchoredPoint> sample = sample_kept_boundary(f.t, base);
    std::vector<AnchoredPoint> extra =
        sample_kept_random(f.t, n - 1, f.s.R[n - 1], 300, kSeed);
    sample.insert(sample.end(), extra.begin(), extra.end());

    InjectivityReport rep = injectivity_check(f.t, n, base, sample);
    CHECK(rep.level == n);
    CHECK(rep.pairs > 1000);
    CHECK(rep.min_pair_distance > 0.0);
    CHECK(rep.min_derivative >= tol::deriv_floor);
    CHECK(rep.ok);
  }
}

TEST_CASE("the image avoids the far corner and matches the bidisc test") {
  const auto& f = fx();
  for (int n = 1; n <= 8; ++n) {
    CHECK(corner_violations(f.t, n, f.s.R[n], 2000, kSeed) == 0);
    CHECK(bidisc_membership_mismatches(f.t, n, f.s.R[n], 1000, kSeed) == 0);
  }
}

TEST_CASE("preimage sets of the infinite point grow strictly") {
  const auto& f = fx();
  std::set<int> prev;
  for (int n = 1; n <= 8; ++n) {
    std::vector<int> nodes = infinity_preimage_nodes(f.t, n);
    std::set<int> cur(nodes.begin(), nodes.end());
    CHECK(cur.size() == nodes.size());
    CHECK(cur.size() == static_cast<size_t>(b_count(n)));
    CHECK(std::includes(cur.begin(), cur.end(), prev.begin(), prev.end()));
    CHECK(cur.size() > prev.size());
    prev = std::move(cur);
  }
}

TEST_CASE("level maps reject out-of-range arguments") {
  const auto& f = fx();
  AnchoredPoint origin = at({0.0, 0.0});
  CHECK_THROWS_AS(gamma(f.t, -1, origin), usage_error);
  CHECK_THROWS_AS(gamma(f.t, f.t.depth + 1, origin), usage_error);
  CHECK_THROWS_AS(gamma_composed(f.s, f.s.depth() + 1, {0.0, 0.0}),
                  usage_error);
  CHECK_THROWS_AS(cauchy_check(f.t, f.s, 5, 4, {}), usage_error);
  CHECK_THROWS_AS(properness_check(f.t, f.s, 2, 1, {origin}), usage_error);
  CHECK_THROWS_AS(properness_check(f.t, f.s, 3, 1, {}), usage_error);
  CHECK_THROWS_AS(injectivity_check(f.t, 3, f.ds[0], {origin}), usage_error);
}
