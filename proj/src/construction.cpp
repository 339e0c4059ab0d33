#include "cantor/construction.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <string>
#include <unordered_map>

#include "cantor/embedding.hpp"
#include "cantor/errors.hpp"
#include "cantor/tolerances.hpp"

namespace cantor {

namespace {

bool retryable(const char* what) {
  return std::strncmp(what, "genericity-failure", 18) == 0 ||
         std::strncmp(what, "collision", 9) == 0;
}

double c2_dist(const C2Point& p, const C2Point& q) {
  return std::hypot(std::abs(p.x - q.x), std::abs(p.y - q.y));
}

}  // namespace

double injectivity_margin(const RationalTower& t, int n,
                          const RegionDecomposition& base, uint64_t seed) {
  if (n < 2 || n > t.depth)
    throw usage_error("injectivity_margin: needs 2 <= level <= depth");
  if (base.level != n - 1)
    throw usage_error("injectivity_margin: base decomposition level mismatch");

  std::vector<AnchoredPoint> sample = sample_kept_boundary(t, base);
  size_t stride = std::max<size_t>(1, sample.size() / 400);
  std::vector<AnchoredPoint> pts;
  for (size_t i = 0; i < sample.size(); i += stride) pts.push_back(sample[i]);
  std::vector<AnchoredPoint> extra =
      sample_kept_random(t, n - 1, base.R, 100, seed);
  pts.insert(pts.end(), extra.begin(), extra.end());

  std::unordered_map<int, ScaledReal> tol_of;
  ScaledReal macro_tol(0.0);
  for (const ComponentRegion& comp : base.components) {
    tol_of.emplace(comp.anchor, comp.cell_tol);
    macro_tol = max(macro_tol, comp.cell_tol);
  }
  auto pair_floor = [&](const AnchoredPoint& p,
                        const AnchoredPoint& q) -> ScaledReal {
    ScaledReal f = macro_tol;
    if (p.node >= 0 && p.node == q.node) {
      auto it = tol_of.find(p.node);
      if (it != tol_of.end()) f = it->second;
    }
    return 2.0 * f;
  };

  std::vector<C2Point> img;
  std::vector<AnchoredPoint> kept;
  for (const AnchoredPoint& p : pts) {
    C2Point g = gamma(t, n, p);
    if (g.infinite) continue;
    img.push_back(g);
    kept.push_back(p);
  }
  if (kept.size() < 2)
    throw construction_error("injectivity margin: sample collapsed");

  double sigma = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < kept.size(); ++i) {
    for (size_t j = i + 1; j < kept.size(); ++j) {
      ScaledReal sep = anchored_separation(t, kept[i], kept[j]);
      if (sep <= pair_floor(kept[i], kept[j])) continue;
      double ratio = c2_dist(img[i], img[j]) / sep.to_double();
      sigma = std::min(sigma, ratio);
    }
  }
  if (!std::isfinite(sigma) || sigma <= 0.0)
    throw construction_error("injectivity margin: no usable sampled pairs");
  return sigma;
}

void advance_level(Construction& c) {
  const int n = c.depth() + 1;
  if (static_cast<int>(c.s.a.size()) != n ||
      static_cast<int>(c.s.R.size()) != n ||
      static_cast<int>(c.t.level_poles.size()) != n)
    throw usage_error("advance_level: construction state out of step");

  const double R_prev = c.s.R[n - 1];
  c.s.a.push_back({0.0, 0.0});
  c.s.eps.push_back(0.0);
  bool advanced = false;
  std::string last_failure;
  for (int retry = 0; retry <= tol::max_genericity_retries && !advanced;
       ++retry) {
    c.s.a[n] = choose_a(c.seed, n, R_prev, retry);
    if (retry == 0) c.s.eps[n] = choose_epsilon(n, c.s);
    try {
      advance_tower(c.t, c.s.a[n], c.s.eps[n]);
      advanced = true;
    } catch (const construction_error& e) {
      if (!retryable(e.what())) throw;
      last_failure = e.what();
    }
  }
  if (!advanced)
    throw construction_error("genericity retries exhausted at level " +
                             std::to_string(n) + ": " + last_failure);

  double R = choose_R(n, std::abs(c.s.a[n]), [&](double trial) {
    return certify_radius(c.t, n, trial, c.seed);
  });
  c.s.R.push_back(R);

  RegionDecomposition d = decompose(c.t, n, R);
  NestingReport nest;
  if (n >= 2) {
    link_decompositions(c.t, c.decomps[n - 2], d);
    nest = check_nesting(c.t, c.decomps[n - 2], d);
    if (!nest.ok)
      throw verification_error("advance_level: nesting margin not positive");
  }
  c.decomps.push_back(std::move(d));
  const RegionDecomposition& dn = c.decomps.back();

  double sigma = n == 1 ? std::numeric_limits<double>::infinity()
                        : injectivity_margin(c.t, n, c.decomps[n - 2], c.seed);
  c.s.delta.push_back(choose_delta(c.s.delta[n - 1], sigma));

  LevelVerdicts v;
  v.level = n;
  v.components = static_cast<int>(dn.components.size());
  v.horizontal = dn.horizontal_count;
  v.vertical = dn.vertical_count;
  ScaledReal worst(0.0);
  for (const ComponentRegion& comp : dn.components)
    worst = max(worst, comp.diam_hi);
  v.max_diam_log2 = worst.log2_abs();
  v.min_pair_gap = dn.min_pair_gap.to_double();
  v.nest_margin = n >= 2 ? nest.min_margin_over_tol.to_double() : 0.0;
  v.sigma = sigma;
  c.levels.push_back(v);

  const double b = static_cast<double>(b_count(n));
  c.s.margins.push_back({"shift-modulus", n,
                         std::abs(c.s.a[n]) -
                             (std::sqrt(2.0) * R_prev + 0.5)});
  c.s.margins.push_back(
      {"diameter-log2", n, -n * std::log2(b) - v.max_diam_log2});
  c.s.margins.push_back({"island-gap", n, dn.min_pair_gap.to_double()});
  if (n >= 2) c.s.margins.push_back({"nesting-tol-units", n, v.nest_margin});
}

void extend_construction(Construction& c, int target_depth) {
  if (target_depth < 0) throw usage_error("extend_construction: bad depth");
  while (c.depth() < target_depth) advance_level(c);
}

Construction build_construction(uint64_t seed, int depth) {
  Construction c;
  c.seed = seed;
  c.s = make_schedule_base();
  c.t = make_tower();
  extend_construction(c, depth);
  return c;
}

}  // namespace cantor
