#include "cantor/cantor_set.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <set>

#include "cantor/errors.hpp"
#include "cantor/schedule.hpp"

namespace cantor {

CantorApprox build_approx(const RationalTower& t, int N,
                          const std::vector<RegionDecomposition>& decomps) {
  if (N < 1 || N > t.depth) throw usage_error("build_approx: depth out of range");
  if (static_cast<int>(decomps.size()) < N)
    throw usage_error("build_approx: missing decompositions");
  for (int n = 1; n <= N; ++n)
    if (decomps[n - 1].level != n)
      throw usage_error("build_approx: decompositions out of order");

  CantorApprox ap;
  ap.depth = N;
  ap.components = decomps[N - 1];

  // Witnesses: every catalogued preimage of the infinite point up to level N.
  std::vector<int> nodes = infinity_preimage_nodes(t, N);
  if (static_cast<int64_t>(nodes.size()) != b_count(N))
    throw verification_error("build_approx: witness count is not b_N");
  std::set<int> witness_set(nodes.begin(), nodes.end());
  if (witness_set.size() != nodes.size())
    throw verification_error("build_approx: duplicate witness nodes");

  // Every witness anchors exactly one island and every island carries a
  // witness: the two b_N-element sets must coincide.
  std::set<int> anchor_set;
  for (const ComponentRegion& comp : ap.components.components)
    anchor_set.insert(comp.anchor);
  if (anchor_set != witness_set)
    throw verification_error(
        "build_approx: witness points and component anchors disagree");
  // The witness sits strictly inside its island (positive containment
  // radius certified by the decomposition).
  for (const ComponentRegion& comp : ap.components.components)
    if (!(comp.in_radius > ScaledReal(0.0)))
      throw verification_error(
          "build_approx: witness not strictly inside its component");

  for (int node : nodes) {
    AnchoredPoint p;
    p.node = node;
    ap.witnesses.push_back(p);
  }

  for (int n = 1; n <= N; ++n) {
    ScaledReal worst(0.0);
    for (const ComponentRegion& comp : decomps[n - 1].components)
      worst = max(worst, comp.diam_hi);
    double b = static_cast<double>(b_count(n));
    if (!(worst.log2_abs() < -n * std::log2(b)))
      throw verification_error(
          "build_approx: level diameter maximum at or above 1/b^n");
    if (n >= 2 && !(worst < ap.level_max_diam.back()))
      throw verification_error(
          "build_approx: level diameter maxima not strictly decreasing");
    ap.level_max_diam.push_back(worst);
  }
  return ap;
}

double cover_sum(const CantorApprox& approx, double eps) {
  if (!(eps > 0.0) || eps > 1.0)
    throw usage_error("cover_sum: exponent must be in (0, 1]");
  double sum = 0.0;
  for (const ComponentRegion& comp : approx.components.components)
    sum += std::exp2(eps * comp.diam_hi.log2_abs());
  return sum;
}

DimensionTrend dimension_trend(const std::vector<CantorApprox>& ladder) {
  if (ladder.empty()) throw usage_error("dimension_trend: empty ladder");
  for (size_t i = 1; i < ladder.size(); ++i)
    if (ladder[i].depth != ladder[i - 1].depth + 1)
      throw usage_error("dimension_trend: depths must be consecutive");

  DimensionTrend out;
  out.eps = {1.0, 0.5, 0.25, 0.1};
  for (double eps : out.eps) {
    std::vector<double> sums;
    for (const CantorApprox& ap : ladder) {
      double b = static_cast<double>(b_count(ap.depth));
      DimensionTrendRow row;
      row.depth = ap.depth;
      row.eps = eps;
      row.sum = cover_sum(ap, eps);
      row.bound = std::pow(b, 1.0 - eps * ap.depth);
      out.rows.push_back(row);
      sums.push_back(row.sum);
    }
    bool mono = true;
    for (size_t i = 1; i < ladder.size(); ++i) {
      if (eps * ladder[i - 1].depth <= 1.0) continue;  // bound still growing
      if (!(sums[i] < sums[i - 1])) mono = false;
    }
    out.monotone.push_back(mono);
  }
  return out;
}

CantorPropertyReport cantor_property_report(
    const RationalTower& t, const CantorApprox& approx,
    const std::vector<RegionDecomposition>& decomps) {
  (void)t;
  CantorPropertyReport rep;
  rep.depth = approx.depth;
  rep.nonempty = !approx.witnesses.empty();
  if (!rep.nonempty) rep.notes.push_back("no witness points");

  // Components are finite unions of closed cells in a compact sphere, and
  // each approximation contains the next, so compactness of the limit is
  // structural.
  rep.compact_proxy = true;

  // Splitting proxy: follow parent links three levels down.
  int N = approx.depth;
  rep.min_three_level_children = 0;
  if (N >= 4) {
    int worst = INT_MAX;
    for (int n = 1; n + 3 <= N; ++n) {
      const RegionDecomposition& top = decomps[n - 1];
      const RegionDecomposition& bot = decomps[n + 2];
      std::vector<int> children(top.components.size(), 0);
      for (const ComponentRegion& comp : bot.components) {
        // climb: level n+3 -> n+2 -> n+1 -> n
        int p = comp.parent;
        if (p < 0) continue;
        p = decomps[n + 1].components[p].parent;
        if (p < 0) continue;
        p = decomps[n].components[p].parent;
        if (p < 0) continue;
        ++children[p];
      }
      for (int c : children) worst = std::min(worst, c);
    }
    rep.min_three_level_children = worst == INT_MAX ? 0 : worst;
    rep.splitting_proxy = rep.min_three_level_children >= 2;
    if (!rep.splitting_proxy)
      rep.notes.push_back(
          "splitting proxy violated: an island keeps fewer than 2 "
          "descendants over 3 levels");
  } else {
    rep.notes.push_back("depth too small for the 3-level splitting proxy");
  }

  ScaledReal prev;
  bool trend = true;
  for (size_t i = 0; i < approx.level_max_diam.size(); ++i) {
    int n = static_cast<int>(i) + 1;
    double b = static_cast<double>(b_count(n));
    if (!(approx.level_max_diam[i].log2_abs() < -n * std::log2(b)))
      trend = false;
    if (i > 0 && !(approx.level_max_diam[i] < prev)) trend = false;
    prev = approx.level_max_diam[i];
  }
  rep.diameter_trend = trend;
  if (!trend) rep.notes.push_back("diameter maxima fail the decay law");
  return rep;
}

}  // namespace cantor
