#include "cantor/embedding.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "cantor/errors.hpp"
#include "cantor/rng.hpp"
#include "cantor/tolerances.hpp"

namespace cantor {

namespace {

constexpr double kPi = 3.14159265358979323846;

bool finite_cplx(cplx z) {
  return std::isfinite(z.real()) && std::isfinite(z.imag());
}

double c2_distance(const C2Point& p, const C2Point& q) {
  return std::hypot(std::abs(p.x - q.x), std::abs(p.y - q.y));
}

}  // namespace

C2Point gamma(const RationalTower& t, int n, const AnchoredPoint& z) {
  if (n < 0 || n > t.depth) throw usage_error("gamma: level out of range");
  EvalResult hi = evaluate_at(t, n, z);
  EvalResult lo =
      n >= 1 ? evaluate_at(t, n - 1, z) : EvalResult{false, {0.0, 0.0}};
  if (hi.infinite || lo.infinite) return C2Point::infinity();
  if (n % 2 == 0) return C2Point::finite(hi.value, lo.value);
  return C2Point::finite(lo.value, hi.value);
}

C2Point gamma_composed(const ParameterSchedule& s, int n, cplx z) {
  if (n < 0 || n > s.depth())
    throw usage_error("gamma_composed: level out of range");
  cplx x = z, y = {0.0, 0.0};
  for (int m = 1; m <= n; ++m) {
    shear_for_level(s, m).apply(x, y);
    if (!finite_cplx(x) || !finite_cplx(y)) return C2Point::infinity();
  }
  return C2Point::finite(x, y);
}

CauchyReport cauchy_check(const RationalTower& t, const ParameterSchedule& s,
                          int k, int n_max,
                          const std::vector<AnchoredPoint>& sample) {
  if (k < 0 || n_max > t.depth || n_max > s.depth() || k > n_max)
    throw usage_error("cauchy_check: bad level range");
  CauchyReport rep;
  rep.base = k;
  for (int n = k; n < n_max; ++n) {
    double worst = 0.0;
    for (const AnchoredPoint& z : sample) {
      // gamma_{n+1} and gamma_n differ in one coordinate, by the next shear
      // term; evaluating that term directly keeps full relative precision.
      EvalResult rn = evaluate_at(t, n, z);
      double res;
      if (rn.infinite) {
        res = std::numeric_limits<double>::infinity();
      } else {
        double den = std::abs(rn.value - s.a[n + 1]);
        res = den > 0.0 ? s.eps[n + 1] / den
                        : std::numeric_limits<double>::infinity();
      }
      worst = std::max(worst, res);
    }
    double bound = s.delta[k] * std::ldexp(1.0, -(n + 1 + k));
    rep.level.push_back(n);
    rep.max_residual.push_back(worst);
    rep.bound.push_back(bound);
    if (!(worst < bound)) ++rep.violations;
    rep.tail_sum += worst;
  }
  for (size_t i = 0; i + 1 < rep.max_residual.size(); ++i) {
    if (rep.max_residual[i] > 0.0)
      rep.worst_ratio =
          std::max(rep.worst_ratio, rep.max_residual[i + 1] / rep.max_residual[i]);
  }
  rep.ok = rep.violations == 0 && rep.tail_sum < s.delta[k] &&
           rep.worst_ratio <= 0.6;
  return rep;
}

PropernessReport properness_check(const RationalTower& t,
                                  const ParameterSchedule& s, int n, int j_max,
                                  const std::vector<AnchoredPoint>& shell) {
  if (n < 3 || n > t.depth)
    throw usage_error("properness_check: needs 3 <= level <= depth");
  if (shell.empty()) throw usage_error("properness_check: empty shell sample");
  PropernessReport rep;
  rep.level = n;
  rep.j_max = std::min(j_max, t.depth - n);
  rep.threshold = s.R[n - 3];
  double best = std::numeric_limits<double>::infinity();
  for (const AnchoredPoint& z : shell) {
    for (int j = 0; j <= rep.j_max; ++j) {
      C2Point img = gamma(t, n + j, z);
      if (img.infinite) continue;  // infinitely far from the origin
      double mc = std::max(std::abs(img.x), std::abs(img.y));
      best = std::min(best, mc);
    }
  }
  rep.min_max_coord = best;
  rep.margin = best / rep.threshold;
  rep.ok = best >= rep.threshold;
  return rep;
}

InjectivityReport injectivity_check(const RationalTower& t, int n,
                                    const RegionDecomposition& base,
                                    const std::vector<AnchoredPoint>& sample) {
  if (n < 1 || n > t.depth)
    throw usage_error("injectivity_check: level out of range");
  if (base.level != n - 1)
    throw usage_error("injectivity_check: base decomposition level mismatch");
  InjectivityReport rep;
  rep.level = n;

  // Sampling resolution per anchor, for the pair filter.
  std::unordered_map<int, ScaledReal> tol_of;
  ScaledReal macro_tol(0.0);
  for (const ComponentRegion& comp : base.components) {
    tol_of.emplace(comp.anchor, comp.cell_tol);
    macro_tol = max(macro_tol, comp.cell_tol);
  }
  // Cap the pairwise scan.
  std::vector<const AnchoredPoint*> pts;
  size_t stride = std::max<size_t>(1, sample.size() / 4000);
  for (size_t i = 0; i < sample.size(); i += stride) pts.push_back(&sample[i]);

  std::vector<C2Point> img;
  std::vector<const AnchoredPoint*> kept;
  img.reserve(pts.size());
  for (const AnchoredPoint* p : pts) {
    C2Point g = gamma(t, n, *p);
    if (g.infinite) continue;  // a pole slipped into the sample; skip it
    img.push_back(g);
    kept.push_back(p);
  }

  // Precompute per-point data so the O(m^2) scan stays cheap: chord scale
  // and collapsed sphere position per point, node separations memoized.
  size_t m = kept.size();
  std::vector<ScaledReal> chordf(m), floor2(m);
  std::vector<CPoint> sph(m);
  for (size_t i = 0; i < m; ++i) {
    const AnchoredPoint& p = *kept[i];
    if (p.node >= 0) {
      ScaledComplex pos = node_chart_position(t, p.node);
      double az = std::abs(pos.to_cplx());
      chordf[i] = ScaledReal(2.0 / (1.0 + az * az));
      ScaledComplex coll = pos + p.offset;
      sph[i] = t.nodes[p.node].chart == 1 ? CPoint{coll.to_cplx(), true}
                                          : make_point(coll.to_cplx());
      auto it = tol_of.find(p.node);
      floor2[i] = 2.0 * (it != tol_of.end() ? it->second : macro_tol);
    } else {
      chordf[i] = ScaledReal(0.0);
      sph[i] = p.global;
      floor2[i] = 2.0 * macro_tol;
    }
  }
  std::unordered_map<int64_t, ScaledReal> sep_memo;
  auto node_sep = [&](int a, int b) -> ScaledReal {
    if (a > b) std::swap(a, b);
    int64_t key = (static_cast<int64_t>(a) << 32) | static_cast<uint32_t>(b);
    auto it = sep_memo.find(key);
    if (it != sep_memo.end()) return it->second;
    ScaledReal sep = node_separation(t, a, b);
    sep_memo.emplace(key, sep);
    return sep;
  };
  auto separation = [&](size_t i, size_t j) -> ScaledReal {
    int ni = kept[i]->node, nj = kept[j]->node;
    if (ni >= 0 && nj >= 0) {
      if (ni == nj)
        return chordf[i] * abs(kept[i]->offset - kept[j]->offset);
      ScaledReal lower = node_sep(ni, nj) -
                         chordf[i] * abs(kept[i]->offset) -
                         chordf[j] * abs(kept[j]->offset);
      return lower > ScaledReal(0.0) ? lower : ScaledReal(0.0);
    }
    return ScaledReal(spherical_distance(sph[i], sph[j]));
  };

  double min_pair = std::numeric_limits<double>::infinity();
  for (size_t i = 0; i < m; ++i) {
    for (size_t j = i + 1; j < m; ++j) {
      if (separation(i, j) <= max(floor2[i], floor2[j])) continue;
      ++rep.pairs;
      min_pair = std::min(min_pair, c2_distance(img[i], img[j]));
    }
  }
  rep.min_pair_distance = rep.pairs > 0 ? min_pair : 0.0;

  // Divided-difference floor along four directions at a thinner subsample.
  double min_deriv = std::numeric_limits<double>::infinity();
  size_t dstride = std::max<size_t>(1, kept.size() / 500);
  int measured = 0;
  for (size_t i = 0; i < kept.size(); i += dstride) {
    const AnchoredPoint& p = *kept[i];
    ScaledReal h_chart;
    double chord;
    if (p.node >= 0) {
      h_chart = 1e-3 * abs(p.offset);
      double az = std::abs(node_chart_position(t, p.node).to_cplx());
      chord = 2.0 / (1.0 + az * az);
    } else {
      h_chart = ScaledReal(1e-3);
      double az = std::abs(p.global.v);
      chord = 2.0 / (1.0 + az * az);
    }
    if (!(h_chart > ScaledReal(0.0))) continue;
    double step = (chord * h_chart).to_double();
    if (!(step > 0.0)) continue;
    for (int d = 0; d < 4; ++d) {
      cplx dir = std::polar(1.0, 0.5 * kPi * d);
      AnchoredPoint q = p;
      if (p.node >= 0) {
        q.offset = p.offset + h_chart * ScaledComplex(dir);
      } else {
        q.global.v = p.global.v + h_chart.to_double() * dir;
      }
      C2Point gq = gamma(t, n, q);
      if (gq.infinite) continue;
      min_deriv = std::min(min_deriv, c2_distance(img[i], gq) / step);
      ++measured;
    }
  }
  rep.min_derivative = measured > 0 ? min_deriv : 0.0;

  rep.ok = rep.pairs > 0 && rep.min_pair_distance > 0.0 &&
           rep.min_derivative >= tol::deriv_floor;
  return rep;
}

int corner_violations(const RationalTower& t, int n, double R, int count,
                      uint64_t seed) {
  if (n < 0 || n > t.depth)
    throw usage_error("corner_violations: level out of range");
  Rng rng(seed, n, "corner-cover");
  int bad = 0;
  for (int k = 0; k < count; ++k) {
    CPoint z = sphere_point_from_uniforms(rng.uniform(), rng.uniform() * 2.0 * kPi);
    AnchoredPoint p;
    p.global = z;
    C2Point img = gamma(t, n, p);
    if (img.infinite) continue;  // pole preimages are excluded from the domain
    if (std::min(std::abs(img.x), std::abs(img.y)) >= R) ++bad;
  }
  return bad;
}

int bidisc_membership_mismatches(const RationalTower& t, int n, double R,
                                 int count, uint64_t seed) {
  if (n < 0 || n > t.depth)
    throw usage_error("bidisc_membership_mismatches: level out of range");
  Rng rng(seed, n, "bidisc-cover");
  int bad = 0;
  for (int k = 0; k < count; ++k) {
    CPoint z = sphere_point_from_uniforms(rng.uniform(), rng.uniform() * 2.0 * kPi);
    AnchoredPoint p;
    p.global = z;
    C2Point img = gamma(t, n, p);
    bool in_bidisc =
        !img.infinite && std::abs(img.x) <= R && std::abs(img.y) <= R;
    bool kept = membership(t, n, R, z) == Membership::kept;
    if (in_bidisc != kept) ++bad;
  }
  return bad;
}

}  // namespace cantor
