#include "cantor/regions.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstdint>
#include <deque>
#include <unordered_map>
#include <unordered_set>

#include "cantor/errors.hpp"
#include "cantor/rng.hpp"
#include "cantor/schedule.hpp"
#include "cantor/tolerances.hpp"

namespace cantor {

namespace {

constexpr double kPi = 3.14159265358979323846;

// ---- membership ----------------------------------------------------------

// Escape test for a chart-local offset from a pole node: some coordinate of
// (r_{n-1}, r_n) is infinite or has modulus above R.
bool escape_offset(const RationalTower& t, int n, double R, int node,
                   const ScaledComplex& off) {
  EvalResult hi = evaluate_local(t, n, node, off);
  if (hi.infinite || std::abs(hi.value) > R) return true;
  if (n >= 1) {
    EvalResult lo = evaluate_local(t, n - 1, node, off);
    if (lo.infinite || std::abs(lo.value) > R) return true;
  }
  return false;
}

bool escape_global(const RationalTower& t, int n, double R, const CPoint& z) {
  if (is_infinity(z)) return true;  // a pole of r_n or r_{n-1} for every n
  cplx zz = collapse(z);
  EvalResult hi = evaluate_global(t, n, zz);
  if (hi.infinite || std::abs(hi.value) > R) return true;
  if (n >= 1) {
    EvalResult lo = evaluate_global(t, n - 1, zz);
    if (lo.infinite || std::abs(lo.value) > R) return true;
  }
  return false;
}

// ---- quadtree frame ------------------------------------------------------

// Leaf states.
enum : int8_t { kInside = 0, kOutside = 1, kBoundary = 2 };

constexpr int kMaxDepth = 28;

uint64_t cell_key(int d, int32_t ix, int32_t iy) {
  return (static_cast<uint64_t>(d) << 58) |
         (static_cast<uint64_t>(static_cast<uint32_t>(ix)) << 29) |
         static_cast<uint64_t>(static_cast<uint32_t>(iy));
}

struct CellRef {
  int d;
  int32_t ix, iy;
};

// One island's refinement state: a sparse quadtree over the frame square
// [-1, 1]^2 in unit coordinates (offsets are scale * unit).
struct Frame {
  const RationalTower* t = nullptr;
  int n = 0;
  double R = 0.0;
  int anchor = -1;
  ScaledReal scale;
  int final_depth = 0;
  std::unordered_map<uint64_t, int8_t> leaves;
  long evals = 0;

  bool escape_unit(double x, double y) {
    ++evals;
    return escape_offset(*t, n, R, anchor, ScaledComplex(cplx{x, y}) * scale);
  }

  int8_t classify(int d, int32_t ix, int32_t iy) {
    double half = std::ldexp(1.0, -d);
    double cx = -1.0 + (2.0 * ix + 1.0) * half;
    double cy = -1.0 + (2.0 * iy + 1.0) * half;
    int in = 0, out = 0;
    const double dx[5] = {0.0, -half, half, -half, half};
    const double dy[5] = {0.0, -half, -half, half, half};
    for (int k = 0; k < 5; ++k)
      (escape_unit(cx + dx[k], cy + dy[k]) ? in : out) += 1;
    if (in == 5) return kInside;
    if (out == 5) return kOutside;
    return kBoundary;
  }
};

// Refine until every mixed cell at final_depth; returns false when the cell
// budget is exceeded.
bool refine(Frame& f, long cell_budget) {
  f.leaves.clear();
  std::deque<CellRef> mixed;
  int8_t s0 = f.classify(0, 0, 0);
  if (s0 != kBoundary) {
    f.leaves[cell_key(0, 0, 0)] = s0;
    return true;
  }
  mixed.push_back({0, 0, 0});
  while (!mixed.empty()) {
    CellRef c = mixed.front();
    mixed.pop_front();
    if (c.d >= f.final_depth) {
      f.leaves[cell_key(c.d, c.ix, c.iy)] = kBoundary;
      continue;
    }
    for (int k = 0; k < 4; ++k) {
      int32_t ix = 2 * c.ix + (k & 1), iy = 2 * c.iy + (k >> 1);
      int8_t s = f.classify(c.d + 1, ix, iy);
      if (s == kBoundary)
        mixed.push_back({c.d + 1, ix, iy});
      else
        f.leaves[cell_key(c.d + 1, ix, iy)] = s;
      if (static_cast<long>(f.leaves.size()) + static_cast<long>(mixed.size()) >
          cell_budget)
        return false;
    }
  }
  return true;
}

// Locate the leaf containing a unit point (corners resolve to the finest
// leaf present).
bool find_leaf(const Frame& f, double x, double y, CellRef& out) {
  for (int d = f.final_depth; d >= 0; --d) {
    double u = (x + 1.0) * std::ldexp(1.0, d - 1);
    double v = (y + 1.0) * std::ldexp(1.0, d - 1);
    int32_t ix = std::clamp<int32_t>(static_cast<int32_t>(std::floor(u)), 0,
                                     (1 << d) - 1);
    int32_t iy = std::clamp<int32_t>(static_cast<int32_t>(std::floor(v)), 0,
                                     (1 << d) - 1);
    auto it = f.leaves.find(cell_key(d, ix, iy));
    if (it != f.leaves.end()) {
      out = {d, ix, iy};
      return true;
    }
  }
  return false;
}

// Visit all leaves edge-adjacent to (d, ix, iy); sets touched_edge when the
// cell lies on the frame border.
template <typename Fn>
void for_neighbors(const Frame& f, int d, int32_t ix, int32_t iy, Fn&& fn,
                   bool& touched_edge) {
  const int32_t lim = 1 << d;
  const int dirs[4][2] = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}};
  for (auto& dir : dirs) {
    int32_t nx = ix + dir[0], ny = iy + dir[1];
    if (nx < 0 || ny < 0 || nx >= lim || ny >= lim) {
      touched_edge = true;
      continue;
    }
    // same depth or coarser
    bool found = false;
    int32_t cx = nx, cy = ny;
    for (int dd = d; dd >= 0; --dd) {
      auto it = f.leaves.find(cell_key(dd, cx, cy));
      if (it != f.leaves.end()) {
        fn(CellRef{dd, cx, cy}, it->second);
        found = true;
        break;
      }
      cx >>= 1;
      cy >>= 1;
    }
    if (found) continue;
    // finer: walk down the face
    std::deque<CellRef> stack{{d, nx, ny}};
    while (!stack.empty()) {
      CellRef c = stack.back();
      stack.pop_back();
      if (c.d > f.final_depth) continue;
      auto it = f.leaves.find(cell_key(c.d, c.ix, c.iy));
      if (it != f.leaves.end()) {
        fn(c, it->second);
        continue;
      }
      // the two children on the shared face
      int32_t bx = 2 * c.ix, by = 2 * c.iy;
      if (dir[0] == 1) {  // neighbor is to our +x: its -x children
        stack.push_back({c.d + 1, bx, by});
        stack.push_back({c.d + 1, bx, by + 1});
      } else if (dir[0] == -1) {
        stack.push_back({c.d + 1, bx + 1, by});
        stack.push_back({c.d + 1, bx + 1, by + 1});
      } else if (dir[1] == 1) {
        stack.push_back({c.d + 1, bx, by});
        stack.push_back({c.d + 1, bx + 1, by});
      } else {
        stack.push_back({c.d + 1, bx, by + 1});
        stack.push_back({c.d + 1, bx + 1, by + 1});
      }
    }
  }
}

// Flood fill from the anchor over inside/boundary leaves.  Returns the
// reached cells; flags when the island touches the frame border.
std::vector<CellRef> flood(const Frame& f, bool& touched_edge) {
  touched_edge = false;
  CellRef seed;
  if (!find_leaf(f, 1e-9, 1e-9, seed)) return {};
  {
    auto it = f.leaves.find(cell_key(seed.d, seed.ix, seed.iy));
    if (it == f.leaves.end() || it->second == kOutside) return {};
  }
  std::vector<CellRef> reached;
  std::unordered_set<uint64_t> seen;
  std::deque<CellRef> queue{seed};
  seen.insert(cell_key(seed.d, seed.ix, seed.iy));
  while (!queue.empty()) {
    CellRef c = queue.front();
    queue.pop_front();
    reached.push_back(c);
    for_neighbors(
        f, c.d, c.ix, c.iy,
        [&](CellRef nb, int8_t state) {
          if (state == kOutside) return;
          uint64_t k = cell_key(nb.d, nb.ix, nb.iy);
          if (seen.insert(k).second) queue.push_back(nb);
        },
        touched_edge);
  }
  return reached;
}

// ---- metric helpers ------------------------------------------------------

double unit_center_x(const CellRef& c) {
  return -1.0 + (2.0 * c.ix + 1.0) * std::ldexp(1.0, -c.d);
}
double unit_center_y(const CellRef& c) {
  return -1.0 + (2.0 * c.iy + 1.0) * std::ldexp(1.0, -c.d);
}

// Upper bound on geodesic radians given an upper bound on chordal distance:
// radians = 2 asin(c/2) <= c (1 + c^2/20) for c <= 1.9.
ScaledReal radians_upper(ScaledReal chord) {
  double c = chord.to_double();
  if (c > 1.0) {
    double r = 2.0 * std::asin(std::min(1.0, c / 2.0)) * (1.0 + 1e-12);
    return ScaledReal(std::max(r, c));
  }
  return chord * (1.0 + c * c / 20.0 + 1e-12);
}

// Lower bound: radians >= chord always.
ScaledReal radians_lower(ScaledReal chord) { return chord; }

// Convex hull (monotone chain) of unit-coordinate points, then the maximum
// pairwise distance over hull vertices.
double hull_max_pairwise(std::vector<std::pair<double, double>> pts) {
  if (pts.size() < 2) return 0.0;
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 2) return 0.0;
  auto cross = [](const std::pair<double, double>& o,
                  const std::pair<double, double>& a,
                  const std::pair<double, double>& b) {
    return (a.first - o.first) * (b.second - o.second) -
           (a.second - o.second) * (b.first - o.first);
  };
  std::vector<std::pair<double, double>> hull(2 * pts.size());
  size_t k = 0;
  for (const auto& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  size_t lower = k + 1;
  for (auto it = pts.rbegin(); it != pts.rend(); ++it) {
    while (k >= lower && cross(hull[k - 2], hull[k - 1], *it) <= 0) --k;
    hull[k++] = *it;
  }
  hull.resize(k > 1 ? k - 1 : k);
  double best = 0.0;
  for (size_t i = 0; i < hull.size(); ++i)
    for (size_t j = i + 1; j < hull.size(); ++j) {
      double dx = hull[i].first - hull[j].first;
      double dy = hull[i].second - hull[j].second;
      best = std::max(best, dx * dx + dy * dy);
    }
  return std::sqrt(best);
}

// Chordal conversion factors over a disk of chart radius `reach` around a
// chart point of modulus z0: chord = factor * chart distance with factor
// between f_min and f_max.
void chord_factors(double z0, double reach, double& f_min, double& f_max) {
  double hi = z0 + reach;
  double lo = std::max(0.0, z0 - reach);
  f_min = 2.0 / (1.0 + hi * hi);
  f_max = 2.0 / (1.0 + lo * lo);
}

int64_t ceil_log2(ScaledReal v) {
  return static_cast<int64_t>(std::ceil(v.log2_abs()));
}

// ---- decompose -----------------------------------------------------------

struct AnchorInfo {
  int node = -1;
  double chord = 2.0;    // chordal factor at the anchor
  double chart_abs = 0;  // |chart position|
  ScaledReal rho;        // island radius estimate |residue| / R
};

}  // namespace

Membership membership(const RationalTower& t, int n, double R, CPoint z) {
  return escape_global(t, n, R, z) ? Membership::escape : Membership::kept;
}

RegionDecomposition decompose(const RationalTower& t, int n, double R,
                              int depth_budget) {
  if (n < 1 || n > t.depth)
    throw usage_error("decompose: level outside the tower");
  if (R <= 1.0) throw usage_error("decompose: escape radius must exceed 1");
  depth_budget = std::min(depth_budget, kMaxDepth);

  std::vector<int> anchors = infinity_preimage_nodes(t, n);
  const double global_tol =
      std::pow(static_cast<double>(b_count(n)), -n) / tol::cell_ratio;

  RegionDecomposition out;
  out.level = n;
  out.R = R;
  out.min_pair_gap = pow2(4000);

  for (int node : anchors) {
    const PoleNode& u = t.nodes[node];
    AnchorInfo info;
    info.node = node;
    cplx pos = node_chart_position(t, node).to_cplx();
    info.chart_abs = std::abs(pos);
    info.chord = 2.0 / (1.0 + info.chart_abs * info.chart_abs);
    info.rho = abs(u.residue) / ScaledReal(R);

    ComponentRegion comp;
    comp.id = static_cast<int>(out.components.size());
    comp.anchor = node;
    comp.pole_birth = u.birth;
    comp.chord = info.chord;

    // local resolution: the finer of the global bound and the island's own
    // scale, both divided by the cell ratio
    ScaledReal local_scale_tol =
        ScaledReal(info.chord) * info.rho * ScaledReal(2.0 / tol::cell_ratio);
    comp.cell_tol = min(ScaledReal(global_tol), local_scale_tol);

    // frame scale: power of two near 4x the radius estimate
    ScaledReal s = pow2(ceil_log2(info.rho * ScaledReal(4.0)));

    Frame f;
    f.t = &t;
    f.n = n;
    f.R = R;
    f.anchor = node;

    std::vector<CellRef> island;
    bool ok = false;
    for (int grow = 0; grow < 8 && !ok; ++grow, s = s * ScaledReal(2.0)) {
      f.scale = s;
      // depth so the boundary-cell spherical diagonal drops below cell_tol
      ScaledReal root_diag = ScaledReal(info.chord) * s * ScaledReal(2.8285);
      int need = static_cast<int>(
          std::max<int64_t>(0, ceil_log2(root_diag / comp.cell_tol)));
      if (need > depth_budget)
        throw verification_error(
            "resolution-insufficient: refinement depth beyond budget");
      f.final_depth = need;
      if (!refine(f, 400000))
        throw verification_error(
            "resolution-insufficient: cell budget exhausted");
      bool touched = false;
      island = flood(f, touched);
      if (island.empty())
        throw verification_error(
            "resolution-insufficient: island not found at anchor");
      ok = !touched;
    }
    if (!ok)
      throw verification_error(
          "resolution-insufficient: island kept touching the frame border");

    comp.scale = f.scale;
    comp.refine_depth = f.final_depth;

    // metrics in unit coordinates: the region lies inside the union of the
    // reached cells and contains every inside-cell center
    double out_u = 0.0, in_u = 1e300;
    std::vector<std::pair<double, double>> corners;     // union upper bound
    std::vector<std::pair<double, double>> in_centers;  // certified interior
    corners.reserve(4 * island.size());
    comp.cells.reserve(island.size());
    for (const CellRef& c : island) {
      double half = std::ldexp(1.0, -c.d);
      double cx = unit_center_x(c), cy = unit_center_y(c);
      double r = std::hypot(cx, cy);
      double diag = half * 2.8284271247461903;  // 2 sqrt(2) * half
      int8_t st = f.leaves.at(cell_key(c.d, c.ix, c.iy));
      out_u = std::max(out_u, r + diag / 2.0);
      if (st == kBoundary)
        in_u = std::min(in_u, r - diag / 2.0);
      else
        in_centers.emplace_back(cx, cy);
      corners.emplace_back(cx - half, cy - half);
      corners.emplace_back(cx + half, cy - half);
      corners.emplace_back(cx - half, cy + half);
      corners.emplace_back(cx + half, cy + half);
      comp.cells.push_back(
          {c.d, c.ix, c.iy, st == kBoundary});
    }
    if (in_u > 1e299) in_u = out_u;  // no boundary cells: fully inside frame
    in_u = std::max(0.0, in_u);

    double lo_u = hull_max_pairwise(std::move(in_centers));
    double hi_u = hull_max_pairwise(std::move(corners));

    // chart units -> chordal -> radians, one-sided in each direction
    double f_min, f_max;
    chord_factors(info.chart_abs, (comp.scale * ScaledReal(1.5)).to_double(),
                  f_min, f_max);
    comp.out_units = comp.scale * ScaledReal(out_u);
    comp.in_units = comp.scale * ScaledReal(in_u);
    comp.out_radius = radians_upper(comp.out_units * ScaledReal(f_max));
    comp.in_radius = radians_lower(comp.in_units * ScaledReal(f_min));
    comp.diam_lo = radians_lower(comp.scale * ScaledReal(lo_u * f_min));
    comp.diam_hi = radians_upper(comp.scale * ScaledReal(hi_u * f_max));

    // orientation from the Laurent proxy offset residue/(2R), cross-checked
    // against the birth-parity rule
    {
      ScaledComplex proxy = u.residue / ScaledReal(2.0 * R);
      EvalResult hi = evaluate_local(t, n, node, proxy);
      EvalResult lo = evaluate_local(t, n - 1, node, proxy);
      const EvalResult& first = (n % 2 == 0) ? hi : lo;
      const EvalResult& second = (n % 2 == 0) ? lo : hi;
      bool first_big = first.infinite || std::abs(first.value) > R;
      bool second_big = second.infinite || std::abs(second.value) > R;
      bool sampled_horizontal = first_big && !second_big;
      bool sampled_vertical = second_big && !first_big;
      bool parity_horizontal = u.birth % 2 == 0;
      if (!(sampled_horizontal || sampled_vertical) ||
          sampled_horizontal != parity_horizontal)
        throw verification_error(
            "orientation sample disagrees with the birth-parity rule");
      comp.horizontal = parity_horizontal;
    }
    (comp.horizontal ? out.horizontal_count : out.vertical_count) += 1;

    out.components.push_back(std::move(comp));
  }

  // pairwise disjointness: separation minus the two out-radii
  out.disjoint = true;
  for (size_t i = 0; i < out.components.size(); ++i) {
    ScaledReal clear = pow2(4000);
    for (size_t j = 0; j < out.components.size(); ++j) {
      if (i == j) continue;
      ScaledReal sep = node_separation(t, out.components[i].anchor,
                                       out.components[j].anchor);
      clear = min(clear, sep);
      if (j > i) {
        ScaledReal gap =
            sep - out.components[i].out_radius - out.components[j].out_radius;
        out.min_pair_gap = min(out.min_pair_gap, gap);
        if (!(ScaledReal() < gap)) out.disjoint = false;
      }
    }
    out.components[i].clearance = clear;
  }
  return out;
}

void link_decompositions(const RationalTower& t,
                         const RegionDecomposition& coarse,
                         RegionDecomposition& fine) {
  if (fine.level != coarse.level + 1)
    throw usage_error("link_decompositions: levels must be consecutive");
  std::unordered_map<int, int> by_anchor;
  for (const ComponentRegion& c : coarse.components) by_anchor[c.anchor] = c.id;
  for (ComponentRegion& c : fine.components) {
    auto it = by_anchor.find(c.anchor);
    if (it == by_anchor.end()) {
      int up = t.nodes[c.anchor].parent;
      if (up >= 0) it = by_anchor.find(up);
    }
    if (it == by_anchor.end())
      throw verification_error(
          "parent map not total: component without a coarser parent");
    c.parent = it->second;
  }
}

NestingReport check_nesting(const RationalTower& t,
                            const RegionDecomposition& coarse,
                            const RegionDecomposition& fine) {
  NestingReport rep;
  rep.coarse_level = coarse.level;
  rep.ok = true;
  rep.min_margin = pow2(4000);
  rep.min_margin_over_tol = pow2(4000);
  for (const ComponentRegion& child : fine.components) {
    if (child.parent < 0)
      throw usage_error("check_nesting: run link_decompositions first");
    const ComponentRegion& par = coarse.components[child.parent];
    ScaledReal dist;  // spherical anchor distance
    if (child.anchor == par.anchor)
      dist = ScaledReal();
    else
      dist = node_separation(t, child.anchor, par.anchor);
    ScaledReal margin = par.in_radius - dist - child.out_radius;
    rep.min_margin = min(rep.min_margin, margin);
    rep.min_margin_over_tol =
        min(rep.min_margin_over_tol, margin / par.cell_tol);
    if (!(ScaledReal() < margin)) rep.ok = false;
  }
  return rep;
}

SplitReport split_report(const RationalTower& t, const RegionDecomposition& dn,
                         const RegionDecomposition& dn1) {
  const int n = dn.level;
  if (dn1.level != n + 1)
    throw usage_error("split_report: levels must be consecutive");
  SplitReport rep;
  rep.level = n;

  // children per coarse component
  std::unordered_map<int, std::vector<int>> children;
  for (const ComponentRegion& c : dn1.components) {
    if (c.parent < 0)
      throw usage_error("split_report: run link_decompositions first");
    children[c.parent].push_back(c.id);
  }

  rep.total = true;
  rep.types_ok = true;
  size_t accounted = 0;
  for (const ComponentRegion& par : dn.components) {
    auto it = children.find(par.id);
    const std::vector<int>& kids =
        it == children.end() ? std::vector<int>{} : it->second;
    accounted += kids.size();
    // splits exactly when the pole is a pole of r_n (birth parity == n)
    bool splits = (t.nodes[par.anchor].birth % 2) == (n % 2);
    if (splits) {
      rep.split_count += 1;
      if (kids.size() != 2) rep.total = false;
      int same = 0, newborn = 0;
      for (int id : kids) {
        const ComponentRegion& ch = dn1.components[id];
        if (ch.anchor == par.anchor) {
          ++same;
          if (ch.horizontal != par.horizontal) rep.types_ok = false;
        } else {
          ++newborn;
          if (ch.pole_birth != n + 1 || ch.horizontal == par.horizontal)
            rep.types_ok = false;
        }
      }
      if (same != 1 || newborn != 1) rep.total = false;
    } else {
      rep.shrink_count += 1;
      if (kids.size() != 1) rep.total = false;
      for (int id : kids) {
        const ComponentRegion& ch = dn1.components[id];
        if (ch.anchor != par.anchor || ch.horizontal != par.horizontal)
          rep.types_ok = false;
      }
    }
  }
  if (accounted != dn1.components.size()) rep.total = false;
  rep.counts_ok = rep.split_count == fib_k(n) && rep.shrink_count == fib_k(n - 1);

  // newborn locus: inside each newborn island, r_n sits within eps/R of the
  // next shift target.  Direct evaluation of r_n - a_{n+1} cancels below
  // double resolution at deep levels, so use the inverted recursion
  // r_n - a_{n+1} = eps_{n+1} / (r_{n+1} - r_{n-1}), whose right side is
  // dominated by the pole value r_{n+1} ~ 2R and carries full relative
  // precision.
  rep.locus_ok = true;
  for (const ComponentRegion& ch : dn1.components) {
    if (ch.pole_birth != n + 1) continue;
    const PoleNode& v = t.nodes[ch.anchor];
    for (int k = 0; k < 8; ++k) {
      double th = 2.0 * kPi * (k + 0.37) / 8.0;
      ScaledComplex off = v.residue * ScaledComplex(std::polar(0.5, th)) /
                          ScaledReal(dn1.R);
      EvalResult above = evaluate_local(t, n + 1, ch.anchor, off);
      EvalResult below = evaluate_local(t, n - 1, ch.anchor, off);
      if (above.infinite || below.infinite) {
        rep.locus_ok = false;
        continue;
      }
      double ratio = dn1.R / std::abs(above.value - below.value);
      rep.worst_locus_ratio = std::max(rep.worst_locus_ratio, ratio);
      if (ratio >= 1.0) rep.locus_ok = false;
    }
  }
  return rep;
}

std::string certify_radius(const RationalTower& t, int n, double R,
                           uint64_t seed) {
  // (1) escape cover: no sphere sample may have both coordinates escaping
  {
    Rng rng(seed, n, "escape-cover");
    for (int k = 0; k < 10000; ++k) {
      CPoint z = sphere_point_from_uniforms(rng.uniform(), rng.uniform() * 2.0 * kPi);
      if (is_infinity(z)) continue;
      cplx zz = collapse(z);
      EvalResult hi = evaluate_global(t, n, zz);
      EvalResult lo = n >= 1 ? evaluate_global(t, n - 1, zz)
                             : EvalResult{false, {0.0, 0.0}};
      bool hi_big = hi.infinite || std::abs(hi.value) >= R;
      bool lo_big = lo.infinite || std::abs(lo.value) >= R;
      if (hi_big && lo_big) return "escape-cover";
    }
  }

  // (2) the k_n solutions of r_n = a stay distinct for 16 targets |a| = R
  {
    const std::vector<int>& lv = t.level_poles[n];
    std::vector<ScaledReal> clear_sph(lv.size(), pow2(4000));
    for (std::size_t i = 0; i < lv.size(); ++i)
      for (std::size_t j = i + 1; j < lv.size(); ++j) {
        ScaledReal sep = node_separation(t, lv[i], lv[j]);
        clear_sph[i] = min(clear_sph[i], sep);
        clear_sph[j] = min(clear_sph[j], sep);
      }
    std::vector<double> factor(lv.size());
    for (std::size_t i = 0; i < lv.size(); ++i) {
      double az = std::abs(node_chart_position(t, lv[i]).to_cplx());
      factor[i] = 2.0 / (1.0 + az * az);
    }
    Rng rng(seed, n, "solution-angles");
    double phase = rng.uniform() * 2.0 * kPi;
    for (int k = 0; k < 16; ++k) {
      cplx target = std::polar(R, phase + 2.0 * kPi * k / 16.0);
      for (std::size_t idx = 0; idx < lv.size(); ++idx) {
        int node = lv[idx];
        const PoleNode& u = t.nodes[node];
        int j = (n - u.birth) / 2;
        ScaledComplex d =
            u.residue / ScaledComplex(target - u.reg[static_cast<size_t>(j)]);
        bool converged = false;
        for (int it = 0; it < 30; ++it) {
          EvalResult val = evaluate_local(t, n, node, d);
          if (!val.infinite &&
              std::abs(val.value - target) <=
                  tol::newton_residual_rel * R) {
            converged = true;
            break;
          }
          if (val.infinite) {  // retreat from an exact pole hit
            d = d * ScaledReal(1.0 + 1e-6);
            continue;
          }
          ScaledComplex deriv =
              u.slope[static_cast<size_t>(j)] -
              u.residue / (d * d);
          d = d - ScaledComplex(val.value - target) / deriv;
        }
        if (!converged) return "solution-count";
        // distinctness: the solution (spherical radius factor * |d|) stays
        // well inside this pole's clearance to its level companions
        if (!(abs(d) * ScaledReal(4.0 * factor[idx]) < clear_sph[idx]))
          return "solution-count";
      }
    }
  }

  // (3) full decomposition: diameters and pairwise gaps
  try {
    RegionDecomposition d = decompose(t, n, R);
    const double bound = std::pow(static_cast<double>(b_count(n)), -n);
    for (const ComponentRegion& c : d.components)
      if (!(c.diam_hi < ScaledReal(bound))) return "component-diameter";
    if (!d.disjoint) return "component-overlap";
  } catch (const verification_error&) {
    return "resolution-insufficient";
  }
  return "";
}

EvalResult evaluate_at(const RationalTower& t, int n, const AnchoredPoint& p) {
  if (p.node >= 0) return evaluate_local(t, n, p.node, p.offset);
  if (is_infinity(p.global)) return evaluate_at_infinity(t, n);
  return evaluate_global(t, n, collapse(p.global));
}

namespace {

// Collapse an anchored point to a plain sphere point (loses sub-ulp offsets,
// which is fine for macroscopic comparisons only).
CPoint anchored_collapse(const RationalTower& t, const AnchoredPoint& p) {
  if (p.node < 0) return p.global;
  ScaledComplex pos = node_chart_position(t, p.node) + p.offset;
  if (t.nodes[p.node].chart == 1) return {pos.to_cplx(), true};
  return make_point(pos.to_cplx());
}

// Chordal scale factor at a node: geodesic distance per unit of chart offset.
ScaledReal chord_scale(const RationalTower& t, int node) {
  double az = std::abs(node_chart_position(t, node).to_cplx());
  return ScaledReal(2.0 / (1.0 + az * az));
}

}  // namespace

ScaledReal anchored_separation(const RationalTower& t, const AnchoredPoint& p,
                               const AnchoredPoint& q) {
  if (p.node >= 0 && q.node >= 0) {
    if (p.node == q.node) {
      // Chord length is a lower bound for the geodesic distance.
      return chord_scale(t, p.node) * abs(p.offset - q.offset);
    }
    ScaledReal sep = node_separation(t, p.node, q.node);
    ScaledReal reach = chord_scale(t, p.node) * abs(p.offset) +
                       chord_scale(t, q.node) * abs(q.offset);
    ScaledReal lower = sep - reach;
    return lower > ScaledReal(0.0) ? lower : ScaledReal(0.0);
  }
  CPoint a = anchored_collapse(t, p);
  CPoint b = anchored_collapse(t, q);
  return ScaledReal(spherical_distance(a, b));
}

std::vector<AnchoredPoint> sample_kept_boundary(const RationalTower& t,
                                                const RegionDecomposition& d) {
  std::vector<AnchoredPoint> out;
  for (const ComponentRegion& comp : d.components) {
    for (const RegionCell& cell : comp.cells) {
      if (!cell.boundary) continue;
      double half = std::ldexp(1.0, -cell.depth);
      double cx = -1.0 + (2.0 * cell.ix + 1.0) * half;
      double cy = -1.0 + (2.0 * cell.iy + 1.0) * half;
      // corners ordered farthest-from-anchor first
      std::array<std::pair<double, double>, 4> corners = {
          std::pair{cx - half, cy - half}, {cx + half, cy - half},
          {cx - half, cy + half}, {cx + half, cy + half}};
      std::sort(corners.begin(), corners.end(),
                [](const auto& a, const auto& b) {
                  return std::hypot(a.first, a.second) >
                         std::hypot(b.first, b.second);
                });
      for (const auto& [x, y] : corners) {
        ScaledComplex off = ScaledComplex(cplx{x, y}) * comp.scale;
        if (!escape_offset(t, d.level, d.R, comp.anchor, off)) {
          out.push_back({comp.anchor, off, CPoint{}});
          break;
        }
      }
    }
  }
  return out;
}

std::vector<AnchoredPoint> sample_kept_random(const RationalTower& t, int n,
                                              double R, int count,
                                              uint64_t seed) {
  std::vector<AnchoredPoint> out;
  Rng rng(seed, n, "kept-random");
  int attempts = 0;
  while (static_cast<int>(out.size()) < count && attempts < 100 * count) {
    ++attempts;
    CPoint z = sphere_point_from_uniforms(rng.uniform(), rng.uniform() * 2.0 * kPi);
    if (escape_global(t, n, R, z)) continue;
    AnchoredPoint p;
    p.global = z;
    out.push_back(p);
  }
  return out;
}

std::vector<AnchoredPoint> sample_shell(const RationalTower& t,
                                        const RegionDecomposition& outer,
                                        const RegionDecomposition& inner,
                                        int per_component) {
  if (inner.level != outer.level + 1)
    throw usage_error("sample_shell: levels must be consecutive");
  std::vector<AnchoredPoint> out;
  for (const ComponentRegion& comp : inner.components) {
    ScaledReal ring = comp.out_units * ScaledReal(2.0);
    for (int k = 0; k < per_component; ++k) {
      double th = 2.0 * kPi * (k + 0.5) / per_component;
      ScaledComplex off = ScaledComplex(std::polar(1.0, th)) * ring;
      if (escape_offset(t, inner.level, inner.R, comp.anchor, off)) continue;
      if (!escape_offset(t, outer.level, outer.R, comp.anchor, off)) continue;
      out.push_back({comp.anchor, off, CPoint{}});
    }
  }
  return out;
}

}  // namespace cantor
