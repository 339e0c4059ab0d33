#include "cantor/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <utility>

namespace cantor {

namespace {

// Flip to whichever chart keeps the stored value small.
CPoint normalize_chart(CPoint p) {
  double a = std::abs(p.v);
  if (a > kChartFlipAbs) return {1.0 / p.v, !p.inverted};
  return p;
}

double clamp01(double x) { return x < 0.0 ? 0.0 : (x > 1.0 ? 1.0 : x); }

double chord_to_radians(double chord) {
  return 2.0 * std::asin(clamp01(chord / 2.0));
}

// Norm of (x, y) in C^2 without overflow in the squares.
double norm4(cplx x, cplx y) {
  return std::hypot(std::hypot(x.real(), x.imag()),
                    std::hypot(y.real(), y.imag()));
}

// 0.5 * log(1 + s^2), stable for huge s.
double half_log1p_sq(double s) {
  if (s < 1e100) return 0.5 * std::log1p(s * s);
  return std::log(s);
}

}  // namespace

CPoint make_point(cplx z) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag()))
    return CPoint::infinity();
  return normalize_chart({z, false});
}

bool is_infinity(const CPoint& p) {
  return p.inverted && p.v.real() == 0.0 && p.v.imag() == 0.0;
}

cplx collapse(const CPoint& p) {
  if (!p.inverted) return p.v;
  if (is_infinity(p)) return {std::numeric_limits<double>::infinity(), 0.0};
  return 1.0 / p.v;
}

std::array<double, 3> stereographic(const CPoint& p0) {
  CPoint p = normalize_chart(p0);
  double x = p.v.real(), y = p.v.imag();
  double n2 = x * x + y * y;
  if (!p.inverted) {
    double d = n2 + 1.0;
    return {2.0 * x / d, 2.0 * y / d, (n2 - 1.0) / d};
  }
  // point = 1/w with w = x + iy
  double d = n2 + 1.0;
  return {2.0 * x / d, -2.0 * y / d, (1.0 - n2) / d};
}

double chordal(const CPoint& p0, const CPoint& q0) {
  CPoint p = normalize_chart(p0), q = normalize_chart(q0);
  double ap = std::abs(p.v), aq = std::abs(q.v);
  double f = std::sqrt((1.0 + ap * ap) * (1.0 + aq * aq));
  double num;
  if (p.inverted == q.inverted) {
    // Same chart: inversion z -> 1/z is a sphere isometry, so the standard
    // chordal formula applies to the chart values directly.
    num = std::abs(p.v - q.v);
  } else {
    // p = z, q = 1/w (or vice versa): |z - 1/w| picks up a factor |w|.
    num = std::abs(p.v * q.v - 1.0);
  }
  return std::min(2.0, 2.0 * num / f);
}

double spherical_distance(const CPoint& p, const CPoint& q) {
  return chord_to_radians(chordal(p, q));
}

CPoint sphere_point_from_uniforms(double u, double phi) {
  u = std::min(std::max(u, 0.0), 1.0 - 1e-16);
  double r = std::sqrt(u / (1.0 - u));
  if (r <= 1.0) return {std::polar(r, phi), false};
  return {std::polar(1.0 / r, -phi), true};
}

C2Point C2Point::finite(cplx x, cplx y) {
  if (!std::isfinite(x.real()) || !std::isfinite(x.imag()) ||
      !std::isfinite(y.real()) || !std::isfinite(y.imag()))
    return C2Point::infinity();
  return {false, x, y};
}

std::array<double, 5> stereographic(const C2Point& p) {
  if (p.infinite) return {0.0, 0.0, 0.0, 0.0, 1.0};
  double s = norm4(p.x, p.y);
  if (s < 1e100) {
    double d = s * s + 1.0;
    return {2.0 * p.x.real() / d, 2.0 * p.x.imag() / d,
            2.0 * p.y.real() / d, 2.0 * p.y.imag() / d, (s * s - 1.0) / d};
  }
  // Near infinity: write everything in terms of t = 1/s to avoid overflow.
  double t = 1.0 / s;
  double g = 2.0 * t / (1.0 + t * t);
  return {(p.x.real() * t) * g, (p.x.imag() * t) * g,
          (p.y.real() * t) * g, (p.y.imag() * t) * g,
          (1.0 - t * t) / (1.0 + t * t)};
}

double chordal(const C2Point& p, const C2Point& q) {
  if (p.infinite && q.infinite) return 0.0;
  if (p.infinite || q.infinite) {
    const C2Point& f = p.infinite ? q : p;
    double s = norm4(f.x, f.y);
    if (s < 1e100) return 2.0 / std::sqrt(1.0 + s * s);
    return 2.0 / s;
  }
  double sp = norm4(p.x, p.y), sq = norm4(q.x, q.y);
  double d = norm4(p.x - q.x, p.y - q.y);
  if (d == 0.0) return 0.0;
  if (sp < 1e150 && sq < 1e150 && d < 1e300) {
    double f1 = std::sqrt(1.0 + sp * sp), f2 = std::sqrt(1.0 + sq * sq);
    return std::min(2.0, 2.0 * (d / f1) / f2);
  }
  // Log-space fallback for coordinates near the top of the double range.
  if (!std::isfinite(d)) return 2.0;
  double lc = std::log(2.0) + std::log(d) - half_log1p_sq(sp) - half_log1p_sq(sq);
  return std::min(2.0, std::exp(lc));
}

double spherical_distance(const C2Point& p, const C2Point& q) {
  return chord_to_radians(chordal(p, q));
}

std::vector<std::size_t> hull_vertices_3d(const std::vector<std::array<double, 3>>& pts) {
  const std::size_t n = pts.size();
  std::vector<std::size_t> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = i;
  if (n < 8) return all;

  using V3 = std::array<double, 3>;
  auto sub = [](V3 a, V3 b) -> V3 { return {a[0] - b[0], a[1] - b[1], a[2] - b[2]}; };
  auto cross = [](V3 a, V3 b) -> V3 {
    return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2],
            a[0] * b[1] - a[1] * b[0]};
  };
  auto dot = [](V3 a, V3 b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; };
  auto dist2 = [&](V3 a, V3 b) { V3 d = sub(a, b); return dot(d, d); };

  // Seed tetrahedron: spread-out quadruple with nonzero volume.
  std::size_t i0 = 0, i1 = 0;
  double best = -1.0;
  for (std::size_t i = 1; i < n; ++i) {
    double d = dist2(pts[i], pts[i0]);
    if (d > best) { best = d; i1 = i; }
  }
  std::size_t i2 = 0;
  best = -1.0;
  for (std::size_t i = 0; i < n; ++i) {
    V3 c = cross(sub(pts[i1], pts[i0]), sub(pts[i], pts[i0]));
    double a = dot(c, c);
    if (a > best) { best = a; i2 = i; }
  }
  std::size_t i3 = 0;
  best = -1.0;
  V3 nrm = cross(sub(pts[i1], pts[i0]), sub(pts[i2], pts[i0]));
  for (std::size_t i = 0; i < n; ++i) {
    double v = std::fabs(dot(nrm, sub(pts[i], pts[i0])));
    if (v > best) { best = v; i3 = i; }
  }
  if (best < 1e-20) return all;  // essentially flat cloud: no safe pruning

  // Faces carry unit normals so visibility is a perpendicular-distance test.
  struct Face { std::size_t a, b, c; V3 n; };
  std::vector<Face> faces;
  auto unit = [&](V3 v) -> V3 {
    double L = std::sqrt(dot(v, v));
    if (L < 1e-150) return {0.0, 0.0, 0.0};
    return {v[0] / L, v[1] / L, v[2] / L};
  };
  auto add_face = [&](std::size_t a, std::size_t b, std::size_t c, V3 inside) {
    V3 nf = unit(cross(sub(pts[b], pts[a]), sub(pts[c], pts[a])));
    if (dot(nf, sub(inside, pts[a])) > 0.0) {
      std::swap(b, c);
      nf = {-nf[0], -nf[1], -nf[2]};
    }
    faces.push_back({a, b, c, nf});
  };
  V3 centroid = {
      (pts[i0][0] + pts[i1][0] + pts[i2][0] + pts[i3][0]) / 4.0,
      (pts[i0][1] + pts[i1][1] + pts[i2][1] + pts[i3][1]) / 4.0,
      (pts[i0][2] + pts[i1][2] + pts[i2][2] + pts[i3][2]) / 4.0};
  add_face(i0, i1, i2, centroid);
  add_face(i0, i1, i3, centroid);
  add_face(i0, i2, i3, centroid);
  add_face(i1, i2, i3, centroid);

  // Points within eps of the hull are dropped; this perturbs the diameter of
  // the retained set by at most ~2*eps, far below the tolerances used here.
  const double eps = 1e-13;

  for (std::size_t p = 0; p < n; ++p) {
    if (p == i0 || p == i1 || p == i2 || p == i3) continue;
    if (faces.size() > 16 + 4 * n) return all;  // sliver blowup: stop pruning
    std::vector<char> vis(faces.size(), 0);
    bool any = false;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      double side = dot(faces[f].n, sub(pts[p], pts[faces[f].a]));
      if (side > eps) { vis[f] = 1; any = true; }
    }
    if (!any) continue;  // inside (or on) the hull: pruned
    // Horizon: directed edges of visible faces whose twin face is hidden.
    std::map<std::pair<std::size_t, std::size_t>, int> edge_count;
    for (std::size_t f = 0; f < faces.size(); ++f) {
      if (!vis[f]) continue;
      std::size_t e[3][2] = {{faces[f].a, faces[f].b},
                             {faces[f].b, faces[f].c},
                             {faces[f].c, faces[f].a}};
      for (auto& ed : e) {
        edge_count[{ed[0], ed[1]}] += 1;
      }
    }
    std::vector<std::pair<std::size_t, std::size_t>> horizon;
    for (auto& [ed, cnt] : edge_count) {
      (void)cnt;
      if (!edge_count.count({ed.second, ed.first})) horizon.push_back(ed);
    }
    std::vector<Face> kept;
    kept.reserve(faces.size());
    for (std::size_t f = 0; f < faces.size(); ++f)
      if (!vis[f]) kept.push_back(faces[f]);
    faces.swap(kept);
    for (auto& ed : horizon) {
      V3 nf = unit(cross(sub(pts[ed.second], pts[ed.first]), sub(pts[p], pts[ed.first])));
      faces.push_back({ed.first, ed.second, p, nf});
    }
    if (faces.empty()) return all;  // degenerate update: give up on pruning
  }

  std::vector<char> seen(n, 0);
  std::vector<std::size_t> out;
  for (auto& f : faces) {
    for (std::size_t v : {f.a, f.b, f.c}) {
      if (!seen[v]) { seen[v] = 1; out.push_back(v); }
    }
  }
  return out;
}

double set_diameter(const std::vector<CPoint>& pts) {
  if (pts.empty()) throw std::invalid_argument("set_diameter: empty point set");
  if (pts.size() == 1) return 0.0;
  double best = 0.0;
  if (pts.size() <= 4096) {
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j)
        best = std::max(best, chordal(pts[i], pts[j]));
    return chord_to_radians(best);
  }
  std::vector<std::array<double, 3>> proj(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) proj[i] = stereographic(pts[i]);
  std::vector<std::size_t> verts = hull_vertices_3d(proj);
  for (std::size_t i = 0; i < verts.size(); ++i) {
    for (std::size_t j = i + 1; j < verts.size(); ++j) {
      auto& a = proj[verts[i]];
      auto& b = proj[verts[j]];
      double dx = a[0] - b[0], dy = a[1] - b[1], dz = a[2] - b[2];
      best = std::max(best, std::sqrt(dx * dx + dy * dy + dz * dz));
    }
  }
  return chord_to_radians(best);
}

double set_diameter(const std::vector<C2Point>& pts) {
  if (pts.empty()) throw std::invalid_argument("set_diameter: empty point set");
  if (pts.size() == 1) return 0.0;
  double best = 0.0;
  if (pts.size() <= 4096) {
    for (std::size_t i = 0; i < pts.size(); ++i)
      for (std::size_t j = i + 1; j < pts.size(); ++j)
        best = std::max(best, chordal(pts[i], pts[j]));
    return chord_to_radians(best);
  }
  // Sort by chordal distance from an anchor point, descending.  For sorted
  // points the bound d(i,j) <= c[i] + c[j] allows exact early cutoffs.
  std::vector<std::pair<double, std::size_t>> order(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i)
    order[i] = {chordal(pts[0], pts[i]), i};
  std::sort(order.begin(), order.end(),
            [](auto& a, auto& b) { return a.first > b.first; });
  for (std::size_t i = 0; i < order.size(); ++i) {
    if (2.0 * order[i].first <= best) break;
    for (std::size_t j = i + 1; j < order.size(); ++j) {
      if (order[i].first + order[j].first <= best) break;
      best = std::max(best, chordal(pts[order[i].second], pts[order[j].second]));
    }
  }
  return chord_to_radians(best);
}

double PointSet::diameter() {
  if (diameter_cache) return *diameter_cache;
  double d = dimension == 1 ? set_diameter(pts1) : set_diameter(pts2);
  diameter_cache = d;
  return d;
}

}  // namespace cantor
