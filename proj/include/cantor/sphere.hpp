#pragma once

// Riemann-sphere geometry for C-hat (one complex line plus a point at
// infinity) and C2-hat (the one-point compactification of C^2, a round S^4).
//
// Points on C-hat are kept in one of two charts: the standard chart z, or the
// inverted chart w with z = 1/w.  This keeps every stored coordinate small
// and makes the point at infinity an ordinary chart value (w = 0).  All
// distances are computed chordally (straight-line distance between the
// stereographic images) and converted to geodesic radians with 2*asin(c/2),
// which is stable for both tiny and near-antipodal separations.

#include <array>
#include <optional>
#include <vector>

#include "cantor/scaled.hpp"

namespace cantor {

// Chart switch threshold: |chart value| above this flips to the other chart.
inline constexpr double kChartFlipAbs = 1e8;

struct CPoint {
  cplx v = {0.0, 0.0};   // chart value
  bool inverted = false; // if true the point is 1/v, so {0, true} is infinity

  static CPoint infinity() { return {{0.0, 0.0}, true}; }
};

// Build a point from a plain complex value, choosing the better chart.
CPoint make_point(cplx z);

bool is_infinity(const CPoint& p);

// Collapse to a plain complex number; infinity becomes (inf, 0).
cplx collapse(const CPoint& p);

// Unit vector in R^3; infinity -> (0,0,1), 0 -> (0,0,-1).
std::array<double, 3> stereographic(const CPoint& p);

// Chordal distance in [0,2] (Euclidean distance of the R^3 images).
double chordal(const CPoint& p, const CPoint& q);

// Geodesic distance in radians, in [0, pi].
double spherical_distance(const CPoint& p, const CPoint& q);

// Map (u, phi) in [0,1) x [0, 2*pi) to a point distributed uniformly with
// respect to the round measure on the sphere: the chart radius r with
// r^2/(1+r^2) = u is uniform in the cap measure, and points with r > 1 are
// stored in the inverted chart so no stored coordinate exceeds 1.
CPoint sphere_point_from_uniforms(double u, double phi);

// A point of C2-hat: either a finite pair (x, y) or the single point at
// infinity that compactifies C^2.
struct C2Point {
  bool infinite = false;
  cplx x = {0.0, 0.0};
  cplx y = {0.0, 0.0};

  static C2Point infinity() { return {true, {0.0, 0.0}, {0.0, 0.0}}; }
  static C2Point finite(cplx x, cplx y);
};

// Unit vector in R^5; infinity -> (0,0,0,0,1).
std::array<double, 5> stereographic(const C2Point& p);

double chordal(const C2Point& p, const C2Point& q);
double spherical_distance(const C2Point& p, const C2Point& q);

// Max pairwise geodesic distance.  Small sets are scanned pairwise; larger
// sets on C-hat are first pruned to the vertices of the convex hull of the
// R^3 images (the chordal max over a convex body is attained at a vertex,
// and chord and geodesic are monotonically related).  Larger sets on C2-hat
// use a triangle-inequality cutoff scan, which is exact as well.
double set_diameter(const std::vector<CPoint>& pts);
double set_diameter(const std::vector<C2Point>& pts);

// Point collection with a lazily filled diameter, for callers that pass
// sets around and ask for the diameter more than once.
struct PointSet {
  int dimension = 1;  // 1 for C-hat, 2 for C2-hat
  std::vector<CPoint> pts1;
  std::vector<C2Point> pts2;
  std::optional<double> diameter_cache;

  std::size_t size() const { return dimension == 1 ? pts1.size() : pts2.size(); }
  double diameter();
};

// Conservative superset of the convex-hull vertex indices of a 3D point
// cloud (ties and near-degenerate faces keep points rather than drop them).
std::vector<std::size_t> hull_vertices_3d(const std::vector<std::array<double, 3>>& pts);

}  // namespace cantor
