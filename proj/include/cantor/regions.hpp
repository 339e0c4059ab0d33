#pragma once

// Escape-region decomposition on the sphere.
//
// At level n the coordinate pair (r_{n-1}, r_n) maps most of the sphere into
// the closed bidisc of radius R_n.  The escape region (where some coordinate
// has modulus above R_n) is a union of b_n = k_{n+1} islands, one around each
// pole of r_{n-1} or r_n; its complement is the kept set.  Islands shrink
// doubly-exponentially with the birth depth of their pole, so each island is
// resolved by an adaptive quadtree in a *local frame* centered at its pole:
// cell coordinates inside the frame are plain doubles, while the frame scale
// is extended-range.  Connectivity, diameters, containment radii, and
// pairwise gaps are certified per island; cross-island statements reduce to
// exact pole-separation arithmetic.
//
// Orientation: a component is "horizontal" when the first coordinate of the
// pair is the escaping one, which happens exactly when its pole has even
// birth level (the point at infinity counts as birth 0).  Vertical components
// have odd-birth poles.

#include <cstdint>
#include <string>
#include <vector>

#include "cantor/scaled.hpp"
#include "cantor/sphere.hpp"
#include "cantor/tower.hpp"

namespace cantor {

enum class Membership { escape, kept };

// Escape-vs-kept test at a plain sphere point (double precision; reliable
// away from the deep pole clusters, which is where random samples live).
// Poles and the point at infinity always land in the escape region.
Membership membership(const RationalTower& t, int n, double R, CPoint z);

struct RegionCell {
  int depth = 0;       // refinement depth below the frame root
  int32_t ix = 0, iy = 0;  // cell indices at that depth (origin: frame corner)
  bool boundary = false;   // mixed membership at the final resolution
};

struct ComponentRegion {
  int id = -1;
  int anchor = -1;      // pole-node index in the tower
  int parent = -1;      // component id at the previous level (filled by link)
  bool horizontal = false;
  int pole_birth = 0;

  // Local frame: offsets from the anchor are scale * (unit coordinates in
  // [-1, 1]^2); chord is the chart-to-sphere factor at the anchor, so
  // spherical sizes are chord * scale * (unit size).
  ScaledReal scale;
  double chord = 2.0;
  int refine_depth = 0;      // uniform depth of boundary cells
  ScaledReal cell_tol;       // spherical resolution used for this island
  std::vector<RegionCell> cells;  // the island: inside + boundary cells

  // Spherical (radian) certificates.
  ScaledReal diam_lo, diam_hi;   // one-sided diameter interval
  ScaledReal out_radius;         // island covered by this disk around anchor
  ScaledReal in_radius;          // disk certainly inside the island
  ScaledReal out_units;          // same radii in frame chart units
  ScaledReal in_units;
  ScaledReal clearance;          // spherical distance to the nearest other anchor
};

struct RegionDecomposition {
  int level = -1;
  double R = 0.0;
  std::vector<ComponentRegion> components;
  int horizontal_count = 0;
  int vertical_count = 0;
  // Smallest pairwise island gap: min over pairs of separation minus the two
  // out_radii.  Positive iff all islands are certified disjoint.
  ScaledReal min_pair_gap;
  bool disjoint = false;
};

// Resolve every escape island at level n with escape radius R.  One
// component per pole of r_{n-1} or r_n (b_n of them), each certified:
// connected cell set, diameter interval, containment radii, orientation
// (sampled at a Laurent proxy point and checked against the birth-parity
// rule).  Throws verification_error("resolution-insufficient ...") when the
// cell budget or frame growth cap is hit, and for orientation conflicts.
RegionDecomposition decompose(const RationalTower& t, int n, double R,
                              int depth_budget = 30);

// Fill fine.parent for every component: the coarse component with the same
// anchor, or (for poles born at fine.level) the component of the pole's tree
// parent.  Throws if any component has no parent (the parent map must be
// total).
void link_decompositions(const RationalTower& t,
                         const RegionDecomposition& coarse,
                         RegionDecomposition& fine);

struct NestingReport {
  int coarse_level = -1;
  bool ok = false;            // every fine island certified inside its parent
  ScaledReal min_margin;      // worst spherical margin over coarse boundaries
  ScaledReal min_margin_over_tol;  // margin / coarse island's cell_tol
};

// Certify that every level-(n+1) island lies strictly inside its parent
// level-n island: parent's certified-inside radius minus (child distance +
// child out-radius) must be positive for every child; the margin is also
// the clearance between the parent island's boundary cells and the union of
// its children.  Requires link_decompositions to have run.
NestingReport check_nesting(const RationalTower& t,
                            const RegionDecomposition& coarse,
                            const RegionDecomposition& fine);

// How components evolve from level n to n+1: components whose pole is a pole
// of r_n acquire exactly one new sibling island (the level-(n+1) newborn
// inside them) and "split"; the others "shrink" to a single child.  Split
// children swap no orientations: the original keeps its orientation and the
// newborn takes the opposite one.
struct SplitReport {
  int level = -1;            // n (coarse side)
  int shrink_count = 0;      // components with exactly one child
  int split_count = 0;       // components with exactly two children
  bool total = false;        // every fine component accounted for, no others
  bool types_ok = false;     // orientations follow the birth-parity rule
  bool counts_ok = false;    // shrink/split counts match k_{n-1} and k_n
  // Newborn locus check: at sample offsets inside each newborn island,
  // |r_n - a_{n+1}| * R_{n+1} / eps_{n+1} must be < 1; worst ratio recorded.
  double worst_locus_ratio = 0.0;
  bool locus_ok = false;
};

SplitReport split_report(const RationalTower& t, const RegionDecomposition& dn,
                         const RegionDecomposition& dn1);

// Escape-radius certificates at level n for a trial radius R, cheapest
// first.  Returns "" when all hold, else the failed certificate name:
//   "escape-cover":        some sphere sample has both coordinate moduli >= R
//   "solution-count":      the k_n solutions of r_n = a (16 samples |a| = R)
//                          failed to converge or to stay distinct
//   "component-diameter":  some island diameter upper bound >= 1/b_n^n
//   "component-overlap":   two islands could not be certified disjoint
//   "resolution-insufficient": decomposition ran out of refinement budget
std::string certify_radius(const RationalTower& t, int n, double R,
                           uint64_t seed);

// A sample point that stays exact at any depth: either a chart-local offset
// from a pole node, or a plain sphere point (node = -1).
struct AnchoredPoint {
  int node = -1;
  ScaledComplex offset;
  CPoint global;
};

EvalResult evaluate_at(const RationalTower& t, int n, const AnchoredPoint& p);

// Certified lower bound on the geodesic distance between two anchored
// points.  Same-anchor pairs use the chart offset difference (exact at any
// depth); cross-anchor pairs use the anchor separation minus both offset
// reaches, floored at zero.
ScaledReal anchored_separation(const RationalTower& t, const AnchoredPoint& p,
                               const AnchoredPoint& q);

// Kept-set samples at the decomposition's level: the outermost corner of
// every island boundary cell (verified on the kept side), ready for
// convergence and injectivity sweeps.
std::vector<AnchoredPoint> sample_kept_boundary(const RationalTower& t,
                                                const RegionDecomposition& d);

// Uniformly random sphere points rejected into the kept set at level n.
std::vector<AnchoredPoint> sample_kept_random(const RationalTower& t, int n,
                                              double R, int count,
                                              uint64_t seed);

// Points kept at level n but escaping at level n-1 (the shell between the
// two kept sets): rings just outside each level-n island, verified on both
// sides.  per_component points are spread over each ring.
std::vector<AnchoredPoint> sample_shell(const RationalTower& t,
                                        const RegionDecomposition& outer,
                                        const RegionDecomposition& inner,
                                        int per_component);

}  // namespace cantor
