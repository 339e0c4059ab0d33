#pragma once

// Depth-N approximations of the limit set: the kept-set islands at level N
// together with the catalogued preimage points of the infinite point, which
// all survive into every deeper level.  On top of the approximation:
// Hausdorff-style cover sums with the components as the cover, the
// dimension trend of those sums in depth, and finite-depth verdicts for the
// defining point-set properties (nonempty, compact, splitting/no isolated
// points, vanishing component diameters).

#include <string>
#include <vector>

#include "cantor/regions.hpp"
#include "cantor/tower.hpp"

namespace cantor {

struct CantorApprox {
  int depth = 0;                          // N
  RegionDecomposition components;         // the level-N decomposition
  std::vector<AnchoredPoint> witnesses;   // preimage points born at <= N
  std::vector<ScaledReal> level_max_diam; // max island diameter, level 1..N
};

// Assemble the depth-N approximation from certified decompositions
// (decomps[n-1] holds level n, for n = 1..N).  Cross-checks: the witness
// set and the component anchors coincide (every witness sits at the center
// of exactly one island, every island carries a witness), witness count is
// b_N, and the per-level diameter maxima are strictly decreasing below
// 1/b_n^n.  Violations throw verification_error.
CantorApprox build_approx(const RationalTower& t, int N,
                          const std::vector<RegionDecomposition>& decomps);

// Sum of (diameter upper bound)^eps over the level-N components, the cover
// the construction itself provides.  Computed in log space so doubly
// exponentially small islands contribute exactly (or underflow harmlessly).
// Requires eps in (0, 1].
double cover_sum(const CantorApprox& approx, double eps);

struct DimensionTrendRow {
  int depth = 0;
  double eps = 0.0;
  double sum = 0.0;    // measured cover sum
  double bound = 0.0;  // b_N^(1 - eps N), binding once eps*N > 1
};

struct DimensionTrend {
  std::vector<DimensionTrendRow> rows;
  std::vector<double> eps;           // exponents checked
  std::vector<bool> monotone;        // per-eps: strictly decreasing beyond
                                     // the first depth with eps*N > 1
};

// Cover sums for eps in {1, 0.5, 0.25, 0.1} across a ladder of
// approximations (consecutive depths).  The monotone verdict for an
// exponent ignores depths with eps*N <= 1, where the bound is still
// growing; sums at those depths are reported but not judged.
DimensionTrend dimension_trend(const std::vector<CantorApprox>& ladder);

struct CantorPropertyReport {
  int depth = 0;
  bool nonempty = false;        // witness count > 0
  bool compact_proxy = false;   // finite unions of closed cells on a sphere
  bool splitting_proxy = false; // every island holds >= 2 islands 3 levels on
  int min_three_level_children = 0;
  bool diameter_trend = false;  // maxima strictly decreasing, < 1/b_n^n
  std::vector<std::string> notes;  // flagged proxies, not exceptions
};

// Finite-depth verdicts for the defining properties of the limit set.  The
// splitting proxy walks the linked parent maps three levels; a violation is
// recorded in `notes` rather than thrown (the split cadence is an observed
// regularity, not a certified theorem).  Requires decomps linked.
CantorPropertyReport cantor_property_report(
    const RationalTower& t, const CantorApprox& approx,
    const std::vector<RegionDecomposition>& decomps);

}  // namespace cantor
