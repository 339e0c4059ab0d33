#pragma once

// Evaluation and verification of the level maps into C^2.  The level-n map
// pairs the top two rational values, ordered so the newest value sits in
// the first coordinate at even levels: (r_n, r_{n-1}) for even n and
// (r_{n-1}, r_n) for odd n.  The map sends exactly the level-n pole set to
// the infinite point of C^2.  Verified here: geometric convergence of
// successive maps on kept compacts, properness (escaping shells land far
// from the origin at every later level), sampled injectivity with a
// derivative floor, and image-coverage consistency checks.

#include <cstdint>
#include <vector>

#include "cantor/regions.hpp"
#include "cantor/schedule.hpp"
#include "cantor/sphere.hpp"
#include "cantor/tower.hpp"

namespace cantor {

// The level-n map at an anchored point.  Infinite exactly when the point is
// a level-n pole (either coordinate's evaluation reports a pole).
C2Point gamma(const RationalTower& t, int n, const AnchoredPoint& z);

// Same map computed by running the shear chain from (z, 0).  Cross-check
// path only: accurate away from poles, loses precision near deep ones.
C2Point gamma_composed(const ParameterSchedule& s, int n, cplx z);

struct CauchyReport {
  int base = -1;                     // k: level of the sampled kept set
  std::vector<int> level;            // n for each difference gamma_{n+1}-gamma_n
  std::vector<double> max_residual;  // max over the sample
  std::vector<double> bound;         // delta_k * 2^{-(n+1+k)}
  double tail_sum = 0.0;             // sum of the rows, must stay < delta_k
  double worst_ratio = 0.0;          // max consecutive residual ratio
  int violations = 0;                // rows exceeding their bound
  bool ok = false;
};

// Successive-map convergence on a sample of the level-k kept set, for
// differences n -> n+1 with k <= n < n_max.  The two maps differ in exactly
// one coordinate, by the next shear term eps_{n+1}/(r_n - a_{n+1}); the
// residual is evaluated in that form, which is exact in relative terms,
// rather than by subtracting nearly equal map values.
CauchyReport cauchy_check(const RationalTower& t, const ParameterSchedule& s,
                          int k, int n_max,
                          const std::vector<AnchoredPoint>& sample);

struct PropernessReport {
  int level = -1;             // n: the shell sampled is K_n minus K_{n-1}
  int j_max = 0;              // gamma_{n+j} checked for j = 0..j_max
  double threshold = 0.0;     // R_{n-3}
  double min_max_coord = 0.0; // min over samples and j of max |coordinate|
  double margin = 0.0;        // min_max_coord / threshold
  bool ok = false;
};

// Escaping shells stay far from the origin under every later map: for each
// sampled point of the level-n shell and every j <= j_max, some coordinate
// of gamma_{n+j} has modulus >= R_{n-3}.  Requires n >= 3.
PropernessReport properness_check(const RationalTower& t,
                                  const ParameterSchedule& s, int n, int j_max,
                                  const std::vector<AnchoredPoint>& shell);

struct InjectivityReport {
  int level = -1;
  long pairs = 0;                 // qualifying pairs compared
  double min_pair_distance = 0.0; // min |gamma_n(z) - gamma_n(w)|
  double min_derivative = 0.0;    // min sphere-normalized divided difference
  bool ok = false;
};

// Sampled injectivity of the level-n map on the level-(n-1) kept set.
// Pairs closer than twice the sampling resolution of their component are
// excluded (they cannot be distinguished from refinement artifacts); the
// remaining pairs must have distinct images, and first divided differences
// along four directions must clear the derivative floor.  `base` is the
// level-(n-1) decomposition the sample was drawn from.
InjectivityReport injectivity_check(const RationalTower& t, int n,
                                    const RegionDecomposition& base,
                                    const std::vector<AnchoredPoint>& sample);

// Random-sample count of points whose image has both coordinate moduli
// >= R (expected zero: the image avoids the far corner of C^2).
int corner_violations(const RationalTower& t, int n, double R, int count,
                      uint64_t seed);

// Random-sample count of disagreements between the two kept-set
// characterizations: image inside the closed bidisc of radius R versus
// membership in the level-n kept set (expected zero).
int bidisc_membership_mismatches(const RationalTower& t, int n, double R,
                                 int count, uint64_t seed);

}  // namespace cantor
