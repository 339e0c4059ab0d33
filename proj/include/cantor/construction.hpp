#pragma once

// The interleaved driver: at each level choose the shift target, the shear
// strength, and the escape radius (certified by the region decomposition),
// then measure the injectivity margin and shrink the convergence budget.
// Each completed level leaves a fully certified decomposition, so the
// construction can stop or resume at any depth.

#include <cstdint>
#include <vector>

#include "cantor/regions.hpp"
#include "cantor/schedule.hpp"
#include "cantor/tower.hpp"

namespace cantor {

// Per-level summary persisted with the state: counts, certified bounds,
// and the sampled injectivity margin behind the delta choice.
struct LevelVerdicts {
  int level = 0;
  int components = 0;
  int horizontal = 0;
  int vertical = 0;
  double max_diam_log2 = 0.0;  // log2 of the largest island diameter
  double min_pair_gap = 0.0;   // radians between closest certified islands
  double nest_margin = 0.0;    // min containment margin into the previous
                               // level, in cell-tolerance units (0 at level 1)
  double sigma = 0.0;          // sampled injectivity margin of the level map
                               // on the previous kept set (inf at level 1)
};

struct Construction {
  uint64_t seed = 0;
  ParameterSchedule s;
  RationalTower t;
  std::vector<RegionDecomposition> decomps;  // level n at decomps[n-1], linked
  std::vector<LevelVerdicts> levels;

  int depth() const { return static_cast<int>(levels.size()); }
};

// Sampled injectivity margin sigma_n: the minimum over qualifying sampled
// pairs of the level-(n-1) kept set of |gamma_n(z) - gamma_n(w)| divided by
// the geodesic distance d(z, w).  Pairs below twice the sampling resolution
// are excluded.  Requires n >= 2 and the level-(n-1) decomposition.
double injectivity_margin(const RationalTower& t, int n,
                          const RegionDecomposition& base, uint64_t seed);

// Run one more level of the interleaved construction.  Genericity failures
// in the pole catalogue retry with a nudged shift argument (same modulus).
void advance_level(Construction& c);

// Extend to target_depth (no-op if already there).
void extend_construction(Construction& c, int target_depth);

// Fresh construction from a seed.
Construction build_construction(uint64_t seed, int depth);

}  // namespace cantor
