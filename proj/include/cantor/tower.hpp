#pragma once

// The rational recursion
//   r_{-1} = 0,  r_0(z) = z,  r_{n+2}(z) = r_n(z) + eps_{n+2}/(r_{n+1}(z) - a_{n+2})
// together with exact bookkeeping of its poles.
//
// Pole geometry collapses doubly-exponentially with depth: a level-n pole u
// sits at distance ~|res(parent)|/|a_n| from its parent pole, and residues
// shrink by a factor ~eps_n/|a_n|^2 per generation.  Global coordinates
// therefore become useless long before the depths of interest, so poles are
// stored hierarchically: each node keeps an extended-range offset from its
// parent, and all geometry (separations, frames, Newton steps) is done in
// exact offset arithmetic along ancestor chains.
//
// Per-node local models make evaluation near deep poles well conditioned.
// At a pole u born at level b with residue c the following hold exactly:
//   * r_m(u) = a_b for every m > b of opposite parity ("value constancy":
//     the new term of the recursion vanishes at a pole of r_{m-1});
//   * the residue of r_m at u equals c for every m => b of equal parity
//     (the added term is regular at u);
//   * reg_m(u)   = reg_{m-2}(u) + eps_m/(a_b - a_m)          (regular part)
//   * slope_m(u) = slope_{m-2}(u) - eps_m q1_{m-1}(u)/(a_b - a_m)^2
//   * q1_m(u)    = q1_{m-2}(u) + eps_m/c                     (derivative)
// With these, r_m near u is c/d + reg_m + slope_m*d for the local offset d,
// which is the "Laurent splice" the evaluator uses instead of the
// catastrophically cancelling direct subtraction.
//
// The point at infinity is a pole of every even level; its subtree runs the
// identical machinery on r~(w) = r(1/w) in the inverted chart.

#include <cstdint>
#include <string>
#include <vector>

#include "cantor/scaled.hpp"
#include "cantor/sphere.hpp"

namespace cantor {

struct EvalResult {
  bool infinite = false;
  cplx value = {0.0, 0.0};
};

struct PoleNode {
  int birth = 0;    // first level at which this point is a pole
  int parent = -1;  // index into RationalTower::nodes, -1 for the two roots
  int chart = 0;    // 0: z-chart; 1: inverted chart (infinity subtree)

  // Offset from the parent node in the subtree's chart (for roots: the
  // absolute chart position).
  ScaledComplex offset;

  // Residue of r_birth at the pole, in the subtree's chart.  Identical for
  // every later level of the same parity, so stored once.
  ScaledComplex residue;

  // Value of r_m at the pole for all m > birth of opposite parity.
  cplx valconst = {0.0, 0.0};

  // Local models.  reg[j] and slope[j] describe the regular part of
  // r_{birth+2j} at the pole; q1[j] is the derivative of r_{birth-1+2j}
  // at the pole (j = 0 is the pre-birth derivative that produced the
  // residue; for the infinity root it is an unused placeholder).
  std::vector<cplx> reg;
  std::vector<ScaledComplex> slope;
  std::vector<ScaledComplex> q1;
};

// Margins recorded while certifying that a newborn pole is genuinely
// distinct from every other pole (localization certificate: the newborn
// stays well inside its parent's private neighborhood).
struct NewbornRecord {
  int level = 0;
  int node = 0;
  double offset_over_clearance = 0.0;  // |offset| / nearest-neighbor distance
  double newton_residual = 0.0;        // |r_{L-1}(u) - a_L| / |a_L|
  int newton_iters = 0;
};

struct RationalTower {
  int depth = -1;  // highest level with complete pole data (-1: empty)
  std::vector<cplx> a;      // a[0] placeholder
  std::vector<double> eps;  // eps[0] placeholder
  std::vector<PoleNode> nodes;
  std::vector<std::vector<int>> level_poles;  // level -> node indices
  std::vector<NewbornRecord> newborn_log;
};

// Fresh tower at depth 0: only the pole of r_0 at infinity.
RationalTower make_tower();

// Advance by one level.  Needs a_L, eps_L for L = t.depth + 1.  Level 1
// creates the pole of r_1 at a_1; levels >= 2 keep the previous-parity
// poles and add one Newton-solved newborn per pole of r_{L-1}.  All
// mutations are staged and committed only if every newborn certifies, so a
// thrown construction_error leaves the tower unchanged.  Error messages
// start with "genericity-failure" or "collision" when a retry with a
// perturbed a_L is the appropriate remedy.
void advance_tower(RationalTower& t, cplx a_L, double eps_L);

// ---- evaluation ---------------------------------------------------------

// r_n at a plain complex point, by direct recursion.  Accurate except deep
// inside pole clusters (use evaluate_local there).
EvalResult evaluate_global(const RationalTower& t, int n, cplx z);

// r_n at the point at infinity: 0 for odd n, infinity for even n.
EvalResult evaluate_at_infinity(const RationalTower& t, int n);

// r_n at (node position + offset), offset in the node's chart.  Walks the
// ancestor chain and splices the Laurent model at each chain birth level,
// so precision is relative to the offset scale no matter how deep the node
// sits.  In the inverted chart this returns r_n(1/w) — the same value
// space, so results are directly comparable.
EvalResult evaluate_local(const RationalTower& t, int n, int node,
                          ScaledComplex offset);

// Chart-local derivative of r_n at (node + offset) by a centered difference
// at relative step h (well conditioned inside the frame).
cplx derivative_local(const RationalTower& t, int n, int node,
                      ScaledComplex offset, double rel_step = 1e-6);

// ---- pole geometry ------------------------------------------------------

// Absolute chart position of a node (sum of offsets), extended range.
ScaledComplex node_chart_position(const RationalTower& t, int node);

// Collapsed two-chart position for display / far distances.
CPoint node_point(const RationalTower& t, int node);

// Spherical distance between two pole nodes, exact at any depth: offsets
// are differenced along the ancestor chains (extended range), then scaled
// by the local chord factor.  Cross-chart pairs are macroscopically far and
// use the collapsed representation.
ScaledReal node_separation(const RationalTower& t, int i, int j);

// Smallest pairwise separation within level n / between levels n and n+1.
ScaledReal level_min_separation(const RationalTower& t, int n);
ScaledReal consecutive_min_separation(const RationalTower& t, int n);

// Poles of r_{n-1} and r_n together (the level-n preimages of the point at
// infinity under the paired map); their count is k_{n+1}.
std::vector<int> infinity_preimage_nodes(const RationalTower& t, int n);

// ---- checks -------------------------------------------------------------

// Residue of r_n at a pole node, re-estimated independently of the stored
// value by discrete circle averaging of offset*value at two radii with
// Richardson extrapolation.  n must have the node's parity.
ScaledComplex residue_estimate(const RationalTower& t, int n, int node);

// First-order Laurent deviation |r_n(u + c/M) - M| / M at a pole.
double laurent_deviation(const RationalTower& t, int n, int node, double M);

// k_n (cached Fibonacci count, same convention as fib_k).
int64_t pole_count_expected(int n);

}  // namespace cantor
