#pragma once

// Exact-polynomial backend for small depths.  The tower map at level n is a
// rational function p_n/q_n; expanding the pair gives an independent way to
// evaluate the map and to locate its poles (denominator roots), used to
// cross-check the recursive evaluator and the tracked pole set.
//
// Degrees grow as Fibonacci numbers and the coefficients span hundreds of
// orders of magnitude, which makes double-precision expansion hopelessly
// ill-conditioned beyond level ~6 (evaluating the expanded form cancels
// catastrophically even where the function itself is tame).  The backend
// therefore carries its coefficients in wide multiprecision floats and only
// rounds results (values, roots, coefficient snapshots) to double at the
// boundary; the advertised agreement tolerances refer to those results.

#include <memory>
#include <vector>

#include "cantor/scaled.hpp"
#include "cantor/tower.hpp"

namespace cantor {

struct OracleBackend;  // wide-precision coefficients (internal to the module)

struct PolyPair {
  int level = -1;
  std::vector<cplx> num;  // coefficient snapshots, ascending powers
  std::vector<cplx> den;
  std::shared_ptr<const OracleBackend> wide;
};

// Expand the level-n map as a coefficient pair via
//   p_{m} = p_{m-2} (p_{m-1} - a_m q_{m-1}) + eps_m q_{m-2} q_{m-1}
//   q_{m} = q_{m-2} (p_{m-1} - a_m q_{m-1})
// from p_0 = z, q_0 = 1, p_1 = eps_1, q_1 = z - a_1.
// Throws usage_error for n beyond the supported expansion depth and
// verification_error ("oracle-overflow") if any coefficient exceeds 1e300.
PolyPair oracle_expand(const RationalTower& t, int n);

int poly_degree(const std::vector<cplx>& c);

// Plain double Horner evaluation of a coefficient snapshot.
cplx poly_eval(const std::vector<cplx>& c, cplx z);

// num(z)/den(z) through the wide backend, with the same infinity convention
// as the tower evaluator (relatively tiny denominator -> infinite).
EvalResult oracle_value(const PolyPair& pq, cplx z);

// All denominator roots by the Aberth–Ehrlich simultaneous iteration in the
// wide backend (initial guesses from the coefficient Newton polygon), each
// carrying a residual certificate |q(root)| <= root_tol * sum |q_k||root|^k;
// any uncertified root throws verification_error.  Roots of a cluster tighter
// than the wide working precision resolves come back as a scattered multiple
// root, still inside the cluster's hull to far better than pole-matching
// tolerance.
std::vector<cplx> oracle_den_roots(const PolyPair& pq);

// Max over the finite tracked poles of r_n (clearance above min_clearance)
// of the distance to the nearest denominator root, relative to the pole's
// own magnitude: |pole - root| / (1 + |pole|).
double max_pole_root_mismatch(const RationalTower& t, const PolyPair& pq,
                              double min_clearance = 0.0);

}  // namespace cantor
