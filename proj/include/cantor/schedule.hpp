#pragma once

// The parameter schedule of the construction: the pole-shift targets a_n,
// the shear strengths eps_n, the escape radii R_n, and the shrink budgets
// delta_n, chosen in the interleaved order
//   a_1, eps_1, R_1, a_2, eps_2, R_2, ...
// so that each choice only depends on parameters already fixed.

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "cantor/scaled.hpp"

namespace cantor {

// k_0 = k_1 = 1, k_{n+1} = k_n + k_{n-1}.  Degrees and component counts of
// the construction all follow this sequence.
int64_t fib_k(int n);

// Number of escape components expected at level n: b_n = k_{n+1}.
int64_t b_count(int n);

struct MarginRecord {
  std::string constraint;
  int level = 0;
  double slack = 0.0;  // achieved minus required, in the constraint's units
};

struct ParameterSchedule {
  // Index 0 of a/eps is an unused placeholder so a[n] is the level-n value.
  std::vector<cplx> a;
  std::vector<double> eps;
  std::vector<double> R;      // R[0] = 1/2 by convention
  std::vector<double> delta;  // delta[0] = 1/4
  std::vector<MarginRecord> margins;

  // Highest level n for which a[n], eps[n], R[n], delta[n] all exist.
  int depth() const;
};

ParameterSchedule make_schedule_base();

// New shift target: modulus exactly sqrt(2)*R_prev + 1 (strictly above the
// required sqrt(2)*R_prev + 1/2), argument drawn from the seeded stream for
// (seed, level).  retry > 0 nudges the argument deterministically, keeping
// the modulus, for use when the unperturbed choice lands degenerately.
cplx choose_a(uint64_t seed, int level, double R_prev, int retry = 0);

// Largest safe shear strength at level n, halved once more for margin:
//   eps_n = (1/2) * min_{0<=j<n} delta_j * 2^{-(j+n)} * (|a_n| - rho_j - 1/2)
// where rho_j = R_j except rho_0 = 0 (the innermost reference bidisc is the
// 1/2-ball around the origin, not a ball of radius R_0 + 1/2).  The minimum
// is exact because the sup of |g_n| over a bidisc of radius rho + 1/2 is
// eps_n / (|a_n| - rho - 1/2).  Clamped to eps_{n-1}/2 so the sequence
// halves at least geometrically.  Requires a[n] and delta[0..n-1].
double choose_epsilon(int n, const ParameterSchedule& s);

// delta_n = min(delta_{n-1}/2, sigma_n/4), sigma_n being the sampled
// injectivity margin of the current map on the previous kept set (callers
// pass +infinity when that set is empty, which happens exactly once, at
// n = 1).
double choose_delta(double delta_prev, double sigma);

// One shear of the tower: level parity decides which coordinate moves.
//   odd n:  (x, y) -> (x, y + g(x))
//   even n: (x, y) -> (x + g(y), y)
// with g(z) = eps/(z - a).
struct ShearMap {
  int level = 1;
  cplx a = {0.0, 0.0};
  double eps = 0.0;

  cplx g(cplx z) const { return eps / (z - a); }
  void apply(cplx& x, cplx& y) const {
    if (level % 2 != 0) y += g(x);
    else x += g(y);
  }
};

ShearMap shear_for_level(const ParameterSchedule& s, int n);

// sup of |g| over the closed bidisc of radius rho (attained where the moving
// coordinate's disc comes closest to a).  Requires |a| > rho.
double shear_sup_on_bidisc(double rho, cplx a, double eps);

// Sampled sup over the distinguished boundary of the bidisc of radius
// rho_base of |f_n o ... o f_j - id| (Euclidean in C^2).  rho_base = 0 means
// the single point (0,0).
double composed_shear_deviation(const ParameterSchedule& s, int j, int n,
                                double rho_base, int nsamples, uint64_t seed);

// Escape-radius ladder: tries R = a_abs * 2^m for m = 1, 2, ... and returns
// the first R the caller-supplied certifier accepts.  The certifier returns
// an empty string on success, otherwise the name of the failed certificate.
// Throws construction_error when the ladder is exhausted.
double choose_R(int n, double a_abs,
                const std::function<std::string(double)>& certify);

}  // namespace cantor
