#include "cantor/oracle.hpp"

#include <boost/multiprecision/cpp_complex.hpp>

#include <algorithm>
#include <cmath>
#include <complex>
#include <vector>

#include "cantor/errors.hpp"
#include "cantor/sphere.hpp"
#include "cantor/tolerances.hpp"

namespace cantor {

namespace {

// 160 decimal digits.  Sizing: coefficients reach ~1e102 at level 8 and the
// evaluation condition is ~1e18, which 40 digits would cover — but the level-8
// denominator has a 13-fold pole cluster (diameter ~1e-14, internal gaps down
// past 1e-70), and a root finder returns such a cluster as a perturbed
// multiple root with scatter ~(eps_work * 1e22)^(1/13).  160 digits puts that
// scatter near 2e-11, comfortably below the 1e-8 pole-matching tolerance;
// 120 digits would leave it at ~3e-8.
using wcplx = boost::multiprecision::cpp_complex<160>;
using wreal = wcplx::value_type;

constexpr double kCoeffLimit = 1e300;
// Step size below which an Aberth iterate has converged to working precision.
const wreal kStepFloor = wreal("1e-145");
// Denominator magnitudes below this fraction of sum |q_k||z|^k count as a
// pole hit.  The expanded coefficients cancel structurally by ~16 orders at
// ordinary points of the deep levels, so the floor must sit near the wide
// working precision, not near double precision.
const wreal kValueFloor = wreal("1e-140");

wcplx to_wide(cplx z) { return wcplx(z.real(), z.imag()); }

cplx to_double(const wcplx& z) {
  return {z.real().convert_to<double>(), z.imag().convert_to<double>()};
}

using Poly = std::vector<wcplx>;  // ascending powers

Poly poly_mul(const Poly& a, const Poly& b) {
  if (a.empty() || b.empty()) return {};
  Poly out(a.size() + b.size() - 1, wcplx(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
  return out;
}

Poly poly_add(const Poly& a, const Poly& b) {
  Poly out(std::max(a.size(), b.size()), wcplx(0));
  for (size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) out[i] += b[i];
  return out;
}

Poly poly_axpy(const Poly& a, const wcplx& s, const Poly& b) {  // a + s*b
  Poly out(std::max(a.size(), b.size()), wcplx(0));
  for (size_t i = 0; i < a.size(); ++i) out[i] += a[i];
  for (size_t i = 0; i < b.size(); ++i) out[i] += s * b[i];
  return out;
}

void poly_trim(Poly& c) {
  while (!c.empty() && abs(c.back()) == 0) c.pop_back();
}

wcplx whorner(const Poly& c, const wcplx& z) {
  wcplx acc(0);
  for (size_t i = c.size(); i-- > 0;) acc = acc * z + c[i];
  return acc;
}

// value and derivative in one sweep
std::pair<wcplx, wcplx> whorner_d(const Poly& c, const wcplx& z) {
  wcplx v(0), d(0);
  for (size_t i = c.size(); i-- > 0;) {
    d = d * z + v;
    v = v * z + c[i];
  }
  return {v, d};
}

// sum |c_k| |z|^k — scale for backward-error style certificates
wreal weval_bound(const Poly& c, const wreal& az) {
  wreal acc(0);
  for (size_t i = c.size(); i-- > 0;) acc = acc * az + abs(c[i]);
  return acc;
}

void check_magnitudes(const Poly& c) {
  for (const wcplx& v : c)
    if (abs(v) > kCoeffLimit)
      throw verification_error(
          "oracle-overflow: expanded coefficient magnitude exceeds 1e300");
}

std::vector<cplx> snapshot(const Poly& c) {
  std::vector<cplx> out(c.size());
  for (size_t i = 0; i < c.size(); ++i) out[i] = to_double(c[i]);
  return out;
}

// Initial Aberth guesses from the upper convex hull of (k, log|c_k|): each
// hull edge (i, j) contributes j - i guesses on the circle of radius
// exp((log|c_i| - log|c_j|) / (j - i)), the classical magnitude estimate for
// a batch of roots.  Angles are detuned from symmetry to avoid stalling on
// real-coefficient symmetries.
std::vector<wcplx> initial_guesses(const Poly& c) {
  const int n = static_cast<int>(c.size()) - 1;
  std::vector<double> lm(n + 1);
  for (int k = 0; k <= n; ++k) {
    double a = abs(c[k]).convert_to<double>();
    lm[k] = a > 0 ? std::log(a) : -1e307;
  }
  std::vector<int> hull;  // indices of upper-hull vertices, increasing k
  for (int k = 0; k <= n; ++k) {
    if (lm[k] <= -1e306) continue;
    while (hull.size() >= 2) {
      int i = hull[hull.size() - 2], j = hull[hull.size() - 1];
      // drop j if it lies below chord i..k
      if ((lm[k] - lm[i]) * (j - i) >= (lm[j] - lm[i]) * (k - i))
        hull.pop_back();
      else
        break;
    }
    hull.push_back(k);
  }
  std::vector<wcplx> guesses;
  guesses.reserve(n);
  for (size_t e = 1; e < hull.size(); ++e) {
    int i = hull[e - 1], j = hull[e];
    double r = std::exp((lm[i] - lm[j]) / (j - i));
    for (int m = 0; m < j - i; ++m) {
      double th = 2.0 * M_PI * (m + 0.5) / (j - i) + 0.4 + 0.1 * e;
      guesses.push_back(to_wide(std::polar(r, th)));
    }
  }
  return guesses;
}

std::vector<wcplx> aberth_roots(Poly c) {
  poly_trim(c);
  if (c.size() <= 1) return {};
  // deflate exact roots at the origin
  size_t zeros = 0;
  while (zeros + 1 < c.size() && abs(c[zeros]) == 0) ++zeros;
  std::vector<wcplx> roots(zeros, wcplx(0));
  if (zeros) c.erase(c.begin(), c.begin() + zeros);
  const int n = static_cast<int>(c.size()) - 1;
  if (n == 0) return roots;
  if (n == 1) {
    roots.push_back(-c[0] / c[1]);
    return roots;
  }

  std::vector<wcplx> z = initial_guesses(c);
  while (static_cast<int>(z.size()) < n)
    z.push_back(to_wide(std::polar(1.0, 0.7 * (1.0 + z.size()))));
  std::vector<bool> locked(n, false);
  for (int iter = 0; iter < tol::max_aberth_iters; ++iter) {
    bool all_locked = true;
    for (int i = 0; i < n; ++i) {
      if (locked[i]) continue;
      auto [v, d] = whorner_d(c, z[i]);
      if (abs(v) == 0) {
        locked[i] = true;
        continue;
      }
      wcplx newton = d == wcplx(0) ? wcplx(0) : v / d;
      wcplx rep(0);
      for (int j = 0; j < n; ++j) {
        if (j == i) continue;
        wcplx diff = z[i] - z[j];
        if (abs(diff) > 0) rep += wcplx(1) / diff;
      }
      wcplx denom = wcplx(1) - newton * rep;
      wcplx step = abs(denom) > 1e-12 ? newton / denom : newton;
      z[i] -= step;
      if (abs(step) <= kStepFloor * (wreal(1) + abs(z[i])))
        locked[i] = true;
      else
        all_locked = false;
    }
    if (all_locked) break;
  }

  const wreal cert(tol::root_tol);
  for (int i = 0; i < n; ++i) {
    wreal residual = abs(whorner(c, z[i]));
    wreal scale = weval_bound(c, abs(z[i]));
    if (!(residual <= cert * scale))
      throw verification_error(
          "oracle root certification failed: residual above backward-error "
          "bound");
    roots.push_back(z[i]);
  }
  return roots;
}

}  // namespace

struct OracleBackend {
  Poly num, den;
};

PolyPair oracle_expand(const RationalTower& t, int n) {
  if (n < 0 || n > t.depth)
    throw usage_error("oracle_expand: level outside the tower");
  if (n > tol::oracle_max_depth)
    throw usage_error("oracle_expand: level beyond supported expansion depth");

  Poly p0 = {wcplx(0), wcplx(1)};  // z
  Poly q0 = {wcplx(1)};
  auto backend = std::make_shared<OracleBackend>();
  if (n == 0) {
    backend->num = std::move(p0);
    backend->den = std::move(q0);
  } else {
    Poly p1 = {to_wide({t.eps[1], 0.0})};
    Poly q1 = {to_wide(-t.a[1]), wcplx(1)};
    for (int m = 2; m <= n; ++m) {
      Poly shifted = poly_axpy(p1, -to_wide(t.a[m]), q1);  // p1 - a_m q1
      Poly p2 = poly_add(poly_mul(p0, shifted),
                         poly_mul(poly_mul(q0, q1),
                                  Poly{to_wide({t.eps[m], 0.0})}));
      Poly q2 = poly_mul(q0, shifted);
      poly_trim(p2);
      poly_trim(q2);
      check_magnitudes(p2);
      check_magnitudes(q2);
      p0 = std::move(p1);
      q0 = std::move(q1);
      p1 = std::move(p2);
      q1 = std::move(q2);
    }
    backend->num = std::move(p1);
    backend->den = std::move(q1);
  }

  PolyPair out;
  out.level = n;
  out.num = snapshot(backend->num);
  out.den = snapshot(backend->den);
  out.wide = std::move(backend);
  return out;
}

int poly_degree(const std::vector<cplx>& c) {
  for (size_t i = c.size(); i-- > 0;)
    if (std::abs(c[i]) != 0.0) return static_cast<int>(i);
  return -1;
}

cplx poly_eval(const std::vector<cplx>& c, cplx z) {
  cplx acc = 0.0;
  for (size_t i = c.size(); i-- > 0;) acc = acc * z + c[i];
  return acc;
}

EvalResult oracle_value(const PolyPair& pq, cplx z) {
  if (!pq.wide) throw usage_error("oracle_value: missing wide backend");
  wcplx wz = to_wide(z);
  wcplx num = whorner(pq.wide->num, wz);
  wcplx den = whorner(pq.wide->den, wz);
  wreal floor = kValueFloor * weval_bound(pq.wide->den, abs(wz));
  EvalResult out;
  if (abs(den) <= floor) {
    out.infinite = true;
    out.value = {0.0, 0.0};
  } else {
    out.infinite = false;
    out.value = to_double(num / den);
  }
  return out;
}

std::vector<cplx> oracle_den_roots(const PolyPair& pq) {
  if (!pq.wide) throw usage_error("oracle_den_roots: missing wide backend");
  std::vector<wcplx> wr = aberth_roots(pq.wide->den);
  std::vector<cplx> out(wr.size());
  for (size_t i = 0; i < wr.size(); ++i) out[i] = to_double(wr[i]);
  return out;
}

double max_pole_root_mismatch(const RationalTower& t, const PolyPair& pq,
                              double min_clearance) {
  std::vector<cplx> roots = oracle_den_roots(pq);
  // finite pole positions at this level
  std::vector<cplx> poles;
  for (int idx : t.level_poles[pq.level]) {
    CPoint p = node_point(t, idx);
    if (is_infinity(p)) continue;  // encoded by the degree deficit, not a root
    poles.push_back(collapse(p));
  }
  double worst = 0.0;
  for (size_t i = 0; i < poles.size(); ++i) {
    if (min_clearance > 0.0) {
      double clear = 1e307;
      for (size_t j = 0; j < poles.size(); ++j)
        if (j != i) clear = std::min(clear, std::abs(poles[i] - poles[j]));
      if (clear <= min_clearance) continue;
    }
    double best = 1e307;
    for (cplx r : roots) best = std::min(best, std::abs(poles[i] - r));
    worst = std::max(worst, best / (1.0 + std::abs(poles[i])));
  }
  return worst;
}

}  // namespace cantor
