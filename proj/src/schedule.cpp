#include "cantor/schedule.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cantor/errors.hpp"
#include "cantor/rng.hpp"
#include "cantor/tolerances.hpp"

namespace cantor {

namespace {
constexpr double kPi = 3.14159265358979323846;
}

int64_t fib_k(int n) {
  if (n < 0) throw usage_error("fib_k: negative index");
  int64_t prev = 1, cur = 1;  // k_0, k_1
  for (int i = 1; i <= n - 1; ++i) {
    int64_t next = cur + prev;
    prev = cur;
    cur = next;
  }
  return n == 0 ? prev : cur;
}

int64_t b_count(int n) { return fib_k(n + 1); }

int ParameterSchedule::depth() const {
  std::size_t n = std::min(std::min(a.size(), eps.size()),
                           std::min(R.size(), delta.size()));
  return n == 0 ? 0 : static_cast<int>(n) - 1;
}

ParameterSchedule make_schedule_base() {
  ParameterSchedule s;
  s.a = {cplx{0.0, 0.0}};
  s.eps = {0.0};
  s.R = {0.5};
  s.delta = {0.25};
  return s;
}

cplx choose_a(uint64_t seed, int level, double R_prev, int retry) {
  Rng rng(seed, level, "choose-a");
  double theta = rng.uniform(0.0, 2.0 * kPi);
  for (int r = 0; r < retry; ++r)
    theta += tol::genericity_nudge * rng.uniform(0.5, 1.5);
  double mod = std::sqrt(2.0) * R_prev + 1.0;
  return {mod * std::cos(theta), mod * std::sin(theta)};
}

double choose_epsilon(int n, const ParameterSchedule& s) {
  if (n < 1 || n >= static_cast<int>(s.a.size()) ||
      n > static_cast<int>(s.delta.size()) || n > static_cast<int>(s.R.size()))
    throw usage_error("choose_epsilon: schedule not ready for this level");
  double a_abs = std::abs(s.a[n]);
  double best = std::numeric_limits<double>::infinity();
  for (int j = 0; j < n; ++j) {
    double rho = j == 0 ? 0.0 : s.R[j];
    double gap = a_abs - rho - 0.5;
    if (gap <= 0.0)
      throw construction_error("choose_epsilon: shift target inside protected bidisc");
    double bound = s.delta[j] * std::ldexp(1.0, -(j + n)) * gap;
    best = std::min(best, bound);
  }
  double eps = tol::epsilon_safety * best;
  if (n >= 2) eps = std::min(eps, s.eps[n - 1] / 2.0);
  return eps;
}

double choose_delta(double delta_prev, double sigma) {
  if (!(sigma > 0.0))
    throw construction_error("choose_delta: nonpositive injectivity margin");
  return std::min(delta_prev / 2.0, sigma / 4.0);
}

ShearMap shear_for_level(const ParameterSchedule& s, int n) {
  if (n < 1 || n >= static_cast<int>(s.a.size()) ||
      n >= static_cast<int>(s.eps.size()))
    throw usage_error("shear_for_level: level outside schedule");
  return {n, s.a[n], s.eps[n]};
}

double shear_sup_on_bidisc(double rho, cplx a, double eps) {
  double gap = std::abs(a) - rho;
  if (gap <= 0.0)
    throw usage_error("shear_sup_on_bidisc: pole of the shear inside the bidisc");
  return eps / gap;
}

double composed_shear_deviation(const ParameterSchedule& s, int j, int n,
                                double rho_base, int nsamples, uint64_t seed) {
  if (j < 1 || j > n) throw usage_error("composed_shear_deviation: bad range");
  Rng rng(seed, j * 1000 + n, "compose-deviation");
  double worst = 0.0;
  int count = rho_base == 0.0 ? 1 : nsamples;
  for (int i = 0; i < count; ++i) {
    cplx x = {0.0, 0.0}, y = {0.0, 0.0};
    if (rho_base > 0.0) {
      x = rho_base * rng.unit_circle();
      y = rho_base * rng.unit_circle();
    }
    cplx x0 = x, y0 = y;
    for (int m = j; m <= n; ++m) shear_for_level(s, m).apply(x, y);
    double dev = std::hypot(std::abs(x - x0), std::abs(y - y0));
    worst = std::max(worst, dev);
  }
  return worst;
}

double choose_R(int n, double a_abs,
                const std::function<std::string(double)>& certify) {
  std::string last_failure;
  for (int m = 1; m <= tol::ladder_max; ++m) {
    double R = a_abs * std::ldexp(1.0, m);
    last_failure = certify(R);
    if (last_failure.empty()) return R;
  }
  throw construction_error("choose_R: ladder exhausted at level " +
                           std::to_string(n) + "; last failed certificate: " +
                           last_failure);
}

}  // namespace cantor
