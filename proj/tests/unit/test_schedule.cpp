#include "doctest.h"

#include <cmath>
#include <limits>

#include "cantor/errors.hpp"
#include "cantor/rng.hpp"
#include "cantor/schedule.hpp"
#include "cantor/tolerances.hpp"

using namespace cantor;

TEST_CASE("fibonacci degree sequence") {
  CHECK(fib_k(0) == 1);
  CHECK(fib_k(1) == 1);
  CHECK(fib_k(2) == 2);
  CHECK(fib_k(3) == 3);
  CHECK(fib_k(4) == 5);
  CHECK(fib_k(5) == 8);
  CHECK(fib_k(6) == 13);
  CHECK(fib_k(7) == 21);
  CHECK(fib_k(8) == 34);
  CHECK(b_count(1) == 2);
  CHECK(b_count(2) == 3);
  CHECK(b_count(7) == 34);
}

TEST_CASE("epsilon choice at level one with unit shift target") {
  // Hand computation: only j = 0 contributes, with the origin ball of
  // radius 1/2 as the protected region:
  //   bound = (1/4) * 2^-1 * (1 - 0 - 1/2) = 1/16,  halved -> 1/32.
  ParameterSchedule s = make_schedule_base();
  s.a.push_back({1.0, 0.0});
  double e1 = choose_epsilon(1, s);
  CHECK(e1 == 1.0 / 32.0);
}

TEST_CASE("epsilon choice at level two recomputed independently") {
  ParameterSchedule s = make_schedule_base();
  double R1 = 5.0;
  s.a.push_back({1.0, 0.0});
  s.eps.push_back(choose_epsilon(1, s));
  s.R.push_back(R1);
  s.delta.push_back(0.125);
  s.a.push_back({2.0 * R1, 0.0});

  double j0 = 0.25 * std::ldexp(1.0, -2) * (2.0 * R1 - 0.5);
  double j1 = 0.125 * std::ldexp(1.0, -3) * (2.0 * R1 - R1 - 0.5);
  double expect = std::min(0.5 * std::min(j0, j1), s.eps[1] / 2.0);
  CHECK(choose_epsilon(2, s) == doctest::Approx(expect).epsilon(1e-15));
  CHECK(choose_epsilon(2, s) < s.eps[1]);
}

TEST_CASE("epsilon halves at least geometrically over random schedules") {
  Rng rng(99, 0, "schedule-eps-mono");
  for (int trial = 0; trial < 200; ++trial) {
    ParameterSchedule s = make_schedule_base();
    double R_prev = 0.5;
    uint64_t seed = rng.next_u64();
    bool ok = true;
    for (int n = 1; n <= 6; ++n) {
      s.a.push_back(choose_a(seed, n, R_prev));
      double e = choose_epsilon(n, s);
      if (n >= 2 && !(e <= s.eps[n - 1] / 2.0)) ok = false;
      if (!(e > 0.0)) ok = false;
      s.eps.push_back(e);
      R_prev = std::abs(s.a[n]) * (2.0 + rng.uniform());  // mock certified radius
      s.R.push_back(R_prev);
      s.delta.push_back(s.delta[n - 1] / 2.0);
    }
    CHECK(ok);
  }
}

TEST_CASE("shift target choice: modulus, determinism, perturbation") {
  double R = 7.25;
  cplx a1 = choose_a(1234, 3, R);
  cplx a2 = choose_a(1234, 3, R);
  CHECK(a1 == a2);
  CHECK(std::abs(a1) == doctest::Approx(std::sqrt(2.0) * R + 1.0).epsilon(1e-15));
  CHECK(std::abs(a1) > std::sqrt(2.0) * R + 0.5);
  CHECK(std::abs(a1) > R);

  cplx b = choose_a(1234, 4, R);
  CHECK(std::abs(a1 - b) > 1e-12);  // different levels decorrelate

  cplx a_retry = choose_a(1234, 3, R, 1);
  CHECK(std::abs(a_retry) == doctest::Approx(std::abs(a1)).epsilon(1e-15));
  double shift = std::abs(a_retry - a1);
  CHECK(shift > 0.0);
  CHECK(shift < 10.0 * tol::genericity_nudge * std::abs(a1));
}

TEST_CASE("escape radius ladder picks first certified rung") {
  double a_abs = 3.0;
  int calls = 0;
  double R = choose_R(2, a_abs, [&](double r) -> std::string {
    ++calls;
    return r >= 8.0 * a_abs ? "" : "component-count";
  });
  CHECK(R == 8.0 * a_abs);
  CHECK(calls == 3);

  CHECK_THROWS_AS(choose_R(2, a_abs, [](double) { return std::string("diameter"); }),
                  construction_error);
  try {
    choose_R(2, a_abs, [](double) { return std::string("diameter"); });
  } catch (const construction_error& e) {
    CHECK(std::string(e.what()).find("diameter") != std::string::npos);
  }
}

TEST_CASE("shear parity moves the right coordinate") {
  ShearMap odd{1, {2.0, 0.0}, 0.5};
  cplx x = {0.0, 0.0}, y = {1.0, 0.0};
  odd.apply(x, y);
  CHECK(x == cplx{0.0, 0.0});
  CHECK(y == cplx{1.0, 0.0} + 0.5 / (cplx{0.0, 0.0} - cplx{2.0, 0.0}));

  ShearMap even{2, {3.0, 0.0}, 0.25};
  x = {1.0, 0.0};
  y = {0.5, 0.5};
  cplx y_before = y;
  even.apply(x, y);
  CHECK(y == y_before);
  CHECK(x == cplx{1.0, 0.0} + 0.25 / (y_before - cplx{3.0, 0.0}));
}

TEST_CASE("shear sup closed form bounds and matches boundary samples") {
  Rng rng(55, 0, "shear-sup");
  for (int trial = 0; trial < 50; ++trial) {
    double a_abs = rng.uniform(1.5, 3.0);
    cplx a = a_abs * rng.unit_circle();
    double eps = rng.uniform(0.01, 0.2);
    double rho = rng.uniform(0.1, a_abs - 0.5);
    double closed = shear_sup_on_bidisc(rho, a, eps);
    double worst = 0.0;
    for (int i = 0; i < 2000; ++i) {
      double t = 2.0 * 3.14159265358979323846 * i / 2000.0;
      cplx z = rho * cplx{std::cos(t), std::sin(t)};
      double v = std::abs(eps / (z - a));
      CHECK(v <= closed * (1.0 + 1e-12));
      worst = std::max(worst, v);
    }
    CHECK(worst > 0.95 * closed);
  }
  CHECK_THROWS_AS(shear_sup_on_bidisc(2.0, {1.0, 0.0}, 0.1), usage_error);
}

namespace {

// Valid-by-construction synthetic schedule: radii grow geometrically, shift
// targets and shear strengths come from the real chooser.
ParameterSchedule synthetic_schedule(uint64_t seed, int depth) {
  ParameterSchedule s = make_schedule_base();
  for (int n = 1; n <= depth; ++n) {
    s.a.push_back(choose_a(seed, n, s.R[n - 1]));
    s.eps.push_back(choose_epsilon(n, s));
    s.R.push_back(4.0 * std::abs(s.a[n]) + 1.0);
    s.delta.push_back(choose_delta(s.delta[n - 1],
                                   std::numeric_limits<double>::infinity()));
  }
  return s;
}

}  // namespace

TEST_CASE("per level shear deviation certificate holds with factor two") {
  ParameterSchedule s = synthetic_schedule(2024, 6);
  for (int n = 1; n <= 6; ++n) {
    for (int j = 0; j < n; ++j) {
      double rho = (j == 0 ? 0.0 : s.R[j]) + 0.5;
      double sup = shear_sup_on_bidisc(rho, s.a[n], s.eps[n]);
      double budget = s.delta[j] * std::ldexp(1.0, -(j + n));
      CHECK(sup < budget);
      CHECK(sup <= 0.5 * budget * (1.0 + 1e-12));  // designed safety factor
    }
  }
}

TEST_CASE("telescoped shear compositions stay within a half unit") {
  ParameterSchedule s = synthetic_schedule(2024, 6);
  for (int n = 1; n <= 6; ++n) {
    for (int j = 1; j <= n; ++j) {
      double rho_base = j == 1 ? 0.0 : s.R[j - 1];
      double dev = composed_shear_deviation(s, j, n, rho_base, 1000, 77);
      CHECK(dev < 0.5);
    }
  }
}

TEST_CASE("schedule bookkeeping: base values and depth") {
  ParameterSchedule s = make_schedule_base();
  CHECK(s.R[0] == 0.5);
  CHECK(s.delta[0] == 0.25);
  CHECK(s.depth() == 0);
  s = synthetic_schedule(1, 3);
  CHECK(s.depth() == 3);
  // strictly monotone sequences
  for (int n = 1; n <= 3; ++n) {
    CHECK(s.R[n] > s.R[n - 1]);
    CHECK(s.delta[n] < s.delta[n - 1]);
    CHECK(std::abs(s.a[n]) > s.R[n - 1]);
    CHECK(std::abs(s.a[n]) < s.R[n]);
    if (n >= 2) CHECK(s.eps[n] < s.eps[n - 1]);
  }
}
