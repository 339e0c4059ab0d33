#pragma once

// Shared test fixtures: a realistic parameter schedule without the full
// region-certification machinery.  The escape radius is replaced by the
// growth target it certifies in the real pipeline (component diameters below
// 1/b^n force R to about 4 b^n; the extra half rung keeps the margin the
// certificate ladder would enforce), so magnitudes match the real
// construction and the tower sees the same doubly-exponential shrink rates.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>

#include "cantor/schedule.hpp"
#include "cantor/tower.hpp"

namespace fixtures {

inline cantor::ParameterSchedule schedule(uint64_t seed, int depth) {
  cantor::ParameterSchedule s = cantor::make_schedule_base();
  for (int n = 1; n <= depth; ++n) {
    cantor::cplx a = cantor::choose_a(seed, n, s.R.back());
    s.a.push_back(a);
    s.eps.push_back(cantor::choose_epsilon(n, s));
    double b = static_cast<double>(cantor::b_count(n));
    double target = std::max(2.0 * std::abs(a), 6.0 * std::pow(b, n));
    double R = std::abs(a);
    while (R < target) R *= 2.0;
    s.R.push_back(R);
    s.delta.push_back(cantor::choose_delta(
        s.delta.back(), std::numeric_limits<double>::infinity()));
  }
  return s;
}

inline cantor::RationalTower tower(const cantor::ParameterSchedule& s) {
  cantor::RationalTower t = cantor::make_tower();
  for (int n = 1; n <= s.depth(); ++n) cantor::advance_tower(t, s.a[n], s.eps[n]);
  return t;
}

}  // namespace fixtures
