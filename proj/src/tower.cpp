#include "cantor/tower.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cantor/errors.hpp"
#include "cantor/schedule.hpp"
#include "cantor/tolerances.hpp"

namespace cantor {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Model-array index helpers.  For a node born at level b:
//   reg/slope entry j  <->  level b + 2j          (same parity as b)
//   q1 entry j         <->  level b - 1 + 2j      (opposite parity)
int parity_index(const PoleNode& u, int level) { return (level - u.birth) / 2; }
int q1_index(const PoleNode& u, int level) { return (level - u.birth + 1) / 2; }

bool is_parity_level(const PoleNode& u, int level) {
  return (level - u.birth) % 2 == 0;
}

// Ancestor chain from root down to the node, and the offsets from each
// chain element to the evaluation point (point = node position + offset).
struct Chain {
  std::vector<int> nodes;            // root first
  std::vector<ScaledComplex> delta;  // offset from nodes[i] to the point
};

Chain build_chain(const RationalTower& t, int node, ScaledComplex offset) {
  Chain c;
  int cur = node;
  ScaledComplex acc = offset;
  while (cur >= 0) {
    c.nodes.push_back(cur);
    c.delta.push_back(acc);
    acc = acc + t.nodes[cur].offset;
    cur = t.nodes[cur].parent;
  }
  std::reverse(c.nodes.begin(), c.nodes.end());
  std::reverse(c.delta.begin(), c.delta.end());
  return c;
}

struct Val {
  bool inf = false;
  cplx v = {0.0, 0.0};
};

// Core recursion with optional Laurent splices at the chain birth levels.
// For a z-chart chain, z0 is the collapsed evaluation point; for the
// inverted chart the splice at level 0 supplies the start value.
Val eval_core(const RationalTower& t, int n, const Chain* chain, cplx z0) {
  std::vector<Val> V(static_cast<std::size_t>(n) + 1);
  // splice lookup: birth level -> chain position
  auto splice_at = [&](int m) -> int {
    if (!chain) return -1;
    for (std::size_t i = 0; i < chain->nodes.size(); ++i)
      if (t.nodes[chain->nodes[i]].birth == m) return static_cast<int>(i);
    return -1;
  };
  for (int m = 0; m <= n; ++m) {
    int sp = splice_at(m);
    if (sp >= 0) {
      const PoleNode& u = t.nodes[chain->nodes[sp]];
      const ScaledComplex& d = chain->delta[sp];
      if (d.is_zero()) {
        V[m].inf = true;
        continue;
      }
      int j = parity_index(u, m);
      ScaledComplex main = u.residue / d;
      cplx val = main.to_cplx() + u.reg[j] + (u.slope[j] * d).to_cplx();
      if (!std::isfinite(val.real()) || !std::isfinite(val.imag())) {
        V[m].inf = true;
      } else {
        V[m].v = val;
      }
      continue;
    }
    if (m == 0) {
      V[0].v = z0;
      continue;
    }
    // r_m = r_{m-2} + eps_m / (r_{m-1} - a_m), with r_{-1} = 0.
    const Val& prev1 = V[m - 1];
    Val prev2 = m >= 2 ? V[m - 2] : Val{};
    if (prev2.inf) {
      V[m].inf = true;
      continue;
    }
    cplx term;
    if (prev1.inf) {
      term = {0.0, 0.0};
    } else {
      cplx den = prev1.v - t.a[m];
      if (std::abs(den) <= tol::pole_eval_tol * (1.0 + std::abs(t.a[m]))) {
        V[m].inf = true;
        continue;
      }
      term = t.eps[m] / den;
    }
    V[m].v = prev2.v + term;
    continue;
  }
  return V[n];
}

// |difference of chart positions| for nodes in the same subtree via the
// lowest common ancestor (extended range, no cancellation).  Returns a huge
// sentinel for cross-subtree pairs, which are macroscopically separated.
ScaledReal chart_distance(const RationalTower& t, int i, int j) {
  if (i == j) return ScaledReal();
  std::vector<int> anc;
  for (int cur = i; cur >= 0; cur = t.nodes[cur].parent) anc.push_back(cur);
  ScaledComplex dj;
  int meet = -1;
  for (int cur = j; cur >= 0; cur = t.nodes[cur].parent) {
    if (std::find(anc.begin(), anc.end(), cur) != anc.end()) {
      meet = cur;
      break;
    }
    dj = dj + t.nodes[cur].offset;
  }
  if (meet < 0) return pow2(4000);  // different subtrees
  ScaledComplex di;
  for (int cur = i; cur != meet; cur = t.nodes[cur].parent)
    di = di + t.nodes[cur].offset;
  return abs(di - dj);
}

ScaledReal spherical_from_chord(ScaledReal chord) {
  double c = chord.to_double();
  if (c > 1e-8) return ScaledReal(2.0 * std::asin(std::min(1.0, c / 2.0)));
  return chord;  // asin(x) = x to within x^3/6 here
}

// Minimum chart distance from node w to any other pole of r_level.
ScaledReal clearance_at_level(const RationalTower& t, int level, int w) {
  ScaledReal best = pow2(4000);
  for (int other : t.level_poles[level]) {
    if (other == w) continue;
    best = min(best, chart_distance(t, w, other));
  }
  return best;
}

// Value and first three chart derivatives, carried through the recursion.
struct Jet {
  ScaledComplex v, d1, d2, d3;
};

// Jet of eps/(X - a) given the jet of X.
Jet shear_jet(double eps, cplx a, const Jet& X) {
  ScaledComplex D = X.v - ScaledComplex(a);
  ScaledComplex q = ScaledComplex(cplx{eps, 0.0}) / D;  // eps/D
  ScaledComplex qD = q / D;                             // eps/D^2
  ScaledComplex qDD = qD / D;                           // eps/D^3
  ScaledComplex qDDD = qDD / D;                         // eps/D^4
  Jet g;
  g.v = q;
  g.d1 = ScaledComplex() - qD * X.d1;
  g.d2 = (qDD * X.d1 * X.d1) * ScaledReal(2.0) - qD * X.d2;
  g.d3 = (qDD * X.d1 * X.d2) * ScaledReal(6.0) -
         (qDDD * X.d1 * X.d1 * X.d1) * ScaledReal(6.0) - qD * X.d3;
  return g;
}

// Jets of the level-n and level-(n-1) maps in the given chart at the
// first-generation point "subtree root + eta".  The root pole is entered
// exactly (1/eta, or eps_1/eta at the finite root), so the jet keeps full
// relative accuracy however small eta is; away from the root the recursion
// meets no cancelling denominators at such points.
struct JetPair {
  Jet hi;  // level n
  Jet lo;  // level n-1
};

JetPair root_jets(const RationalTower& t, int n, int chart, ScaledComplex eta) {
  Jet prev2;  // starts as the identically-zero "level -1" map
  Jet prev1;
  int m0;
  if (chart == 1) {
    // Variable w at w = eta; level 0 is 1/w.
    prev1.v = ScaledComplex(cplx{1.0, 0.0}) / eta;
    prev1.d1 = (ScaledComplex() - prev1.v) / eta;
    prev1.d2 = prev1.d1 / eta * ScaledReal(-2.0);
    prev1.d3 = prev1.d2 / eta * ScaledReal(-3.0);
    m0 = 1;
  } else {
    // Variable z at z = a_1 + eta; level 0 is the identity and level 1 is
    // entered exactly as eps_1/eta to avoid the cancelling subtraction.
    Jet zero_level;
    zero_level.v = ScaledComplex(t.a[1]) + eta;
    zero_level.d1 = ScaledComplex(cplx{1.0, 0.0});
    Jet one_level;
    one_level.v = ScaledComplex(cplx{t.eps[1], 0.0}) / eta;
    one_level.d1 = (ScaledComplex() - one_level.v) / eta;
    one_level.d2 = one_level.d1 / eta * ScaledReal(-2.0);
    one_level.d3 = one_level.d2 / eta * ScaledReal(-3.0);
    prev2 = zero_level;
    prev1 = one_level;
    m0 = 2;
  }
  for (int m = m0; m <= n; ++m) {
    Jet g = shear_jet(t.eps[m], t.a[m], prev1);
    Jet cur;
    cur.v = prev2.v + g.v;
    cur.d1 = prev2.d1 + g.d1;
    cur.d2 = prev2.d2 + g.d2;
    cur.d3 = prev2.d3 + g.d3;
    prev2 = prev1;
    prev1 = cur;
  }
  return {prev1, prev2};
}

}  // namespace

int64_t pole_count_expected(int n) { return fib_k(n); }

RationalTower make_tower() {
  RationalTower t;
  t.depth = 0;
  t.a = {cplx{0.0, 0.0}};
  t.eps = {0.0};
  PoleNode inf_root;
  inf_root.birth = 0;
  inf_root.parent = -1;
  inf_root.chart = 1;
  inf_root.offset = ScaledComplex();          // w = 0
  inf_root.residue = ScaledComplex(cplx{1.0, 0.0});  // w * (1/w) = 1
  inf_root.valconst = {0.0, 0.0};             // r_odd at infinity
  inf_root.reg = {cplx{0.0, 0.0}};            // r~_0 = 1/w exactly
  inf_root.slope = {ScaledComplex()};
  inf_root.q1 = {ScaledComplex()};            // placeholder ("level -1")
  t.nodes.push_back(inf_root);
  t.level_poles.push_back({0});
  return t;
}

void advance_tower(RationalTower& t, cplx a_L, double eps_L) {
  const int L = t.depth + 1;
  if (static_cast<int>(t.a.size()) != L || static_cast<int>(t.eps.size()) != L)
    throw usage_error("advance_tower: schedule bookkeeping out of sync");
  if (!(eps_L > 0.0))
    throw usage_error("advance_tower: shear strength must be positive");
  t.a.push_back(a_L);
  t.eps.push_back(eps_L);

  if (L == 1) {
    PoleNode root;
    root.birth = 1;
    root.parent = -1;
    root.chart = 0;
    root.offset = ScaledComplex(a_L);
    root.residue = ScaledComplex(cplx{eps_L, 0.0});
    root.valconst = a_L;
    root.reg = {cplx{0.0, 0.0}};   // r_1 = eps_1/(z - a_1) + 0 exactly
    root.slope = {ScaledComplex()};
    root.q1 = {ScaledComplex(cplx{1.0, 0.0})};  // r_0' = 1
    t.nodes.push_back(root);
    // q1 of the infinity root at level 1: q1[1] = q1[0] + eps_1/residue.
    t.nodes[0].q1.push_back(t.nodes[0].q1[0] +
                            ScaledComplex(cplx{eps_L, 0.0}) / t.nodes[0].residue);
    t.level_poles.push_back({1});
    t.depth = 1;
    return;
  }

  const std::size_t old_nodes = t.nodes.size();
  auto rollback = [&]() {
    for (std::size_t idx = 0; idx < old_nodes; ++idx) {
      PoleNode& u = t.nodes[idx];
      if (is_parity_level(u, L)) {
        u.reg.pop_back();
        u.slope.pop_back();
      } else {
        u.q1.pop_back();
      }
    }
    t.nodes.resize(old_nodes);
    if (static_cast<int>(t.level_poles.size()) > L) t.level_poles.resize(L);
    t.a.pop_back();
    t.eps.pop_back();
  };

  try {
    // Extend every existing node's model by one level.
    for (std::size_t idx = 0; idx < old_nodes; ++idx) {
      PoleNode& u = t.nodes[idx];
      if (is_parity_level(u, L)) {
        int j = parity_index(u, L);
        cplx gap = u.valconst - a_L;
        u.reg.push_back(u.reg[j - 1] + eps_L / gap);
        // slope uses the derivative model at level L-1 (q1 index j).
        ScaledComplex corr =
            ScaledComplex(cplx{eps_L, 0.0} / (gap * gap)) * u.q1[j];
        u.slope.push_back(u.slope[j - 1] - corr);
      } else {
        int j = q1_index(u, L);
        u.q1.push_back(u.q1[j - 1] + ScaledComplex(cplx{eps_L, 0.0}) / u.residue);
      }
    }

    // One newborn pole per pole of r_{L-1}, localized near its parent.
    std::vector<int> newborn_indices;
    std::vector<NewbornRecord> records;
    t.nodes.reserve(t.nodes.size() + t.level_poles[L - 1].size());
    for (int w_idx : t.level_poles[L - 1]) {
      const PoleNode& w = t.nodes[w_idx];
      int j = parity_index(w, L - 1);  // reg/slope index at level L-1
      // q1 of the parent at level L-2 shares the same index j.
      ScaledComplex B = w.slope[j];
      ScaledComplex eta = w.residue / ScaledComplex(a_L - w.reg[j]);
      ScaledReal clearance = clearance_at_level(t, L - 1, w_idx);

      double residual = std::numeric_limits<double>::infinity();
      int iters = 0;
      bool converged = false;
      ScaledComplex Fp;
      for (; iters < tol::max_newton_iters; ++iters) {
        EvalResult E = evaluate_local(t, L - 1, w_idx, eta);
        if (E.infinite)
          throw construction_error(
              "genericity-failure: Newton step landed on a pole at level " +
              std::to_string(L));
        cplx F = E.value - a_L;
        residual = std::abs(F) / (1.0 + std::abs(a_L));
        Fp = -(w.residue / (eta * eta)) + B;
        ScaledComplex step = ScaledComplex(F) / Fp;
        eta = eta - step;
        if (eta.is_zero())
          throw construction_error(
              "genericity-failure: Newton collapsed onto the parent pole at level " +
              std::to_string(L));
        if ((abs(step) / abs(eta)).to_double() <= tol::newton_tol) {
          EvalResult Ef = evaluate_local(t, L - 1, w_idx, eta);
          if (!Ef.infinite) residual = std::abs(Ef.value - a_L) / (1.0 + std::abs(a_L));
          Fp = -(w.residue / (eta * eta)) + B;
          converged = true;
          break;
        }
      }
      if (!converged)
        throw construction_error(
            "genericity-failure: Newton did not converge for a level-" +
            std::to_string(L) + " pole");
      if (residual > tol::newton_residual_rel)
        throw construction_error(
            "genericity-failure: Newton residual too large at level " +
            std::to_string(L));

      // Localization certificate: the newborn must stay well inside the
      // parent's private neighborhood, which keeps newborns of distinct
      // parents distinct by disjointness of those neighborhoods.
      double ratio = (abs(eta) / clearance).to_double();
      if (!(ratio < 0.4))
        throw construction_error(
            "collision: newborn pole left its parent's neighborhood at level " +
            std::to_string(L));

      ScaledComplex c_u, slope0, q10;
      cplx reg0;
      if (w.birth <= 1) {
        // First-generation birth.  The parent's stored value model is
        // linear, and at a macroscopic offset its quadratic truncation
        // would contaminate every descendant of the newborn, so take the
        // birth data from exact derivative jets of the maps themselves.
        JetPair P = root_jets(t, L - 1, w.chart, eta);
        ScaledComplex half = P.hi.d2 / P.hi.d1 * ScaledReal(0.5);
        ScaledComplex third = P.hi.d3 / P.hi.d1 * ScaledReal(1.0 / 6.0);
        c_u = ScaledComplex(cplx{eps_L, 0.0}) / P.hi.d1;
        reg0 = (P.lo.v - c_u * half).to_cplx();
        slope0 = P.lo.d1 + c_u * (half * half - third);
        q10 = P.hi.d1;
      } else {
        // Deeper births sit at offsets so small that the parent's linear
        // model is exact to rounding.
        c_u = ScaledComplex(cplx{eps_L, 0.0}) / Fp;
        reg0 = w.valconst + (w.q1[j] * eta).to_cplx() + (c_u / eta).to_cplx();
        slope0 = w.q1[j] + (c_u * B) / w.residue;
        q10 = Fp;
      }
      if (c_u.is_zero() || abs(c_u).log2_abs() < tol::underflow_exponent ||
          abs(eta).log2_abs() < tol::underflow_exponent)
        throw construction_error(
            "underflow: pole geometry shrank below the representable window at level " +
            std::to_string(L));

      PoleNode u;
      u.birth = L;
      u.parent = w_idx;
      u.chart = w.chart;
      u.offset = eta;
      u.residue = c_u;
      u.valconst = a_L;
      u.reg = {reg0};
      u.slope = {slope0};
      u.q1 = {q10};
      t.nodes.push_back(u);
      newborn_indices.push_back(static_cast<int>(t.nodes.size()) - 1);

      NewbornRecord rec;
      rec.level = L;
      rec.node = newborn_indices.back();
      rec.offset_over_clearance = ratio;
      rec.newton_residual = residual;
      rec.newton_iters = iters + 1;
      records.push_back(rec);
    }

    std::vector<int> level = t.level_poles[L - 2];
    level.insert(level.end(), newborn_indices.begin(), newborn_indices.end());
    t.level_poles.push_back(level);
    t.newborn_log.insert(t.newborn_log.end(), records.begin(), records.end());
    t.depth = L;
  } catch (...) {
    rollback();
    throw;
  }
}

EvalResult evaluate_global(const RationalTower& t, int n, cplx z) {
  if (n < 0 || n > t.depth) throw usage_error("evaluate_global: level out of range");
  Val v = eval_core(t, n, nullptr, z);
  return {v.inf, v.v};
}

EvalResult evaluate_at_infinity(const RationalTower& t, int n) {
  if (n < 0 || n > t.depth) throw usage_error("evaluate_at_infinity: level out of range");
  if (n % 2 == 0) return {true, {0.0, 0.0}};
  return {false, {0.0, 0.0}};
}

EvalResult evaluate_local(const RationalTower& t, int n, int node,
                          ScaledComplex offset) {
  if (n < 0 || n > t.depth) throw usage_error("evaluate_local: level out of range");
  Chain chain = build_chain(t, node, offset);
  cplx z0 = {0.0, 0.0};
  if (t.nodes[chain.nodes[0]].birth > 0) {
    // Plane-chart subtree: the start value is the collapsed evaluation point
    // (the subtree root's offset is its absolute chart position).
    z0 = (t.nodes[chain.nodes[0]].offset + chain.delta[0]).to_cplx();
  }
  Val v = eval_core(t, n, &chain, z0);
  return {v.inf, v.v};
}

cplx derivative_local(const RationalTower& t, int n, int node,
                      ScaledComplex offset, double rel_step) {
  ScaledComplex h = rel_step * offset;
  EvalResult p = evaluate_local(t, n, node, offset + h);
  EvalResult m = evaluate_local(t, n, node, offset - h);
  if (p.infinite || m.infinite)
    return {std::numeric_limits<double>::infinity(), 0.0};
  ScaledComplex diff = ScaledComplex(p.value - m.value) / (2.0 * h);
  return diff.to_cplx();
}

ScaledComplex node_chart_position(const RationalTower& t, int node) {
  ScaledComplex acc;
  for (int cur = node; cur >= 0; cur = t.nodes[cur].parent)
    acc = acc + t.nodes[cur].offset;
  return acc;
}

CPoint node_point(const RationalTower& t, int node) {
  ScaledComplex pos = node_chart_position(t, node);
  if (t.nodes[node].chart == 1) {
    if (pos.is_zero()) return CPoint::infinity();
    return {pos.to_cplx(), true};
  }
  return make_point(pos.to_cplx());
}

ScaledReal node_separation(const RationalTower& t, int i, int j) {
  if (i == j) return ScaledReal();
  ScaledReal d = chart_distance(t, i, j);
  if (d.e >= 4000) {
    // Different subtrees: collapsed two-chart geometry is exact enough.
    return ScaledReal(spherical_distance(node_point(t, i), node_point(t, j)));
  }
  cplx pi = node_chart_position(t, i).to_cplx();
  cplx pj = node_chart_position(t, j).to_cplx();
  double f = 2.0 / std::sqrt((1.0 + std::norm(pi)) * (1.0 + std::norm(pj)));
  return spherical_from_chord(ScaledReal(f) * d);
}

ScaledReal level_min_separation(const RationalTower& t, int n) {
  const std::vector<int>& lv = t.level_poles[n];
  ScaledReal best = pow2(4000);
  for (std::size_t i = 0; i < lv.size(); ++i)
    for (std::size_t j = i + 1; j < lv.size(); ++j)
      best = min(best, node_separation(t, lv[i], lv[j]));
  return best;
}

ScaledReal consecutive_min_separation(const RationalTower& t, int n) {
  const std::vector<int>& lo = t.level_poles[n];
  const std::vector<int>& hi = t.level_poles[n + 1];
  ScaledReal best = pow2(4000);
  for (int i : lo)
    for (int j : hi) best = min(best, node_separation(t, i, j));
  return best;
}

std::vector<int> infinity_preimage_nodes(const RationalTower& t, int n) {
  if (n < 1 || n > t.depth)
    throw usage_error("infinity_preimage_nodes: level out of range");
  std::vector<int> out = t.level_poles[n - 1];
  out.insert(out.end(), t.level_poles[n].begin(), t.level_poles[n].end());
  return out;
}

ScaledComplex residue_estimate(const RationalTower& t, int n, int node) {
  const PoleNode& u = t.nodes[node];
  if (!is_parity_level(u, n) || u.birth > n)
    throw usage_error("residue_estimate: node is not a pole at this level");
  // Sampling radius: small enough that the circle stays inside the ring of
  // poles born later near this one (those sit at distance >= |c|/max|a|),
  // large enough to stay clear of the parent-side poles.  At this radius the
  // principal term |c|/h is comparable to max|a|, so it is not drowned by
  // rounding of the regular part.
  double maxa = 1.0;
  for (int m = 1; m <= n; ++m) maxa = std::max(maxa, std::abs(t.a[m]));
  ScaledReal h1 = 0.1 * (abs(u.residue) / ScaledReal(maxa + 1.0));
  h1 = min(h1, 0.05 * clearance_at_level(t, n, node));
  const int N = 16;
  auto average = [&](ScaledReal h) -> ScaledComplex {
    ScaledComplex sum;
    for (int k = 0; k < N; ++k) {
      double th = 2.0 * kPi * k / N;
      ScaledComplex off = ScaledComplex(cplx{std::cos(th), std::sin(th)}) * h;
      EvalResult E = evaluate_local(t, n, node, off);
      if (E.infinite)
        throw verification_error("residue_estimate: sample circle touched a pole");
      sum = sum + off * ScaledComplex(E.value);
    }
    return sum / ScaledReal(static_cast<double>(N));
  };
  ScaledComplex A1 = average(h1);
  ScaledComplex A2 = average(ScaledReal(0.5) * h1);
  // A(h) = c + K h^N: two radii cancel the leading contamination.
  double w = std::ldexp(1.0, N);
  return (w * A2 - A1) / ScaledReal(w - 1.0);
}

double laurent_deviation(const RationalTower& t, int n, int node, double M) {
  const PoleNode& u = t.nodes[node];
  if (!is_parity_level(u, n) || u.birth > n)
    throw usage_error("laurent_deviation: node is not a pole at this level");
  ScaledComplex off = u.residue / ScaledReal(M);
  EvalResult E = evaluate_local(t, n, node, off);
  if (E.infinite) return std::numeric_limits<double>::infinity();
  return std::abs(E.value - M) / M;
}

}  // namespace cantor
