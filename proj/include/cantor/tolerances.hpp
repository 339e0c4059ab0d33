#pragma once

// Every numeric tolerance, iteration cap, and safety factor used by the
// construction and its checks, pinned in one place.

namespace cantor::tol {

// Newton iteration on pole-finding and root polishing.  Convergence is a
// relative step bound; the final value must also leave a small relative
// residual or the parameter draw is rejected as degenerate.
inline constexpr double newton_tol = 1e-12;
inline constexpr int max_newton_iters = 100;
inline constexpr double newton_residual_rel = 1e-9;

// Minimum spherical separation demanded between distinct poles of one level
// when checked as absolute distances on the sphere.
inline constexpr double pole_sep_tol = 1e-9;

// A denominator magnitude below pole_eval_tol * (1 + |shift|) during
// evaluation means the point is (numerically) a pole: the value is treated
// as infinity from that step on.
inline constexpr double pole_eval_tol = 1e-13;

// Polynomial-oracle root acceptance: backward-error bound |q(z)| relative to
// the evaluated coefficient magnitude sum.
inline constexpr double root_tol = 1e-10;
inline constexpr int max_aberth_iters = 200;

// Pole <-> root matching and cross-validation agreement, relative.
inline constexpr double pole_match_rel = 1e-8;
inline constexpr double oracle_agree_rel = 1e-9;

// Deepest level the polynomial oracle is asked to certify (degrees follow
// the Fibonacci numbers; coefficient growth makes deeper levels pointless).
inline constexpr int oracle_max_depth = 8;

// Divided differences with smaller denominators are considered unreliable.
inline constexpr double deriv_floor = 1e-8;

// Perturbation-and-retry used when a freshly chosen parameter lands
// degenerately (multiple root, zero derivative): relative nudge and cap.
inline constexpr double genericity_nudge = 1e-6;
inline constexpr int max_genericity_retries = 20;

// Escape-radius ladder: R = |a_n| * 2^m, m = 1 .. ladder_max.
inline constexpr int ladder_max = 60;

// Shrink-rate safety factor applied when choosing the next epsilon: the
// chosen value is this fraction of the largest admissible one.
inline constexpr double epsilon_safety = 0.5;

// Analysis cells are refined until their side is at most 1/cell_ratio of
// both the target diameter bound and the enclosing component's scale.
inline constexpr double cell_ratio = 64.0;

// Residues or offsets shrinking below 2^underflow_exponent trip a
// construction-failure diagnostic rather than silently denormalizing.
inline constexpr int underflow_exponent = -100000;

}  // namespace cantor::tol
