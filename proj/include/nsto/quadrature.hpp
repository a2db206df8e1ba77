// Global-adaptive Gauss-Kronrod integration: 1-D finite intervals, the
// semi-infinite mu axis via a rational map, and the 2-D product region
// [1,inf) x [-1,1].
#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "nsto/real.hpp"

namespace nsto {

// Symmetric Gauss-Kronrod rule pair on [-1,1].  `nodes` are the Kronrod
// nodes in ascending order; `wk` the Kronrod weights; `wg` the embedded
// Gauss weight at the same index (zero at Stieltjes-only nodes).
struct GKRule {
  std::vector<Real> nodes;
  std::vector<Real> wk;
  std::vector<Real> wg;
  int gauss_points = 0;
};

// Rule for `rule_points` Kronrod nodes (15, 31, 61, ... = 2n+1 for an
// embedded n-point Gauss rule), generated by Newton iteration at `digits`
// decimal digits (plus guard digits) and memoized per (points, digits).
const GKRule& gk_rule(int rule_points, unsigned digits);

// Kronrod points used by default for a given working precision.
int rule_points_for(unsigned working_digits);

// One application of the rule pair on [a,b]: (Kronrod value, |K - G|).
std::pair<Real, Real> gk_apply(const std::function<Real(const Real&)>& f,
                               const Real& a, const Real& b, int rule_points,
                               const PrecisionContext& ctx);

// mu = 1 + t/(1-t) maps t in [0,1) onto [1,inf); returns (mu, dmu/dt).
std::pair<Real, Real> map_semiinfinite(const Real& t);

struct Region2D {
  Real mu_lo{1};
  Real mu_hi{0};  // <=0 or non-finite means +infinity
  Real nu_lo{-1};
  Real nu_hi{1};
  // Tail length of the semi-infinite map mu = mu_lo + s*(e^{t/(1-t)} - 1);
  // set to the reciprocal decay rate of the integrand so that e^{-k mu}
  // tails with small or large k resolve in O(1) panels.
  Real mu_scale{1};
  bool mu_unbounded() const;
};

struct QuadratureOutcome {
  Real value{0};
  Real error_estimate{0};
  long evaluations = 0;
  long subdivisions = 0;
  bool converged = false;
};

using Fn2 = std::function<Real(const Real&, const Real&)>;
using Fn1 = std::function<Real(const Real&)>;

// Worst-first global-adaptive tensor GK integration of f over `region`.
// Terminates when the summed error estimate drops below rel_tol times the
// summed value, or when the worst region has been bisected
// ctx.max_recursion times (converged=false in that case).
// rule_points = 0 selects the order from ctx.working_digits.
QuadratureOutcome adaptive_integrate_2d(const Fn2& f, const Region2D& region,
                                        const PrecisionContext& ctx,
                                        const Real& rel_tol,
                                        int rule_points = 0);

// Same strategy on a finite 1-D interval.
QuadratureOutcome adaptive_integrate_1d(const Fn1& f, const Real& a,
                                        const Real& b,
                                        const PrecisionContext& ctx,
                                        const Real& rel_tol,
                                        int rule_points = 0);

}  // namespace nsto
