#include "nsto/quadrature.hpp"

#include <boost/math/special_functions/legendre_stieltjes.hpp>

#include <algorithm>
#include <map>
#include <queue>
#include <stdexcept>

namespace nsto {

namespace {

// P_n(x) and P'_n(x) by the three-term recurrence.
std::pair<Real, Real> legendre_pd(int n, const Real& x) {
  Real pm1 = 1, p = x;
  if (n == 0) return {pm1, Real(0)};
  for (int k = 2; k <= n; ++k) {
    Real pk = ((2 * k - 1) * x * p - (k - 1) * pm1) / k;
    pm1 = p;
    p = pk;
  }
  Real d = n * (x * p - pm1) / (x * x - 1);
  return {p, d};
}

GKRule build_rule(int rule_points, unsigned digits) {
  if (rule_points < 3 || rule_points % 2 == 0)
    throw std::domain_error("gk_rule: rule_points must be odd and >= 3");
  const int n = (rule_points - 1) / 2;  // embedded Gauss order
  PrecisionGuard guard(digits + 10);
  const Real newton_tol = pow10(-(long)digits - 5);

  // Gauss nodes: Newton on P_n from the Chebyshev-like double seed.
  std::vector<Real> gx(n);
  for (int k = 0; k < n; ++k) {
    Real x = cos(Real("3.14159265358979323846") * (4 * k + 3) / (4 * n + 2));
    for (int it = 0; it < 200; ++it) {
      auto [p, d] = legendre_pd(n, x);
      Real dx = p / d;
      x -= dx;
      if (abs(dx) <= newton_tol) break;
    }
    gx[k] = x;
  }
  std::sort(gx.begin(), gx.end());

  boost::math::legendre_stieltjes<Real> E(n + 1);
  std::vector<Real> pos = E.zeros();  // positive zeros, double-accurate seeds
  std::vector<Real> sx;
  for (const Real& z : pos) {
    Real x = z;  // polish to full working precision
    for (int it = 0; it < 200; ++it) {
      Real dx = E(x) / E.prime(x);
      x -= dx;
      if (abs(dx) <= newton_tol) break;
    }
    if (x > 0) sx.push_back(-x);
    sx.push_back(x);
  }
  std::sort(sx.begin(), sx.end());
  if ((int)sx.size() != n + 1)
    throw std::runtime_error("gk_rule: unexpected Stieltjes zero count");

  struct Entry {
    Real x, wk, wg;
  };
  std::vector<Entry> entries;
  for (const Real& x : gx) {
    auto [p, d] = legendre_pd(n, x);
    Real wg = 2 / ((1 - x * x) * d * d);
    Real wk = wg + 2 / ((n + 1) * d * E(x));
    entries.push_back({x, wk, wg});
  }
  for (const Real& x : sx) {
    auto [p, d] = legendre_pd(n, x);
    Real wk = 2 / ((n + 1) * p * E.prime(x));
    entries.push_back({x, wk, Real(0)});
  }
  std::sort(entries.begin(), entries.end(),
            [](const Entry& a, const Entry& b) { return a.x < b.x; });

  GKRule rule;
  rule.gauss_points = n;
  for (auto& e : entries) {
    rule.nodes.push_back(e.x);
    rule.wk.push_back(e.wk);
    rule.wg.push_back(e.wg);
  }
  return rule;
}

// One tensor-product application over a transformed rectangle.
struct RegionEval {
  Real value, error;
};

}  // namespace

const GKRule& gk_rule(int rule_points, unsigned digits) {
  static std::map<std::pair<int, unsigned>, GKRule> cache;
  auto key = std::make_pair(rule_points, digits);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, build_rule(rule_points, digits)).first;
  return it->second;
}

int rule_points_for(unsigned working_digits) {
  if (working_digits <= 20) return 15;
  if (working_digits <= 35) return 31;
  return 61;
}

std::pair<Real, Real> gk_apply(const std::function<Real(const Real&)>& f,
                               const Real& a, const Real& b, int rule_points,
                               const PrecisionContext& ctx) {
  PrecisionGuard guard(ctx.working_digits);
  if (!(a < b)) throw std::domain_error("gk_apply: requires a < b");
  const GKRule& rule = gk_rule(rule_points, ctx.working_digits);
  Real mid = (a + b) / 2, half = (b - a) / 2;
  Real K = 0, G = 0;
  for (size_t i = 0; i < rule.nodes.size(); ++i) {
    Real x = mid + half * rule.nodes[i];
    Real fx = f(x);
    if (!isfinite(fx))
      throw std::runtime_error("gk_apply: non-finite integrand at x=" +
                               format_scientific(x, 8));
    K += rule.wk[i] * fx;
    if (rule.wg[i] != 0) G += rule.wg[i] * fx;
  }
  K *= half;
  G *= half;
  return {K, Real(abs(K - G))};
}

std::pair<Real, Real> map_semiinfinite(const Real& t) {
  if (t < 0 || t >= 1)
    throw std::domain_error("map_semiinfinite: requires t in [0,1)");
  Real om = 1 - t;
  return {1 / om, 1 / (om * om)};
}

bool Region2D::mu_unbounded() const {
  return !(mu_hi > 0) || !isfinite(mu_hi);
}

namespace {

// Adaptive engine shared by the 1-D and 2-D entry points.  Works on
// transformed rectangles; dim-1 regions keep a degenerate y axis.
struct Region {
  Real xlo, xhi, ylo, yhi;
  Real value, error;
  long depth, seq;
  bool leaf = true;
};

template <typename Eval>
QuadratureOutcome adaptive_core(const Eval& eval_region, Real xlo, Real xhi,
                                Real ylo, Real yhi, bool two_d,
                                const PrecisionContext& ctx,
                                const Real& rel_tol) {
  if (!(rel_tol >= ctx.tol(8)))
    throw std::domain_error(
        "adaptive_integrate: rel_tol below 10^(-working_digits+8)");

  std::vector<Region> regions;
  long evaluations = 0, subdivisions = 0, seq = 0;

  auto push_region = [&](Real axlo, Real axhi, Real aylo, Real ayhi,
                         long depth) {
    Region r{axlo, axhi, aylo, ayhi, Real(0), Real(0), depth, seq++};
    auto [v, e] = eval_region(axlo, axhi, aylo, ayhi, evaluations);
    r.value = v;
    r.error = e;
    regions.push_back(std::move(r));
  };

  // worst-first: largest error wins, ties go to the earliest-created region
  auto cmp = [&](size_t a, size_t b) {
    if (regions[a].error != regions[b].error)
      return regions[a].error < regions[b].error;
    return regions[a].seq > regions[b].seq;
  };
  std::priority_queue<size_t, std::vector<size_t>, decltype(cmp)> heap(cmp);

  push_region(xlo, xhi, ylo, yhi, 0);
  heap.push(0);
  Real sum_val = regions[0].value, sum_err = regions[0].error,
       sum_abs = abs(regions[0].value);

  // Absolute floor: if the integral cancels to below the precision floor of
  // its L1 mass, further refinement only chases rounding noise.
  const Real floor_scale = ctx.tol(8);
  bool converged = false;
  while (true) {
    Real threshold =
        std::max(Real(rel_tol * abs(sum_val)), Real(floor_scale * sum_abs));
    if (sum_err <= threshold) {
      converged = true;
      break;
    }
    size_t worst = heap.top();
    if (regions[worst].depth >= (long)ctx.max_recursion) break;
    heap.pop();
    Region r = regions[worst];
    regions[worst].leaf = false;
    sum_val -= r.value;
    sum_err -= r.error;
    sum_abs -= abs(r.value);
    ++subdivisions;
    Real wx = r.xhi - r.xlo, wy = r.yhi - r.ylo;
    size_t first = regions.size();
    if (two_d && wy > wx) {
      Real m = (r.ylo + r.yhi) / 2;
      push_region(r.xlo, r.xhi, r.ylo, m, r.depth + 1);
      push_region(r.xlo, r.xhi, m, r.yhi, r.depth + 1);
    } else {
      Real m = (r.xlo + r.xhi) / 2;
      push_region(r.xlo, m, r.ylo, r.yhi, r.depth + 1);
      push_region(m, r.xhi, r.ylo, r.yhi, r.depth + 1);
    }
    for (size_t i = first; i < regions.size(); ++i) {
      sum_val += regions[i].value;
      sum_err += regions[i].error;
      sum_abs += abs(regions[i].value);
      heap.push(i);
    }
  }

  // deterministic final summation over leaves sorted by coordinates
  std::vector<const Region*> leaves;
  for (const Region& r : regions)
    if (r.leaf) leaves.push_back(&r);
  std::sort(leaves.begin(), leaves.end(), [](const Region* a, const Region* b) {
    if (a->xlo != b->xlo) return a->xlo < b->xlo;
    if (a->ylo != b->ylo) return a->ylo < b->ylo;
    return a->xhi < b->xhi;
  });
  QuadratureOutcome out;
  Real abs_mass = 0;
  for (const Region* r : leaves) {
    out.value += r->value;
    out.error_estimate += r->error;
    abs_mass += abs(r->value);
  }
  out.evaluations = evaluations;
  out.subdivisions = subdivisions;
  Real threshold = std::max(Real(rel_tol * abs(out.value)),
                            Real(floor_scale * abs_mass));
  out.converged = out.error_estimate <= threshold;
  return out;
}

// Once a panel is in the asymptotic regime the raw Kronrod-Gauss difference
// badly overstates the true error.  Rescale it against the panel's L1 mass
// the way QUADPACK does; panels still resolving structure (difference
// comparable to the mass) keep the raw estimate.
Real moderated_error(const Real& raw, const Real& panel_abs) {
  if (!(raw > 0) || !(panel_abs > 0)) return raw;
  Real ratio = 200 * raw / panel_abs;
  if (ratio >= 1) return raw;
  return panel_abs * ratio * sqrt(ratio);
}

}  // namespace

QuadratureOutcome adaptive_integrate_2d(const Fn2& f, const Region2D& region,
                                        const PrecisionContext& ctx,
                                        const Real& rel_tol, int rule_points) {
  PrecisionGuard guard(ctx.working_digits);
  if (rule_points == 0) rule_points = rule_points_for(ctx.working_digits);
  const GKRule& rule = gk_rule(rule_points, ctx.working_digits);
  const bool unbounded = region.mu_unbounded();
  if (unbounded) {
    if (!(region.mu_lo >= 1))
      throw std::domain_error("adaptive_integrate_2d: mu_lo must be >= 1");
    if (!(region.mu_scale > 0))
      throw std::domain_error("adaptive_integrate_2d: mu_scale must be > 0");
  } else if (!(region.mu_lo < region.mu_hi)) {
    throw std::domain_error("adaptive_integrate_2d: bad mu interval");
  }
  if (!(region.nu_lo >= -1 && region.nu_hi <= 1 && region.nu_lo < region.nu_hi))
    throw std::domain_error("adaptive_integrate_2d: bad nu interval");

  // Transformed x axis on [mu_lo,inf): mu = mu_lo + s*(e^y - 1) with
  // y = t/(1-t).  The log spacing puts every length scale of the integrand
  // (kernel turn-on, polynomial growth, exponential decay) at O(1) width in
  // t, so the panel count stays flat across slow- and fast-decay cases.
  // Bounded regions use mu itself.
  const Real map_lo = region.mu_lo, map_s = region.mu_scale;
  Real xlo = unbounded ? Real(0) : region.mu_lo;
  Real xhi = unbounded ? Real(1) : region.mu_hi;
  if (!(xlo < xhi))
    throw std::domain_error("adaptive_integrate_2d: bad mu interval");

  const size_t m = rule.nodes.size();
  auto eval_region = [&](const Real& axlo, const Real& axhi, const Real& aylo,
                         const Real& ayhi, long& evals) -> std::pair<Real, Real> {
    Real xmid = (axlo + axhi) / 2, xhalf = (axhi - axlo) / 2;
    Real ymid = (aylo + ayhi) / 2, yhalf = (ayhi - aylo) / 2;
    Real K = 0, G = 0, A = 0;
    for (size_t i = 0; i < m; ++i) {
      Real x = xmid + xhalf * rule.nodes[i];
      Real mu = x, jac = 1;
      if (unbounded) {
        if (x >= 1) continue;  // measure-zero endpoint of the open map
        Real om = 1 - x;
        Real ey = exp(x / om);
        mu = map_lo + map_s * (ey - 1);
        jac = map_s * ey / (om * om);
        // the integrand must decay exponentially in mu; past the point
        // where even the jacobian overflows its contribution is zero
        if (!isfinite(jac)) continue;
      }
      Real rowK = 0, rowG = 0, rowA = 0;
      for (size_t j = 0; j < m; ++j) {
        Real nu = ymid + yhalf * rule.nodes[j];
        Real fx = f(mu, nu);
        ++evals;
        if (!isfinite(fx))
          throw std::runtime_error(
              "adaptive_integrate_2d: non-finite integrand at mu=" +
              format_scientific(mu, 8) + " nu=" + format_scientific(nu, 8));
        rowK += rule.wk[j] * fx;
        rowA += rule.wk[j] * abs(fx);
        if (rule.wg[i] != 0 && rule.wg[j] != 0) rowG += rule.wg[j] * fx;
      }
      K += rule.wk[i] * jac * rowK;
      A += rule.wk[i] * jac * rowA;
      if (rule.wg[i] != 0) G += rule.wg[i] * jac * rowG;
    }
    Real area = xhalf * yhalf;
    K *= area;
    G *= area;
    A *= area;
    return {K, moderated_error(Real(abs(K - G)), A)};
  };

  return adaptive_core(eval_region, xlo, xhi, region.nu_lo, region.nu_hi,
                       /*two_d=*/true, ctx, rel_tol);
}

QuadratureOutcome adaptive_integrate_1d(const Fn1& f, const Real& a,
                                        const Real& b,
                                        const PrecisionContext& ctx,
                                        const Real& rel_tol, int rule_points) {
  PrecisionGuard guard(ctx.working_digits);
  if (rule_points == 0) rule_points = rule_points_for(ctx.working_digits);
  if (!(a < b)) throw std::domain_error("adaptive_integrate_1d: requires a < b");
  const GKRule& rule = gk_rule(rule_points, ctx.working_digits);
  const size_t m = rule.nodes.size();
  auto eval_region = [&](const Real& axlo, const Real& axhi, const Real&,
                         const Real&, long& evals) -> std::pair<Real, Real> {
    Real mid = (axlo + axhi) / 2, half = (axhi - axlo) / 2;
    Real K = 0, G = 0, A = 0;
    for (size_t i = 0; i < m; ++i) {
      Real x = mid + half * rule.nodes[i];
      Real fx = f(x);
      ++evals;
      if (!isfinite(fx))
        throw std::runtime_error(
            "adaptive_integrate_1d: non-finite integrand at x=" +
            format_scientific(x, 8));
      K += rule.wk[i] * fx;
      A += rule.wk[i] * abs(fx);
      if (rule.wg[i] != 0) G += rule.wg[i] * fx;
    }
    K *= half;
    G *= half;
    A *= half;
    return {K, moderated_error(Real(abs(K - G)), A)};
  };
  return adaptive_core(eval_region, a, b, Real(0), Real(1), /*two_d=*/false,
                       ctx, rel_tol);
}

}  // namespace nsto
