#include "nsto/auxfn.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <tuple>

namespace nsto {

namespace {

// P or Q at possibly negative argument (variant 3 reaches x < 0 through
// p1*mu*nu); the real continuation exists for positive integer shapes only.
Real pq_value(GammaKind kind, const Real& a, const Real& x,
              const Real& log_gamma_a, const PrecisionContext& ctx) {
  if (x >= 0) return reg_gamma(kind, a, x, log_gamma_a, ctx);
  Real p = reg_gamma_p_continued(a, x, ctx);
  return kind == GammaKind::P ? p : 1 - p;
}

Real pow_int(const Real& x, long n) {
  if (n == 0) return Real(1);
  if (n < 0) return 1 / pow_int(x, -n);
  Real r = 1;
  Real b = x;
  long e = n;
  while (e > 0) {
    if (e & 1) r *= b;
    b *= b;
    e >>= 1;
  }
  return r;
}

long as_integer(const Real& x, const char* what) {
  if (!is_integer(x)) {
    throw std::domain_error(std::string(what) + ": integer value required");
  }
  return lround(x.convert_to<double>());
}

// ln Gamma at the ambient default precision (combination builders have no
// PrecisionContext of their own).
Real lg_here(const Real& z) {
  Real zz = z;
  return lgamma(zz);
}

// Relative tolerance fed to the adaptive engine: target accuracy with a
// margin, floored by what the working precision supports.
Real quad_rel_tol(const PrecisionContext& ctx) {
  long want = -(long)ctx.target_digits - 8;
  long floor_exp = -(long)ctx.working_digits + 8;
  return pow10(std::max(want, floor_exp));
}

Real g_prefactor(const AuxParams& p) {
  if (p.N1 == 0) return Real(1);
  return pow_int(p.p1, p.N1) / pochhammer(p.shape(), p.N1);
}

// Map scale for the semi-infinite mu axis: the reciprocal asymptotic decay
// rate (e^{-p2 mu}, sharpened by the e^{-p1 mu} tail of the Q kernel when
// its argument grows with mu uniformly in nu), floored at 1 so the O(1)
// kernel-turn-on region never gets compressed.
Real tail_scale(const AuxParams& p) {
  Real rate = p.p2;
  if (p.kind == GammaKind::Q && p.p1 > 0 && p.variant != 3) rate += p.p1;
  return rate < 1 ? 1 / rate : Real(1);
}

// Printed J prefactor p1^N1/(a)_{N1-1}, with the empty product at N1=0.
// Values in this normalization are (a+N1-1) times the ones the recurrence
// identities relate, so combination builders carry the compensation.
Real j_printed_scale(const JParams& p) {
  if (p.N1 == 0) return Real(1);
  return p.shape() + p.N1 - 1;
}

Real j_prefactor_consistent(const JParams& p) {
  if (p.N1 == 0) return Real(1);
  return pow_int(p.p1, p.N1) / pochhammer(p.shape(), p.N1);
}

// ---- grouped integrand over the 2-D region ----

struct GTermInt {
  Real coeff;
  long q;
  long i2, i3;  // integer exponent offsets from the fractional bases
};

// f(mu,nu) = {P,Q}[a, p1*arg] e^{-p2 mu - p3 nu}
//            * sum_k coeff_k (mu nu)^{q_k} (mu+nu)^{b2+i2_k} (mu-nu)^{b3+i3_k}
Fn2 make_group_integrand(int variant, GammaKind kind, const Real& a,
                         const Real& p1, const Real& p2, const Real& p3,
                         const Real& b2, const Real& b3,
                         std::vector<GTermInt> terms,
                         const PrecisionContext& ctx) {
  Real lga = log_gamma(a, ctx);
  long qmax = 0, i2max = 0, i3max = 0;
  for (const auto& t : terms) {
    qmax = std::max(qmax, t.q);
    i2max = std::max(i2max, t.i2);
    i3max = std::max(i3max, t.i3);
  }
  bool use_pq = !(p1 == 0);
  Real p_zero_value = kind == GammaKind::P ? 0 : 1;
  return [=](const Real& mu, const Real& nu) -> Real {
    Real A = mu + nu;
    Real B = mu - nu;
    Real pq = p_zero_value;
    if (use_pq) {
      Real arg = variant == 1 ? A : (variant == 2 ? B : Real(mu * nu));
      pq = pq_value(kind, a, p1 * arg, lga, ctx);
    }
    if (pq == 0) return Real(0);
    Real expo = -p2 * mu - p3 * nu;
    if (!(b2 == 0)) expo += b2 * log(A);
    if (!(b3 == 0)) expo += b3 * log(B);
    std::vector<Real> Ap(i2max + 1), Bp(i3max + 1), Mp(qmax + 1);
    Ap[0] = Bp[0] = Mp[0] = 1;
    for (long i = 1; i <= i2max; ++i) Ap[i] = Ap[i - 1] * A;
    for (long i = 1; i <= i3max; ++i) Bp[i] = Bp[i - 1] * B;
    if (qmax > 0) {
      Real mn = mu * nu;
      for (long i = 1; i <= qmax; ++i) Mp[i] = Mp[i - 1] * mn;
    }
    Real s = 0;
    for (const auto& t : terms) s += t.coeff * Mp[t.q] * Ap[t.i2] * Bp[t.i3];
    return s * pq * exp(expo);
  };
}

}  // namespace

// ---- validation ----

void AuxParams::validate() const {
  if (N1 < 0 || q < 0) throw std::domain_error("AuxParams: N1, q must be >= 0");
  if (variant < 1 || variant > 3)
    throw std::domain_error("AuxParams: variant must be 1, 2 or 3");
  if (!(shape() > 0))
    throw std::domain_error("AuxParams: N4 - N1 must be positive");
  if (!(p2 > 0)) throw std::domain_error("AuxParams: p2 must be positive");
  if (p1 < 0) throw std::domain_error("AuxParams: p1 must be nonnegative");
  // Corner integrability: the P-kind gamma factor contributes an extra
  // (mu+nu)^a or (mu-nu)^a zero at the matching corner.
  Real e2 = N2 + (variant == 1 && kind == GammaKind::P ? shape() : Real(0));
  Real e3 = N3 + (variant == 2 && kind == GammaKind::P ? shape() : Real(0));
  if (!(e2 > -2))
    throw std::domain_error("AuxParams: effective N2 exponent <= -2");
  if (!(e3 > -2))
    throw std::domain_error("AuxParams: effective N3 exponent <= -2");
  if (variant == 3) {
    if (!is_integer(shape()))
      throw std::domain_error("AuxParams: variant 3 needs an integer shape");
    if (p1 > 0 && !(p2 > p1))
      throw std::domain_error("AuxParams: variant 3 needs p2 > p1");
  }
}

void JParams::validate() const {
  if (N1 < 0 || q < 0) throw std::domain_error("JParams: N1, q must be >= 0");
  if (variant < 1 || variant > 3)
    throw std::domain_error("JParams: variant must be 1, 2 or 3");
  if (!(shape() > 0))
    throw std::domain_error("JParams: N4 - N1 must be positive");
  if (p1 < 0) throw std::domain_error("JParams: p1 must be nonnegative");
  Real e2 = N2 + (variant == 1 && kind == GammaKind::P ? shape() : Real(0));
  Real e3 = N3 + (variant == 2 && kind == GammaKind::P ? shape() : Real(0));
  if (!(e2 > -1))
    throw std::domain_error("JParams: effective N2 exponent <= -1");
  if (!(e3 > -1))
    throw std::domain_error("JParams: effective N3 exponent <= -1");
  if (variant == 3 && p1 > 0 && !is_integer(shape()))
    throw std::domain_error("JParams: variant 3 needs an integer shape");
}

// ---- direct evaluation ----

Real g_integrand(const AuxParams& p, const Real& mu, const Real& nu,
                 const PrecisionContext& ctx) {
  p.validate();
  PrecisionGuard guard(ctx);
  Real a = p.shape();
  Real pq;
  if (p.p1 == 0) {
    pq = p.kind == GammaKind::P ? 0 : 1;
  } else {
    Real arg = p.variant == 1 ? mu + nu
                              : (p.variant == 2 ? mu - nu : Real(mu * nu));
    pq = pq_value(p.kind, a, p.p1 * arg, log_gamma(a, ctx), ctx);
  }
  Real A = mu + nu;
  Real B = mu - nu;
  if (B < 0 && !is_integer(p.N3))
    throw std::domain_error("g_integrand: (mu-nu)^N3 undefined for mu < nu");
  Real v = pow_int(mu * nu, p.q) * pq * exp(-p.p2 * mu - p.p3 * nu);
  if (!(p.N2 == 0))
    v *= is_integer(p.N2) ? pow_int(A, as_integer(p.N2, "N2"))
                          : Real(exp(p.N2 * log(A)));
  if (!(p.N3 == 0))
    v *= is_integer(p.N3) ? pow_int(B, as_integer(p.N3, "N3"))
                          : Real(exp(p.N3 * log(B)));
  return v;
}

QuadratureOutcome aux_g_sum(const AuxParams& proto,
                            const std::vector<GroupTerm>& terms,
                            const PrecisionContext& ctx) {
  proto.validate();
  PrecisionGuard guard(ctx);
  if (terms.empty()) return QuadratureOutcome{Real(0), Real(0), 0, 0, true};
  // Fractional bases chosen so that every integer offset is nonnegative.
  Real b2 = terms[0].N2, b3 = terms[0].N3;
  for (const auto& t : terms) {
    if (!is_integer(t.N2 - terms[0].N2) || !is_integer(t.N3 - terms[0].N3))
      throw std::domain_error("aux_g_sum: exponents must differ by integers");
    b2 = std::min(b2, t.N2);
    b3 = std::min(b3, t.N3);
  }
  std::vector<GTermInt> gt;
  gt.reserve(terms.size());
  for (const auto& t : terms) {
    gt.push_back({t.coeff, t.q, as_integer(t.N2 - b2, "aux_g_sum offset"),
                  as_integer(t.N3 - b3, "aux_g_sum offset")});
  }
  Fn2 f = make_group_integrand(proto.variant, proto.kind, proto.shape(),
                               proto.p1, proto.p2, proto.p3, b2, b3,
                               std::move(gt), ctx);
  Region2D region;
  region.mu_scale = tail_scale(proto);
  QuadratureOutcome out =
      adaptive_integrate_2d(f, region, ctx, quad_rel_tol(ctx));
  Real pre = g_prefactor(proto);
  out.value *= pre;
  out.error_estimate *= abs(pre);
  return out;
}

namespace {

// Rotated-coordinate evaluation for variant-1/2 integrands whose corner
// factor (mu+nu)^N2 resp. (mu-nu)^N3 has a negative or weakly fractional
// effective exponent.  With u = mu+nu the corner factor is a pure power of
// one variable, the shrinking cross-section near the corner contributes an
// extra u from the Jacobian, and a power map u = 2 t^m removes what is left
// of the endpoint singularity, so plain subdivision would otherwise gain
// under one digit per level here.
QuadratureOutcome aux_g_rotated(const AuxParams& p0,
                                const PrecisionContext& ctx) {
  AuxParams p = p0;
  Real sign = 1;
  if (p0.variant == 2) {  // mirror nu -> -nu onto variant 1
    p.variant = 1;
    p.N2 = p0.N3;
    p.N3 = p0.N2;
    p.p3 = -p0.p3;
    if (p0.q % 2 != 0) sign = -1;
  }
  const Real a = p.shape();
  const bool have_kernel = p.p1 > 0;
  const Real lga = have_kernel ? log_gamma(a, ctx) : Real(0);
  Real e2 = p.N2;
  if (have_kernel && p.kind == GammaKind::P) e2 += a;
  long pmap = 1;  // integer exponents stay analytic under the identity map
  if (!is_integer(e2)) {
    double need = 6.0 / (e2.convert_to<double>() + 2.0);
    pmap = std::min<long>(80, std::max<long>(1, (long)std::ceil(need)));
  }
  const long q = p.q;
  const Real N2 = p.N2, N3 = p.N3, p1 = p.p1, p2 = p.p2, p3 = p.p3;
  const GammaKind kind = p.kind;
  auto piece = [&](const Real& u, const Real& v, const Real& mu,
                   const Real& nu) -> Real {
    Real val = pow_int(mu * nu, q) * exp(-p2 * mu - p3 * nu);
    if (have_kernel) val *= pq_value(kind, a, p1 * u, lga, ctx);
    if (!(N2 == 0))
      val *= is_integer(N2) ? pow_int(u, as_integer(N2, "N2"))
                            : Real(exp(N2 * log(u)));
    if (!(N3 == 0)) {
      if (v == 0) return Real(0);  // opposite corner, measure zero
      val *= is_integer(N3) ? pow_int(v, as_integer(N3, "N3"))
                            : Real(exp(N3 * log(v)));
    }
    return val;
  };
  // mu+nu <= 2: u = 2 t^m, v = 2 + u w; d(mu,nu) = m t^{m-1} u dt dw
  Fn2 fA = [=](const Real& t, const Real& w) -> Real {
    if (t == 0) return Real(0);
    Real u = 2 * pow_int(t, pmap);
    Real v = 2 + u * w;
    return piece(u, v, (u + v) / 2, (u - v) / 2) * pmap *
           pow_int(t, pmap - 1) * u;
  };
  // mu+nu >= 2: mu = u + s, nu = -s, v = u + 2s; d(mu,nu) = du ds
  Fn2 fB = [=](const Real& u, const Real& s) -> Real {
    return piece(u, u + 2 * s, u + s, -s);
  };
  Real rt = quad_rel_tol(ctx);
  QuadratureOutcome A = adaptive_integrate_2d(
      fA, Region2D{Real(0), Real(1), Real(-1), Real(1)}, ctx, rt);
  Region2D far;
  far.mu_lo = 2;
  far.mu_scale = tail_scale(p);
  QuadratureOutcome B = adaptive_integrate_2d(fB, far, ctx, rt);
  Real pre = sign * g_prefactor(p);
  QuadratureOutcome out;
  out.value = pre * (A.value + B.value);
  out.error_estimate = abs(pre) * (A.error_estimate + B.error_estimate);
  out.evaluations = A.evaluations + B.evaluations;
  out.subdivisions = A.subdivisions + B.subdivisions;
  out.converged = A.converged && B.converged;
  return out;
}

QuadratureOutcome aux_g_adaptive(const AuxParams& p,
                                 const PrecisionContext& ctx) {
  if (p.variant != 3 && !(p.kind == GammaKind::P && p.p1 == 0)) {
    Real reg = p.kind == GammaKind::P && p.p1 > 0 ? p.shape() : Real(0);
    Real e = (p.variant == 1 ? p.N2 : p.N3) + reg;
    if (e < 0 || (!is_integer(e) && e < 1)) return aux_g_rotated(p, ctx);
  }
  return aux_g_sum(p, {GroupTerm{Real(1), p.q, p.N2, p.N3}}, ctx);
}

QuadratureOutcome aux_g_recurrence(const AuxParams& p,
                                   const PrecisionContext& ctx);

}  // namespace

QuadratureOutcome aux_g(const AuxParams& p, const MethodChoice& method,
                        const PrecisionContext& ctx) {
  p.validate();
  PrecisionGuard guard(ctx);
  switch (method.strategy) {
    case Strategy::adaptive:
      return aux_g_adaptive(p, ctx);
    case Strategy::recurrence:
      return aux_g_recurrence(p, ctx);
    case Strategy::series: {
      SeriesOutcome s = aux_g_series(p, method.series_limit, ctx);
      QuadratureOutcome out;
      out.value = s.value;
      out.error_estimate =
          abs(s.value) * pow10(-(long)ctx.target_digits);
      out.evaluations = s.terms_used;
      out.converged = s.converged && !s.diverged;
      return out;
    }
  }
  throw std::logic_error("aux_g: unknown strategy");
}

// ---- exact rewrites ----

std::vector<std::pair<Real, AuxParams>> g_q_reduce(const AuxParams& p) {
  if (p.q < 1) throw std::domain_error("g_q_reduce: requires q >= 1");
  AuxParams up = p;
  up.q = p.q - 1;
  up.N2 = p.N2 + 2;
  AuxParams dn = p;
  dn.q = p.q - 1;
  dn.N3 = p.N3 + 2;
  return {{Real(1) / 4, up}, {Real(-1) / 4, dn}};
}

namespace {

// Correction reduced term for the N4/N2N3 relations of the 2-D family:
// exponent shift `sh` (a or a-1), with the prefactor of `owner` folded in.
RedTerm g_correction(const AuxParams& p, const Real& sh, const Real& coeff) {
  RedTerm r;
  r.coeff = coeff;
  if (p.variant == 1) {
    r.q_exp = p.q;
    r.N2 = p.N2 + sh;
    r.N3 = p.N3;
    r.p2 = p.p2 + p.p1;
    r.p3 = p.p3 + p.p1;
  } else if (p.variant == 2) {
    r.q_exp = p.q;
    r.N2 = p.N2;
    r.N3 = p.N3 + sh;
    r.p2 = p.p2 + p.p1;
    r.p3 = p.p3 - p.p1;
  } else {
    r.q_exp = p.q + sh;  // (mu nu)^{q+sh}; integer by variant-3 validation
    r.N2 = p.N2;
    r.N3 = p.N3;
    r.p2 = p.p2;
    r.p3 = p.p3;
    r.pmn = p.p1;
  }
  return r;
}

}  // namespace

GCombination g_shift_N4(const AuxParams& p, bool up) {
  p.validate();
  if (p.q != 0) throw std::domain_error("g_shift_N4: stated for q = 0");
  Real a = p.shape();
  if (!up && !(a - 1 > 0))
    throw std::domain_error("g_shift_N4: downward step needs N4 - N1 - 1 > 0");
  GCombination c;
  Real sign = p.kind == GammaKind::P ? 1 : -1;
  if (up) {
    // G_{N4} = (N4/(N4-N1)) { G_{N4+1} +- (p1^a/Gamma(a+1)) Gred_{N4+1} }
    Real factor = p.N4 / a;
    AuxParams main = p;
    main.N4 = p.N4 + 1;
    c.aux.push_back({factor, main});
    if (p.p1 > 0) {
      Real cpl = sign * factor * g_prefactor(main) *
                 exp(a * log(p.p1) - lg_here(a + 1));
      c.red.push_back(g_correction(p, a, cpl));
    }
    return c;
  }
  // G_{N4} = ((N4-N1-1)/(N4-1)) { G_{N4-1} -+ (p1^{a-1}/Gamma(a)) Gred_{N4-1} }
  Real factor = (a - 1) / (p.N4 - 1);
  AuxParams main = p;
  main.N4 = p.N4 - 1;
  c.aux.push_back({factor, main});
  if (p.p1 > 0) {
    Real cpl = -sign * factor * g_prefactor(main) *
               exp((a - 1) * log(p.p1) - lg_here(a));
    c.red.push_back(g_correction(p, a - 1, cpl));
  }
  return c;
}

GCombination g_shift_N2N3(const AuxParams& p) {
  p.validate();
  if (p.q != 0) throw std::domain_error("g_shift_N2N3: stated for q = 0");
  if (!(p.p2 > 0)) throw std::domain_error("g_shift_N2N3: singular at p2 = 0");
  if (p.variant == 3)
    throw std::domain_error(
        "g_shift_N2N3: variant 3 derivative leaves the reduced family");
  Real a = p.shape();
  Real sign = p.kind == GammaKind::P ? 1 : -1;
  Real inv = 1 / p.p2;
  GCombination c;
  JParams jb{p.N1, 0, p.N2, p.N3, p.N4, p.p1, p.p3, p.variant, p.kind};
  // e^{-p2} J term; aux_j carries the printed prefactor, so compensate.
  c.j.push_back({inv * exp(-p.p2) / j_printed_scale(jb), jb});
  if (!(p.N2 == 0)) {
    AuxParams t = p;
    t.N2 = p.N2 - 1;
    c.aux.push_back({inv * p.N2, t});
  }
  if (!(p.N3 == 0)) {
    AuxParams t = p;
    t.N3 = p.N3 - 1;
    c.aux.push_back({inv * p.N3, t});
  }
  if (p.p1 > 0) {
    // d/dmu of the gamma factor: +- p1^a arg^{a-1} e^{-p1 arg} / Gamma(a)
    // d arg/d mu = +1 for both variants 1 and 2
    Real cpl = sign * inv * g_prefactor(p) * exp(a * log(p.p1) - lg_here(a));
    c.red.push_back(g_correction(p, a - 1, cpl));
  }
  return c;
}

// ---- reduced integrals ----

Real g_reduced(long q, const Real& N2, const Real& N3, const Real& p2,
               const Real& p3, const PrecisionContext& ctx) {
  if (!(p2 > 0)) throw std::domain_error("g_reduced: divergent for p2 <= 0");
  RedTerm t;
  t.coeff = 1;
  t.q_exp = q;
  t.N2 = N2;
  t.N3 = N3;
  t.p2 = p2;
  t.p3 = p3;
  return eval_red_term(t, ctx);
}

Real eval_red_term(const RedTerm& t, const PrecisionContext& ctx) {
  PrecisionGuard guard(ctx);
  if (t.coeff == 0) return Real(0);
  if (!(t.p2 - abs(t.pmn) > 0))
    throw std::domain_error("eval_red_term: divergent (p2 <= |pmn|)");
  long q = as_integer(t.q_exp, "eval_red_term q_exp");
  if (q < 0) throw std::domain_error("eval_red_term: q_exp must be >= 0");
  Real N2 = t.N2, N3 = t.N3, p2 = t.p2, p3 = t.p3, pmn = t.pmn;
  bool has_pmn = !(pmn == 0);
  Fn2 f = [=](const Real& mu, const Real& nu) -> Real {
    Real expo = -p2 * mu - p3 * nu;
    if (has_pmn) expo -= pmn * mu * nu;
    if (!(N2 == 0)) expo += N2 * log(mu + nu);
    if (!(N3 == 0)) expo += N3 * log(mu - nu);
    return pow_int(mu * nu, q) * exp(expo);
  };
  Region2D region;
  if (t.p2 > 0 && t.p2 < 1) region.mu_scale = 1 / t.p2;
  QuadratureOutcome out =
      adaptive_integrate_2d(f, region, ctx, quad_rel_tol(ctx));
  return t.coeff * out.value;
}

Real j_reduced(long q, const Real& N2, const Real& N3, const Real& p3,
               const PrecisionContext& ctx) {
  JRedTerm t;
  t.coeff = 1;
  t.q_exp = q;
  t.N2 = N2;
  t.N3 = N3;
  t.p3 = p3;
  return eval_jred_term(t, ctx);
}

Real eval_jred_term(const JRedTerm& t, const PrecisionContext& ctx) {
  PrecisionGuard guard(ctx);
  if (t.coeff == 0) return Real(0);
  long qi = as_integer(t.q_exp, "eval_jred_term q_exp");
  if (qi < 0) throw std::domain_error("eval_jred_term: q_exp must be >= 0");
  Real N2 = t.N2, N3 = t.N3, p3 = t.p3;
  Fn1 f = [=](const Real& nu) -> Real {
    Real expo = -p3 * nu;
    if (!(N2 == 0)) expo += N2 * log(1 + nu);
    if (!(N3 == 0)) expo += N3 * log(1 - nu);
    return pow_int(nu, qi) * exp(expo);
  };
  QuadratureOutcome out =
      adaptive_integrate_1d(f, Real(-1), Real(1), ctx, quad_rel_tol(ctx));
  return t.coeff * out.value;
}

// ---- one-variable J functions ----

namespace {

// Bare J integral (no prefactor) by 1-D adaptive quadrature.
Real aux_j_bare(const JParams& p, const PrecisionContext& ctx) {
  Real a = p.shape();
  Real lga = log_gamma(a, ctx);
  int variant = p.variant;
  GammaKind kind = p.kind;
  Real p1 = p.p1, p3 = p.p3, N2 = p.N2, N3 = p.N3;
  long q = p.q;
  bool use_pq = !(p1 == 0);
  Real zero_val = kind == GammaKind::P ? 0 : 1;
  const PrecisionContext cctx = ctx;
  Fn1 f = [=](const Real& nu) -> Real {
    Real pq = zero_val;
    if (use_pq) {
      Real arg = variant == 1 ? 1 + nu : (variant == 2 ? 1 - nu : nu);
      pq = pq_value(kind, a, p1 * arg, lga, cctx);
    }
    if (pq == 0) return Real(0);
    Real expo = -p3 * nu;
    if (!(N2 == 0)) expo += N2 * log(1 + nu);
    if (!(N3 == 0)) expo += N3 * log(1 - nu);
    return pow_int(nu, q) * pq * exp(expo);
  };
  return adaptive_integrate_1d(f, Real(-1), Real(1), ctx, quad_rel_tol(ctx))
      .value;
}

// Recurrence path: q -> 0, then N4 down to shape 1, adaptive base.  Values
// stay in the printed normalization throughout because j_shift coefficients
// embed the prefactor compensation.
Real aux_j_recurse(const JParams& p, const PrecisionContext& ctx) {
  if (p.q > 0) {
    JCombination c = j_shift(p, JAxis::q);
    Real sum = 0;
    for (const auto& [coeff, t] : c.j) sum += coeff * aux_j_recurse(t, ctx);
    return sum;
  }
  if (p.shape() > 1) {
    JCombination c = j_shift(p, JAxis::N4_down);
    Real sum = 0;
    for (const auto& [coeff, t] : c.j) sum += coeff * aux_j_recurse(t, ctx);
    for (const auto& r : c.jred) sum += eval_jred_term(r, ctx);
    return sum;
  }
  return j_printed_scale(p) * j_prefactor_consistent(p) * aux_j_bare(p, ctx);
}

}  // namespace

QuadratureOutcome aux_j(const JParams& p, const MethodChoice& method,
                        const PrecisionContext& ctx) {
  p.validate();
  PrecisionGuard guard(ctx);
  QuadratureOutcome out;
  switch (method.strategy) {
    case Strategy::adaptive:
      out.value =
          j_printed_scale(p) * j_prefactor_consistent(p) * aux_j_bare(p, ctx);
      out.converged = true;
      return out;
    case Strategy::recurrence:
      if (!is_integer(p.shape()))
        throw std::invalid_argument(
            "aux_j: recurrence strategy needs an integer shape");
      out.value = aux_j_recurse(p, ctx);
      out.converged = true;
      return out;
    case Strategy::series:
      throw std::invalid_argument("aux_j: series strategy not supported");
  }
  throw std::logic_error("aux_j: unknown strategy");
}

JCombination j_shift(const JParams& p, JAxis axis) {
  p.validate();
  Real a = p.shape();
  Real sign = p.kind == GammaKind::P ? 1 : -1;
  Real scale_p = j_printed_scale(p);
  JCombination c;
  auto push_j = [&](const Real& coeff_consistent, const JParams& t) {
    // identity built in the consistent normalization, coefficients mapped so
    // that plugging printed aux_j values reproduces the printed LHS
    c.j.push_back({coeff_consistent * scale_p / j_printed_scale(t), t});
  };
  // 1-D corrections: exponent shift sh against nu-argument of the variant.
  auto jred_for = [&](const Real& sh, const Real& coeff) {
    JRedTerm r;
    Real cpl = coeff;
    if (p.variant == 1) {
      r.q_exp = p.q;
      r.N2 = p.N2 + sh;
      r.N3 = p.N3;
      r.p3 = p.p3 + p.p1;
      cpl *= exp(-p.p1);
    } else if (p.variant == 2) {
      r.q_exp = p.q;
      r.N2 = p.N2;
      r.N3 = p.N3 + sh;
      r.p3 = p.p3 - p.p1;
      cpl *= exp(-p.p1);
    } else {
      r.q_exp = p.q + sh;
      r.N2 = p.N2;
      r.N3 = p.N3;
      r.p3 = p.p3 + p.p1;
    }
    r.coeff = cpl * scale_p;  // map to the printed LHS normalization
    return r;
  };
  switch (axis) {
    case JAxis::q: {
      if (p.q < 1) throw std::domain_error("j_shift: q axis requires q >= 1");
      JParams up = p;
      up.q -= 1;
      up.N2 += 2;
      JParams dn = p;
      dn.q -= 1;
      dn.N3 += 2;
      push_j(Real(1) / 4, up);
      push_j(Real(-1) / 4, dn);
      return c;
    }
    case JAxis::N4_up: {
      Real factor = p.N4 / a;
      JParams main = p;
      main.N4 = p.N4 + 1;
      push_j(factor, main);
      if (p.p1 > 0) {
        Real cpl = sign * factor * j_prefactor_consistent(main) *
                   exp(a * log(p.p1) - lg_here(a + 1));
        c.jred.push_back(jred_for(a, cpl));
      }
      return c;
    }
    case JAxis::N4_down: {
      if (!(a - 1 > 0))
        throw std::domain_error("j_shift: downward step needs N4 - N1 > 1");
      Real factor = (a - 1) / (p.N4 - 1);
      JParams main = p;
      main.N4 = p.N4 - 1;
      push_j(factor, main);
      if (p.p1 > 0) {
        Real cpl = -sign * factor * j_prefactor_consistent(main) *
                   exp((a - 1) * log(p.p1) - lg_here(a));
        c.jred.push_back(jred_for(a - 1, cpl));
      }
      return c;
    }
    case JAxis::N2N3: {
      if (p.q != 0) throw std::domain_error("j_shift: N2N3 axis needs q = 0");
      if (p.p3 == 0)
        throw std::domain_error("j_shift: N2N3 axis singular at p3 = 0");
      if (p.variant == 3 && p.p1 > 0 && !(a - 1 >= 0))
        throw std::domain_error("j_shift: variant 3 N2N3 needs shape >= 1");
      Real inv = 1 / p.p3;
      if (!(p.N2 == 0)) {
        JParams t = p;
        t.N2 = p.N2 - 1;
        push_j(inv * p.N2, t);
      }
      if (!(p.N3 == 0)) {
        JParams t = p;
        t.N3 = p.N3 - 1;
        push_j(-inv * p.N3, t);
      }
      if (p.p1 > 0) {
        // d/dnu of the gamma factor: +- p1^a (d arg/d nu) arg^{a-1}
        // e^{-p1 arg}/Gamma(a); d arg/d nu = +1, -1, +1 for variants 1-3.
        Real cpl = sign * inv * j_prefactor_consistent(p) *
                   exp(a * log(p.p1) - lg_here(a));
        if (p.variant == 2) cpl = -cpl;
        c.jred.push_back(jred_for(a - 1, cpl));
      }
      // boundary coefficient, inside the 1/p3 bracket (j_boundary already
      // carries the consistent prefactor)
      c.boundary.push_back({-inv * scale_p, p});
      return c;
    }
  }
  throw std::logic_error("j_shift: unknown axis");
}

Real j_boundary(const JParams& p, const PrecisionContext& ctx) {
  p.validate();
  PrecisionGuard guard(ctx);
  Real a = p.shape();
  Real pre = j_prefactor_consistent(p);  // printed subscript is N1 here
  Real lga = log_gamma(a, ctx);
  auto gated = [&](const Real& x) -> Real {
    if (p.p1 == 0) return p.kind == GammaKind::P ? Real(0) : Real(1);
    return pq_value(p.kind, a, x, lga, ctx);
  };
  Real term1 = 0, term2 = 0;
  if (p.N3 == 0) {
    Real g = p.variant == 1   ? gated(2 * p.p1)
             : p.variant == 2 ? (p.kind == GammaKind::P ? Real(0) : Real(1))
                              : gated(p.p1);
    term1 = exp(p.N2 * log(Real(2))) * g;
  }
  if (p.N2 == 0) {
    Real g = p.variant == 1   ? (p.kind == GammaKind::P ? Real(0) : Real(1))
             : p.variant == 2 ? gated(2 * p.p1)
                              : gated(-p.p1);
    term2 = exp(p.N3 * log(Real(2))) * g;
  }
  // Second term sits at nu = -1, hence e^{+p3}.
  return pre * (term1 * exp(-p.p3) - term2 * exp(p.p3));
}

// ---- combination evaluation ----

Real eval_combination(const GCombination& c, const PrecisionContext& ctx) {
  PrecisionGuard guard(ctx);
  Real sum = 0;
  MethodChoice adaptive;
  for (const auto& [coeff, params] : c.aux)
    sum += coeff * aux_g(params, adaptive, ctx).value;
  for (const auto& r : c.red) sum += eval_red_term(r, ctx);
  for (const auto& [coeff, params] : c.j)
    sum += coeff * aux_j(params, adaptive, ctx).value;
  return sum;
}

Real eval_combination(const JCombination& c, const PrecisionContext& ctx) {
  PrecisionGuard guard(ctx);
  Real sum = 0;
  MethodChoice adaptive;
  for (const auto& [coeff, params] : c.j)
    sum += coeff * aux_j(params, adaptive, ctx).value;
  for (const auto& r : c.jred) sum += eval_jred_term(r, ctx);
  for (const auto& [coeff, params] : c.boundary)
    sum += coeff * j_boundary(params, ctx);
  return sum;
}

// ---- recurrence strategy for the 2-D family ----

namespace {

QuadratureOutcome aux_g_recurrence(const AuxParams& p,
                                   const PrecisionContext& ctx) {
  if (!is_integer(p.shape()))
    throw std::invalid_argument(
        "aux_g: recurrence strategy needs an integer N4 - N1");
  // 1. lower q to zero (exact rewrites, terms merged on (N2,N3) offsets)
  std::map<std::pair<long, long>, Real> qterms;  // (dN2, dN3) -> coeff
  qterms[{0, 0}] = 1;
  for (long step = 0; step < p.q; ++step) {
    std::map<std::pair<long, long>, Real> next;
    for (const auto& [key, coeff] : qterms) {
      next[{key.first + 2, key.second}] += coeff / 4;
      next[{key.first, key.second + 2}] -= coeff / 4;
    }
    qterms = std::move(next);
  }
  // 2. walk N4 down until the gamma shape reaches 1; corrections are
  // reduced integrals, evaluated adaptively as they appear
  long steps = as_integer(p.shape(), "shape") - 1;
  Real extra = 0;
  std::vector<GroupTerm> base_terms;
  AuxParams proto;
  bool have_proto = false;
  for (const auto& [key, coeff0] : qterms) {
    AuxParams cur = p;
    cur.q = 0;
    cur.N2 = p.N2 + key.first;
    cur.N3 = p.N3 + key.second;
    Real coeff = coeff0;
    for (long s = 0; s < steps; ++s) {
      GCombination c = g_shift_N4(cur, /*up=*/false);
      for (const auto& r : c.red) {
        RedTerm rr = r;
        rr.coeff *= coeff;
        extra += eval_red_term(rr, ctx);
      }
      coeff *= c.aux[0].first;
      cur = c.aux[0].second;
    }
    base_terms.push_back(GroupTerm{coeff, 0, cur.N2, cur.N3});
    if (!have_proto) {
      proto = cur;
      have_proto = true;
    }
  }
  // base terms share (N1, N4, p's, variant, kind): one adaptive pass; the
  // chained coefficients already relate printed values on both sides
  QuadratureOutcome base = aux_g_sum(proto, base_terms, ctx);
  base.value += extra;
  return base;
}

}  // namespace

// ---- Mulliken auxiliary functions ----

Real mulliken_A(const Real& m, const Real& p, const PrecisionContext& ctx) {
  PrecisionGuard guard(ctx);
  if (!(p > 0)) throw std::domain_error("mulliken_A: divergent for p <= 0");
  if (is_integer(m) && m >= 0) {
    long mi = as_integer(m, "mulliken_A m");
    // (m!/p^{m+1}) e^{-p} sum_{k<=m} p^k/k!  -- all terms positive
    Real sum = 1, term = 1, mfac = 1;
    for (long k = 1; k <= mi; ++k) {
      term *= p / k;
      sum += term;
      mfac *= k;
    }
    return mfac / pow_int(p, mi + 1) * exp(-p) * sum;
  }
  Real mm = m;
  return upper_gamma(mm + 1, p, ctx) * exp(-(mm + 1) * log(p));
}

Real mulliken_B(long m, const Real& p, const PrecisionContext& ctx) {
  if (m < 0) throw std::domain_error("mulliken_B: requires m >= 0");
  PrecisionGuard guard(ctx);
  if (p == 0) return m % 2 == 0 ? Real(2) / (m + 1) : Real(0);
  if (abs(p) < 1) {
    // Maclaurin in p: only parity-matching powers survive.
    Real sum = 0, pj = 1;  // (-p)^j / j!
    for (long j = 0; j < 100000; ++j) {
      if ((m + j) % 2 == 0) {
        Real term = pj * 2 / (m + j + 1);
        sum += term;
        if (j > 2 && abs(term) <= abs(sum) * ctx.series_rel_cutoff) return sum;
      }
      pj *= -p / (j + 1);
    }
    throw std::runtime_error("mulliken_B: series failed to converge");
  }
  // Upward recursion loses ~ |p| log10(e) digits to cancellation; run it at
  // elevated precision and round back.
  double pd = fabs(p.convert_to<double>());
  unsigned guard_digits =
      ctx.working_digits + (unsigned)(0.45 * pd) + (unsigned)(m / 4) + 15;
  Real result;
  {
    PrecisionGuard inner(guard_digits);
    Real pp = p;
    pp.precision(guard_digits);
    Real ep = exp(pp), em = exp(-pp);
    Real b = (ep - em) / pp;
    for (long k = 1; k <= m; ++k) {
      Real bound = (k % 2 == 0 ? ep : -ep) - em;
      b = (bound + k * b) / pp;
    }
    result = b;
  }
  result.precision(ctx.working_digits);
  return result;
}

// ---- series strategy ----

namespace {

// Mulliken A values on the integer lattice anchored at `anchor`.
struct ACache {
  Real p;
  Real anchor;
  const PrecisionContext* ctx;
  std::map<long, Real> vals;
  Real get(const Real& m) {
    long n = lround((m - anchor).convert_to<double>());
    auto it = vals.find(n);
    if (it != vals.end()) return it->second;
    Real v = mulliken_A(m, p, *ctx);
    vals.emplace(n, v);
    return v;
  }
};

struct BCache {
  Real p;
  const PrecisionContext* ctx;
  std::vector<Real> vals;
  Real get(long m) {
    while ((long)vals.size() <= m)
      vals.push_back(mulliken_B((long)vals.size(), p, *ctx));
    return vals[m];
  }
};

SeriesOutcome g_reduced_series_core(long q, const Real& N2, const Real& N3,
                                    long Ns, ACache& ac, BCache& bc,
                                    const PrecisionContext& ctx) {
  SeriesOutcome out;
  long kmax = Ns;
  bool finite = false;
  if (is_integer(N2) && is_integer(N3) && N2 >= 0 && N3 >= 0) {
    long cap = as_integer(N2, "N2") + as_integer(N3, "N3");
    if (cap <= Ns) {
      kmax = cap;  // binomial expansion terminates exactly
      finite = true;
    }
  }
  std::vector<Real> f2(kmax + 1), f3(kmax + 1);
  f2[0] = f3[0] = 1;
  for (long j = 1; j <= kmax; ++j) {
    f2[j] = f2[j - 1] * (N2 - j + 1) / j;
    f3[j] = f3[j - 1] * (N3 - j + 1) / j;
  }
  Real sum = 0;
  long calm = 0;
  int prev_sign = 0;
  for (long k = 0; k <= kmax; ++k) {
    Real F = 0;  // F_k^{Ns}(N2,N3)
    for (long sigma = 0; sigma <= std::min(k, Ns); ++sigma) {
      Real t = f2[k - sigma] * f3[sigma];
      F += sigma % 2 == 0 ? t : -t;
    }
    Real term = F * ac.get(N2 + N3 + q - k) * bc.get(q + k);
    sum += term;
    out.terms_used = k + 1;
    int sgn = term > 0 ? 1 : (term < 0 ? -1 : 0);
    if (sgn != 0 && prev_sign != 0 && sgn != prev_sign) out.critical_ns = k;
    if (sgn != 0) prev_sign = sgn;
    if (abs(term) <= abs(sum) * ctx.series_rel_cutoff) {
      if (++calm >= 3) {
        out.converged = true;
        break;
      }
    } else {
      calm = 0;
    }
  }
  if (finite) {
    out.converged = true;
  } else if (!out.converged) {
    out.diverged = true;
  }
  out.value = sum;
  return out;
}

}  // namespace

SeriesOutcome g_reduced_series(long q, const Real& N2, const Real& N3,
                               const Real& p2, const Real& p3, long Ns,
                               const PrecisionContext& ctx) {
  PrecisionGuard guard(ctx);
  if (!(p2 > 0)) throw std::domain_error("g_reduced_series: requires p2 > 0");
  if (Ns < 1) throw std::domain_error("g_reduced_series: Ns >= 1 required");
  if (q < 0) throw std::domain_error("g_reduced_series: q >= 0 required");
  ACache ac{p2, N2 + N3 + q, &ctx, {}};
  BCache bc{p3, &ctx, {}};
  return g_reduced_series_core(q, N2, N3, Ns, ac, bc, ctx);
}

SeriesOutcome aux_g_series(const AuxParams& p, long Ns,
                           const PrecisionContext& ctx) {
  p.validate();
  PrecisionGuard guard(ctx);
  if (Ns < 1) throw std::domain_error("aux_g_series: Ns >= 1 required");
  if (p.variant == 3)
    throw std::invalid_argument(
        "aux_g_series: variant 3 kernel is not separable over the reduced "
        "family");
  Real a = p.shape();
  Real pre = g_prefactor(p);
  SeriesOutcome out;
  if (p.p1 == 0) {
    if (p.kind == GammaKind::P) {
      out.converged = true;  // every term carries p1^{a+s}
      return out;
    }
    SeriesOutcome red = g_reduced_series(p.q, p.N2, p.N3, p.p2, p.p3, Ns, ctx);
    red.value *= pre;
    return red;
  }
  // P-kind expansion: P[a, p1 arg] e^{...} = sum_s p1^{a+s} arg^{a+s}
  // e^{-p1 arg} e^{...} / Gamma(a+s+1); arg^{a+s} shifts N2 (variant 1) or
  // N3 (variant 2), e^{-p1 arg} shifts (p2, p3).
  Real p2s = p.p2 + p.p1;
  Real p3s = p.variant == 1 ? Real(p.p3 + p.p1) : Real(p.p3 - p.p1);
  Real lp1 = log(p.p1);
  ACache ac{p2s, p.N2 + p.N3 + p.q + a, &ctx, {}};
  BCache bc{p3s, &ctx, {}};
  Real psum = 0;
  long calm = 0;
  int prev_sign = 0;
  bool p_converged = false;
  Real prev_mag = -1, prev_mag2 = -1;
  for (long s = 0; s <= Ns; ++s) {
    Real cs = exp((a + s) * lp1 - lg_here(a + s + 1));
    SeriesOutcome inner =
        p.variant == 1
            ? g_reduced_series_core(p.q, p.N2 + a + s, p.N3, Ns, ac, bc, ctx)
            : g_reduced_series_core(p.q, p.N2, p.N3 + a + s, Ns, ac, bc, ctx);
    Real term = cs * inner.value;
    psum += term;
    out.terms_used = s + 1;
    int sgn = term > 0 ? 1 : (term < 0 ? -1 : 0);
    if (sgn != 0 && prev_sign != 0 && sgn != prev_sign) out.critical_ns = s;
    if (sgn != 0) prev_sign = sgn;
    Real mag = abs(term);
    if (mag <= abs(psum) * ctx.series_rel_cutoff) {
      if (++calm >= 3) {
        p_converged = true;
        break;
      }
    } else {
      calm = 0;
    }
    prev_mag2 = prev_mag;
    prev_mag = mag;
  }
  out.converged = p_converged;
  if (!p_converged && prev_mag2 >= 0 && prev_mag >= prev_mag2)
    out.diverged = true;  // outer terms still growing at truncation
  if (p.kind == GammaKind::P) {
    out.value = pre * psum;
    return out;
  }
  SeriesOutcome red = g_reduced_series(p.q, p.N2, p.N3, p.p2, p.p3, Ns, ctx);
  out.value = pre * (red.value - psum);
  out.converged = out.converged && red.converged;
  out.diverged = out.diverged || red.diverged;
  return out;
}

}  // namespace nsto
