#include "nsto/special.hpp"

#include <mpfr.h>

#include <cmath>
#include <stdexcept>

namespace nsto {

namespace {

// Series for the lower regularized gamma,
//   P[a,x] = x^a e^{-x} / Γ(a) * Σ_{n>=0} x^n / (a)_{n+1},
// convergent everywhere, used for x < a+1.  Works term-by-term in the
// ambient precision; the caller has already raised default_precision.
Real p_series(const Real& a, const Real& x, const Real& log_gamma_a,
              const PrecisionContext& ctx) {
  Real term = 1 / a;
  Real sum = term;
  Real an = a;
  const Real cutoff = ctx.series_rel_cutoff;
  for (long n = 0; n < 100000; ++n) {
    an += 1;
    term *= x / an;
    sum += term;
    if (abs(term) <= abs(sum) * cutoff) {
      return sum * exp(a * log(x) - x - log_gamma_a);
    }
  }
  throw std::runtime_error("reg_gamma: series failed to converge");
}

// Modified Lentz continued fraction for the upper incomplete gamma,
//   Γ(a,x) = e^{-x} x^a * 1/(x+1-a- 1(1-a)/(x+3-a- 2(2-a)/(x+5-a- ...))),
// used for x >= a+1.  Returns the CF value (without the e^{-x} x^a front
// factor).
Real q_cf(const Real& a, const Real& x, const PrecisionContext& ctx) {
  const Real tiny = pow10(-(long)Real::default_precision() * 2);
  Real b = x + 1 - a;
  Real c = 1 / tiny;
  Real d = 1 / b;
  Real h = d;
  for (long i = 1; i < 100000; ++i) {
    Real an = -i * (i - a);
    b += 2;
    d = an * d + b;
    if (abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (abs(c) < tiny) c = tiny;
    d = 1 / d;
    Real delta = d * c;
    h *= delta;
    if (abs(delta - 1) <= ctx.series_rel_cutoff) return h;
  }
  throw std::runtime_error("reg_gamma: continued fraction failed to converge");
}

}  // namespace

Real gamma_fn(const Real& z, const PrecisionContext& ctx) {
  PrecisionGuard guard(ctx.working_digits);
  if (!(z > 0)) throw std::domain_error("gamma_fn: requires z > 0");
  Real zz = z;  // copy at the working precision
  return tgamma(zz);
}

Real log_gamma(const Real& z, const PrecisionContext& ctx) {
  PrecisionGuard guard(ctx.working_digits);
  if (!(z > 0)) throw std::domain_error("log_gamma: requires z > 0");
  Real zz = z;
  return lgamma(zz);
}

Real reg_gamma(GammaKind kind, const Real& a, const Real& x,
               const PrecisionContext& ctx) {
  return reg_gamma(kind, a, x, log_gamma(a, ctx), ctx);
}

Real reg_gamma(GammaKind kind, const Real& a, const Real& x,
               const Real& log_gamma_a, const PrecisionContext& ctx) {
  PrecisionGuard guard(ctx.working_digits);
  if (!(a > 0)) throw std::domain_error("reg_gamma: requires a > 0");
  if (x < 0) throw std::domain_error("reg_gamma: requires x >= 0");
  if (x == 0) return kind == GammaKind::P ? Real(0) : Real(1);
  if (x < a + 1) {
    Real p = p_series(a, x, log_gamma_a, ctx);
    return kind == GammaKind::P ? p : 1 - p;
  }
  Real q = q_cf(a, x, ctx) * exp(a * log(x) - x - log_gamma_a);
  return kind == GammaKind::Q ? q : 1 - q;
}

Real reg_gamma_p_continued(const Real& a, const Real& x,
                           const PrecisionContext& ctx) {
  PrecisionGuard guard(ctx.working_digits);
  if (x >= 0) return reg_gamma(GammaKind::P, a, x, ctx);
  if (!(a > 0) || !is_integer(a))
    throw std::domain_error(
        "reg_gamma_p_continued: negative argument needs positive integer "
        "shape");
  // The P series stays real for x < 0 when a is a positive integer: the
  // front factor x^a is (-1)^a |x|^a and every series term is real.
  Real lg = log_gamma(a, ctx);
  Real term = 1 / a;
  Real sum = term;
  Real an = a;
  for (long n = 0; n < 100000; ++n) {
    an += 1;
    term *= x / an;
    sum += term;
    if (abs(term) <= abs(sum) * ctx.series_rel_cutoff) {
      long ai = static_cast<long>(lround(static_cast<double>(a)));
      Real front = exp(a * log(-x) - x - lg);
      if (ai % 2 != 0) front = -front;
      return sum * front;
    }
  }
  throw std::runtime_error("reg_gamma_p_continued: series failed to converge");
}

Real upper_gamma(const Real& a, const Real& x, const PrecisionContext& ctx) {
  PrecisionGuard guard(ctx.working_digits);
  if (!(x > 0)) throw std::domain_error("upper_gamma: requires x > 0");
  if (x >= a + 1 || a <= 0) {
    return q_cf(a, x, ctx) * exp(a * log(x) - x);
  }
  // Small-x region with a > 0: go through the regularized form.
  return reg_gamma(GammaKind::Q, a, x, ctx) * gamma_fn(a, ctx);
}

Real pochhammer(const Real& a, long n) {
  if (n < 0) throw std::domain_error("pochhammer: requires n >= 0");
  Real r = 1;
  for (long j = 0; j < n; ++j) r *= a + j;
  return r;
}

Real gen_binomial(const Real& N, long k) {
  if (k < 0) return Real(0);
  Real r = 1;
  for (long j = 1; j <= k; ++j) r *= (N - k + j) / j;
  return r;
}

Real binomial_F(long m, long s, const Real& N2, const Real& N3) {
  Real sum = 0;
  for (long sigma = 0; sigma <= s; ++sigma) {
    Real t = gen_binomial(N2, m - sigma) * gen_binomial(N3, sigma);
    if (sigma % 2 != 0) t = -t;
    sum += t;
  }
  return sum;
}

}  // namespace nsto
