// Gamma-family special functions: complete gamma, regularized incomplete
// gamma of both kinds, Pochhammer symbols and generalized binomial
// coefficients. Everything is a pure function of (PrecisionContext, args).
#pragma once

#include "nsto/real.hpp"

namespace nsto {

enum class GammaKind { P, Q };

// Γ(z) for z > 0, correctly rounded at the context working precision.
Real gamma_fn(const Real& z, const PrecisionContext& ctx);

// ln Γ(z), z > 0.
Real log_gamma(const Real& z, const PrecisionContext& ctx);

// Regularized incomplete gamma: P[a,x] = γ(a,x)/Γ(a), Q[a,x] = Γ(a,x)/Γ(a).
// Series for x < a+1, continued fraction otherwise; stable for 0 <= a < 1.
// Requires a > 0 and x >= 0.
Real reg_gamma(GammaKind kind, const Real& a, const Real& x,
               const PrecisionContext& ctx);

// Same, with ln Γ(a) supplied by the caller (hot loops evaluate many x for
// one shape a).
Real reg_gamma(GammaKind kind, const Real& a, const Real& x,
               const Real& log_gamma_a, const PrecisionContext& ctx);

// Real-valued continuation of P[a,x] to negative x, available for positive
// integer shapes only (the power series stays real there).
Real reg_gamma_p_continued(const Real& a, const Real& x,
                           const PrecisionContext& ctx);

// Unnormalized upper incomplete gamma Γ(a,x) for x > 0 and any real a
// (continued fraction; no Γ(a) pole involved).
Real upper_gamma(const Real& a, const Real& x, const PrecisionContext& ctx);

// Rising factorial (a)_n = a(a+1)...(a+n-1); (a)_0 = 1. Product form.
Real pochhammer(const Real& a, long n);

// Generalized binomial coefficient F_k(N) = Γ(N+1)/(Γ(k+1)Γ(N-k+1)) computed
// as the product Π_{j=1..k} (N-k+j)/j, which stays finite for any real N
// (in particular negative integers). F_k(N) = 0 for k < 0.
Real gen_binomial(const Real& N, long k);

// F_m^s(N2,N3) = Σ_{σ=0..s} (-1)^σ F_{m-σ}(N2) F_σ(N3)   (two-factor
// binomial product coefficient of the (μ+ν)^{N2}(μ-ν)^{N3} expansion).
Real binomial_F(long m, long s, const Real& N2, const Real& N3);

}  // namespace nsto
