// Angular coefficient machinery: associated Legendre functions in the
// positive (Condon-Shortley-free) convention, generalized Gaunt
// coefficients for real spherical harmonics, and the exact-rational
// expansion of Legendre products into the ellipsoidal monomial basis.
#pragma once

#include <boost/multiprecision/cpp_int.hpp>

#include <map>
#include <tuple>

#include "nsto/real.hpp"

namespace nsto {

using Rat = boost::multiprecision::cpp_rational;

// Exact rational -> Real through integer strings (the generic boost
// rational-to-float conversion stalls on variable-precision mpfr targets).
Real rat_to_real(const Rat& r);

// P_lm(x), 0 <= m <= l, |x| <= 1, positive convention
// P_lm = (1-x^2)^{m/2} d^m/dx^m P_l.
Real assoc_legendre(int l, int m, const Real& x, const PrecisionContext& ctx);

// Normalization k_{l,lambda} = sqrt((2l+1)(l-lambda)! / (2 (l+lambda)!)) of
// the theta factor: integral over [-1,1] of (k P_{l,lambda})^2 equals 1.
Real legendre_norm(int l, int lambda, const PrecisionContext& ctx);

// Generalized Gaunt coefficient C^{L,Lambda}: sqrt(2/(2L+1)) times the
// integral of the three normalized theta factors
// (k1 P_{l1,|m1|})(k2 P_{l2,|m2|})(K P_{L,|M|}).  Zero outside triangle or
// parity selection rules.
Real gaunt_coeff(int L, int M, int l1, int m1, int l2, int m2,
                 const PrecisionContext& ctx);

// Real-harmonic phi-combination coefficient A^M_{m1 m2}: sqrt(2 pi) times
// the integral of the three normalized phi factors.  Zero unless
// |M| in {|m1-m2|, |m1+m2|} with compatible sine/cosine parity.
Real a_coeff(int M, int m1, int m2, const PrecisionContext& ctx);

// Full real Gaunt integral of three real spherical harmonics,
// = sqrt((2L+1)/4pi) * gaunt_coeff * a_coeff.
Real real_gaunt(int L, int M, int l1, int m1, int l2, int m2,
                const PrecisionContext& ctx);

// Exact expansion of P_{L1,lambda}(cos theta_a) P_{L2,lambda}(cos theta_b)
// into sum over (alpha,beta,q) of g^q_{alpha beta} (mu nu)^q
// (mu+nu)^{-alpha} (mu-nu)^{-beta}, with
// cos theta_a = (1+mu nu)/(mu+nu), cos theta_b = (1-mu nu)/(mu-nu).
struct GExpansion {
  int L1 = 0, L2 = 0, lambda = 0;
  // (alpha, beta, q) -> exact rational coefficient; zeros omitted
  std::map<std::tuple<int, int, int>, Rat> coeff;
};

// Memoized; alpha in [-lambda, L1], beta in [lambda, L2], q in [0, alpha+beta].
const GExpansion& g_expansion(int L1, int L2, int lambda);

// Numeric evaluation of the expansion right-hand side (test/diagnostic aid).
Real g_reconstruct(const GExpansion& g, const Real& mu, const Real& nu,
                   const PrecisionContext& ctx);

}  // namespace nsto
