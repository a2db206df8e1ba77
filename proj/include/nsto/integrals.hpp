// Two-center two-electron Coulomb and hybrid integrals over Slater-type
// orbitals with real (possibly non-integer) principal quantum numbers, in
// the lined-up coordinate system.  The assembly reduces every integral to a
// finite weighted sum of auxiliary functions (a "plan"), which is then
// evaluated with any of the auxiliary-function strategies.
#pragma once

#include <vector>

#include "nsto/angular.hpp"
#include "nsto/auxfn.hpp"

namespace nsto {

struct Orbital {
  Real n{1};   // principal quantum number, any real > 0 (n > l not required)
  int l = 0;
  int m = 0;
  Real zeta{1};
  void validate() const;  // throws std::domain_error
};

// Unprimed/primed orbital pair forming one charge density; the unprimed
// zeta enters the asymmetry t with positive sign.
struct OrbitalPair {
  Orbital o;
  Orbital op;
};

enum class IntegralKind { coulomb, hybrid };

struct TwoElectronSpec {
  OrbitalPair pair1;  // electron 1, both orbitals on center a
  OrbitalPair pair2;  // electron 2: both on b (coulomb); o on a, op on b (hybrid)
  Real R{1};
  IntegralKind kind = IntegralKind::coulomb;
  void validate() const;
};

// R-scaled derived parameters of a pair: p = (R/2)(zeta+zeta'),
// t = (zeta-zeta')/(zeta+zeta'), N = n+n', and x = x_scale * r with
// x_scale = zeta+zeta'.
struct PairParams {
  Real p{0}, t{0}, N{0}, x_scale{0};
};
PairParams pair_params(const OrbitalPair& pr, const Real& R);

// Radial normalization (2 zeta)^{n+1/2} / sqrt(Gamma(2n+1)).
Real nsto_norm(const Real& n, const Real& zeta, const PrecisionContext& ctx);

// Pair normalization
// N(p,t) = [p(1+t)]^{n+1/2} [p(1-t)]^{n'+1/2} / sqrt(Gamma(2n+1) Gamma(2n'+1)).
Real pair_norm(const Real& p, const Real& t, const Real& n, const Real& np,
               const PrecisionContext& ctx);

// Radial factor of the one-center potential expansion:
// f_{N1}^{L1}(x) = Gamma(N1+L1+1) x^{-(L1+1)} { P[N1+L1+1, x]
//                  + x^{2L1+1} / (N1-L1)_{2L1+1} * Q[N1-L1, x] }.
// Requires N1+L1+1 > 0, N1-L1 > 0, x > 0.
Real radial_potential_f(const Real& N1, long L1, const Real& x,
                        const PrecisionContext& ctx);

// One term of an assembled integral: weight times an auxiliary function.
struct PlanTerm {
  Real weight;
  AuxParams aux;
};

// Expands the angular sums of the chosen integral into the full coefficient
// plan, sorted by descending |weight| (deterministic tie-break).
std::vector<PlanTerm> integral_plan(const TwoElectronSpec& spec,
                                    const PrecisionContext& ctx);

// Evaluates a plan.  The adaptive strategy batches terms that share kernel
// and exponential parameters into a single quadrature pass; corner-singular
// terms and the recurrence/series strategies evaluate term by term through
// a memo cache.
QuadratureOutcome evaluate_plan(const std::vector<PlanTerm>& plan,
                                const MethodChoice& method,
                                const PrecisionContext& ctx);

QuadratureOutcome coulomb_integral(const TwoElectronSpec& spec,
                                   const MethodChoice& method,
                                   const PrecisionContext& ctx);
QuadratureOutcome hybrid_integral(const TwoElectronSpec& spec,
                                  const MethodChoice& method,
                                  const PrecisionContext& ctx);

}  // namespace nsto
