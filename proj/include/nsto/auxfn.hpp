// Two-variable auxiliary functions PiG/QiG, their one-variable companions
// PiJ/QiJ, reduced gamma-free forms, Mulliken functions, and the three
// evaluation strategies (adaptive quadrature, recurrence lowering, series).
#pragma once

#include <optional>
#include <vector>

#include "nsto/quadrature.hpp"
#include "nsto/real.hpp"
#include "nsto/special.hpp"

namespace nsto {

enum class Strategy { adaptive, recurrence, series };

struct MethodChoice {
  Strategy strategy = Strategy::adaptive;
  long series_limit = 100;  // Ns cap for the series path
};

// Parameters of PiG/QiG (two-variable family).  The value carries the
// prefactor p1^N1 / (N4-N1)_N1.
struct AuxParams {
  long N1 = 0;
  long q = 0;
  Real N2{0}, N3{0}, N4{0};
  Real p1{0}, p2{0}, p3{0};
  int variant = 1;          // 1: p1(mu+nu), 2: p1(mu-nu), 3: p1(mu nu)
  GammaKind kind = GammaKind::P;

  Real shape() const { return N4 - N1; }  // incomplete-gamma shape a
  void validate() const;                  // throws std::domain_error
};

// One-variable family PiJ/QiJ.  NOTE: exposed with the prefactor
// p1^N1 / (N4-N1)_{N1-1} exactly as printed; the recurrence identities are
// only self-consistent with subscript N1, so combination builders carry the
// compensating ratio explicitly.
struct JParams {
  long N1 = 0;
  long q = 0;
  Real N2{0}, N3{0}, N4{0};
  Real p1{0}, p3{0};
  int variant = 1;          // 1: p1(1+nu), 2: p1(1-nu), 3: p1 nu
  GammaKind kind = GammaKind::P;

  Real shape() const { return N4 - N1; }
  void validate() const;
};

// ---- integrand / direct evaluation ----

// Integrand of the two-variable family at (mu,nu), prefactor excluded.
Real g_integrand(const AuxParams& p, const Real& mu, const Real& nu,
                 const PrecisionContext& ctx);

// Full auxiliary-function value (prefactor included).
QuadratureOutcome aux_g(const AuxParams& p, const MethodChoice& method,
                        const PrecisionContext& ctx);

// Grouped evaluation: sum_k coeff_k * G(proto with q_k, N2_k, N3_k), all
// sharing (variant, kind, N1, N4, p1, p2, p3), in a single adaptive pass.
// N2_k - proto.N2 and N3_k - proto.N3 must be integers.
struct GroupTerm {
  Real coeff;
  long q;
  Real N2, N3;
};
QuadratureOutcome aux_g_sum(const AuxParams& proto,
                            const std::vector<GroupTerm>& terms,
                            const PrecisionContext& ctx);

// One-variable J function over nu in [-1,1], printed prefactor.
QuadratureOutcome aux_j(const JParams& p, const MethodChoice& method,
                        const PrecisionContext& ctx);

// ---- recurrence building blocks (exact symbolic rewrites) ----

// q-lowering: G^q = 1/4 (G^{q-1}_{N2+2} - G^{q-1}_{N3+2}).
std::vector<std::pair<Real, AuxParams>> g_q_reduce(const AuxParams& p);

// A reduced-G-type integral (gamma-free), generalized enough for every
// correction term: coeff * Int (mu nu)^q_exp (mu+nu)^N2 (mu-nu)^N3
// e^{-p2 mu - p3 nu - pmn mu nu}.  q_exp must be a nonnegative integer
// unless pmn = 0 and the nu-range keeps mu*nu positive (it never does), so
// non-integer q_exp is a domain error at evaluation time.
struct RedTerm {
  Real coeff{0};
  Real q_exp{0};
  Real N2{0}, N3{0};
  Real p2{0}, p3{0};
  Real pmn{0};
};

// 1-D counterpart over nu in [-1,1]:
// coeff * Int nu^q_exp (1+nu)^N2 (1-nu)^N3 e^{-p3 nu}.
struct JRedTerm {
  Real coeff{0};
  Real q_exp{0};
  Real N2{0}, N3{0};
  Real p3{0};
};

struct GCombination {
  std::vector<std::pair<Real, AuxParams>> aux;
  std::vector<RedTerm> red;
  std::vector<std::pair<Real, JParams>> j;  // coefficients include the
                                            // printed-prefactor compensation
};

// N4 raising/lowering recurrences; q must be 0.
GCombination g_shift_N4(const AuxParams& p, bool up);

// N2/N3 lowering via the boundary J term; q must be 0, p2 > 0.
GCombination g_shift_N2N3(const AuxParams& p);

enum class JAxis { q, N4_up, N4_down, N2N3 };

struct JCombination {
  std::vector<std::pair<Real, JParams>> j;
  std::vector<JRedTerm> jred;
  // boundary coefficient terms, evaluated through j_boundary
  std::vector<std::pair<Real, JParams>> boundary;
};
JCombination j_shift(const JParams& p, JAxis axis);

// Closed-form boundary coefficient (second term carries
// e^{+p3}: the nu=-1 boundary of the parts integration).
Real j_boundary(const JParams& p, const PrecisionContext& ctx);

// ---- reduced (gamma-free) forms and Mulliken functions ----

// Bare reduced double integral (no prefactor), adaptive.
Real g_reduced(long q, const Real& N2, const Real& N3, const Real& p2,
               const Real& p3, const PrecisionContext& ctx);

// Bare reduced single integral over [-1,1] (no prefactor), adaptive.
Real j_reduced(long q, const Real& N2, const Real& N3, const Real& p3,
               const PrecisionContext& ctx);

// Generalized reduced integrals for correction terms (coeff applied).
Real eval_red_term(const RedTerm& t, const PrecisionContext& ctx);
Real eval_jred_term(const JRedTerm& t, const PrecisionContext& ctx);

// Adaptive evaluation of a whole combination (identity RHS helper).
Real eval_combination(const GCombination& c, const PrecisionContext& ctx);
Real eval_combination(const JCombination& c, const PrecisionContext& ctx);

// Mulliken A_m(p) = Int_1^inf mu^m e^{-p mu} dmu, p > 0; m may be any real
// (negative and fractional orders arise inside the series for large k).
Real mulliken_A(const Real& m, const Real& p, const PrecisionContext& ctx);

// Mulliken B_m(p) = Int_{-1}^1 nu^m e^{-p nu} dnu, integer m >= 0.
Real mulliken_B(long m, const Real& p, const PrecisionContext& ctx);

// ---- series strategy ----

struct SeriesOutcome {
  Real value{0};
  long terms_used = 0;
  bool converged = false;
  bool diverged = false;    // terms still growing at truncation
  long critical_ns = 0;     // last sign-alternation index of the outer sum
};

// Bare reduced-G via Mulliken products with F^s coefficients.
SeriesOutcome g_reduced_series(long q, const Real& N2, const Real& N3,
                               const Real& p2, const Real& p3, long Ns,
                               const PrecisionContext& ctx);

// Exponential-splitting series for variants 1-2 (P and Q kinds); variant 3 is
// non-separable and raises an unsupported-method error.
SeriesOutcome aux_g_series(const AuxParams& p, long Ns,
                           const PrecisionContext& ctx);

}  // namespace nsto
