#include "nsto/integrals.hpp"

#include <algorithm>
#include <cstdlib>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>

namespace nsto {

namespace {

Real real_pow(const Real& base, const Real& e) {
  if (e == 0) return Real(1);
  return exp(e * log(base));
}

Real pi_value() { return 4 * atan(Real(1)); }

}  // namespace

void Orbital::validate() const {
  if (!(n > 0)) throw std::domain_error("Orbital: n must be > 0");
  if (l < 0) throw std::domain_error("Orbital: l must be >= 0");
  if (std::abs(m) > l) throw std::domain_error("Orbital: |m| must be <= l");
  if (!(zeta > 0)) throw std::domain_error("Orbital: zeta must be > 0");
}

void TwoElectronSpec::validate() const {
  pair1.o.validate();
  pair1.op.validate();
  pair2.o.validate();
  pair2.op.validate();
  if (!(R > 0)) throw std::domain_error("TwoElectronSpec: R must be > 0");
}

PairParams pair_params(const OrbitalPair& pr, const Real& R) {
  Real zsum = pr.o.zeta + pr.op.zeta;
  PairParams out;
  out.p = R / 2 * zsum;
  out.t = (pr.o.zeta - pr.op.zeta) / zsum;
  out.N = pr.o.n + pr.op.n;
  out.x_scale = zsum;
  return out;
}

Real nsto_norm(const Real& n, const Real& zeta, const PrecisionContext& ctx) {
  if (!(n > 0) || !(zeta > 0))
    throw std::domain_error("nsto_norm: n and zeta must be > 0");
  PrecisionGuard guard(ctx);
  return real_pow(2 * zeta, n + Real(1) / 2) / sqrt(gamma_fn(2 * n + 1, ctx));
}

Real pair_norm(const Real& p, const Real& t, const Real& n, const Real& np,
               const PrecisionContext& ctx) {
  if (!(p > 0)) throw std::domain_error("pair_norm: p must be > 0");
  if (!(abs(t) < 1)) throw std::domain_error("pair_norm: |t| must be < 1");
  PrecisionGuard guard(ctx);
  Real num = real_pow(p * (1 + t), n + Real(1) / 2) *
             real_pow(p * (1 - t), np + Real(1) / 2);
  return num / sqrt(gamma_fn(2 * n + 1, ctx) * gamma_fn(2 * np + 1, ctx));
}

Real radial_potential_f(const Real& N1, long L1, const Real& x,
                        const PrecisionContext& ctx) {
  if (L1 < 0) throw std::domain_error("radial_potential_f: L1 must be >= 0");
  if (!(N1 - L1 > 0))
    throw std::domain_error("radial_potential_f: requires N1 - L1 > 0");
  if (!(x > 0)) throw std::domain_error("radial_potential_f: x must be > 0");
  PrecisionGuard guard(ctx);
  Real a_hi = N1 + L1 + 1;
  Real a_lo = N1 - L1;
  Real bracket = reg_gamma(GammaKind::P, a_hi, x, ctx) +
                 real_pow(x, Real(2 * L1 + 1)) / pochhammer(a_lo, 2 * L1 + 1) *
                     reg_gamma(GammaKind::Q, a_lo, x, ctx);
  return gamma_fn(a_hi, ctx) * real_pow(x, Real(-(L1 + 1))) * bracket;
}

namespace {

// Emits the P/Q auxiliary pair of one expansion monomial.
void emit_pair(std::vector<PlanTerm>& plan, const Real& w, long q,
               const Real& N2P, const Real& N2Q, const Real& N3,
               const Real& N4, long L1, const Real& p1, const Real& p2,
               const Real& p3) {
  AuxParams P;
  P.N1 = 0;
  P.q = q;
  P.N2 = N2P;
  P.N3 = N3;
  P.N4 = N4;
  P.p1 = p1;
  P.p2 = p2;
  P.p3 = p3;
  P.variant = 1;
  P.kind = GammaKind::P;
  plan.push_back({w, P});
  AuxParams Q = P;
  Q.N1 = 2 * L1 + 1;
  Q.N2 = N2Q;
  Q.kind = GammaKind::Q;
  plan.push_back({w, Q});
}

std::string aux_key(const AuxParams& a, unsigned digits) {
  std::ostringstream os;
  os << a.variant << '|' << (a.kind == GammaKind::P ? 'P' : 'Q') << '|'
     << a.N1 << '|' << a.q << '|' << format_scientific(a.N2, digits) << '|'
     << format_scientific(a.N3, digits) << '|'
     << format_scientific(a.N4, digits) << '|'
     << format_scientific(a.p1, digits) << '|'
     << format_scientific(a.p2, digits) << '|'
     << format_scientific(a.p3, digits);
  return os.str();
}

// Shared-kernel signature: terms with equal keys integrate in one pass.
std::string batch_key(const AuxParams& a, unsigned digits) {
  Real f2 = a.N2 - floor(a.N2);
  Real f3 = a.N3 - floor(a.N3);
  std::ostringstream os;
  os << a.variant << '|' << (a.kind == GammaKind::P ? 'P' : 'Q') << '|'
     << a.N1 << '|' << format_scientific(a.N4, digits) << '|'
     << format_scientific(a.p1, digits) << '|'
     << format_scientific(a.p2, digits) << '|'
     << format_scientific(a.p3, digits) << '|'
     << format_scientific(f2, digits) << '|' << format_scientific(f3, digits);
  return os.str();
}

// The plain product-region quadrature loses the corner where the variant-1
// factor degenerates; those terms route through the rotated path inside
// aux_g instead of joining a batch.
bool corner_sensitive(const AuxParams& p) {
  if (p.variant == 3) return false;
  if (p.kind == GammaKind::P && p.p1 == 0) return false;  // identically zero
  Real reg = p.kind == GammaKind::P && p.p1 > 0 ? p.shape() : Real(0);
  Real e = (p.variant == 1 ? p.N2 : p.N3) + reg;
  return e < 0 || (!is_integer(e) && e < 1);
}

void sort_plan(std::vector<PlanTerm>& plan, unsigned digits) {
  std::sort(plan.begin(), plan.end(),
            [digits](const PlanTerm& a, const PlanTerm& b) {
              Real wa = abs(a.weight), wb = abs(b.weight);
              if (wa != wb) return wa > wb;
              return aux_key(a.aux, digits) < aux_key(b.aux, digits);
            });
}

std::vector<PlanTerm> coulomb_plan(const TwoElectronSpec& s,
                                   const PrecisionContext& ctx) {
  PairParams P1 = pair_params(s.pair1, s.R);
  PairParams P2 = pair_params(s.pair2, s.R);
  const Orbital &o1 = s.pair1.o, &o1p = s.pair1.op;
  const Orbital &o2 = s.pair2.o, &o2p = s.pair2.op;
  Real scalar0 = 2 / s.R * pair_norm(Real(1), P1.t, o1.n, o1p.n, ctx) *
                 pair_norm(P2.p, P2.t, o2.n, o2p.n, ctx);
  Real four_pi = 4 * pi_value();

  std::vector<PlanTerm> plan;
  for (int L1 = std::abs(o1.l - o1p.l); L1 <= o1.l + o1p.l; ++L1) {
    Real N4 = P1.N + L1 + 1;
    Real wradial = scalar0 * gamma_fn(N4, ctx) * real_pow(P1.p, Real(-L1));
    for (int L2 = std::abs(o2.l - o2p.l); L2 <= o2.l + o2p.l; ++L2) {
      int Mmax = std::min(L1, L2);
      for (int M = -Mmax; M <= Mmax; ++M) {
        Real G1 = real_gaunt(L1, M, o1.l, o1.m, o1p.l, o1p.m, ctx);
        if (G1 == 0) continue;
        Real G2 = real_gaunt(L2, M, o2.l, o2.m, o2p.l, o2p.m, ctx);
        if (G2 == 0) continue;
        int lam = std::abs(M);
        Real wang = four_pi / (2 * L1 + 1) * G1 * G2 *
                    legendre_norm(L1, lam, ctx) * legendre_norm(L2, lam, ctx);
        Real wL = wradial * wang;
        for (const auto& [idx, c] : g_expansion(L1, L2, lam).coeff) {
          auto [alpha, beta, q] = idx;
          Real w = wL * rat_to_real(c);
          if (w == 0) continue;
          emit_pair(plan, w, q, Real(-(L1 + alpha)), Real(L1 + 1 - alpha),
                    P2.N - beta - 1, N4, L1, P1.p, P2.p, -P2.p);
        }
      }
    }
  }
  sort_plan(plan, ctx.working_digits);
  return plan;
}

std::vector<PlanTerm> hybrid_plan(const TwoElectronSpec& s,
                                  const PrecisionContext& ctx) {
  PairParams P1 = pair_params(s.pair1, s.R);
  PairParams P2 = pair_params(s.pair2, s.R);
  const Orbital &o1 = s.pair1.o, &o1p = s.pair1.op;
  const Orbital &o2 = s.pair2.o, &o2p = s.pair2.op;  // o2 on a, o2p on b
  Real scalar0 = 2 / s.R * pair_norm(Real(1), P1.t, o1.n, o1p.n, ctx) *
                 pair_norm(P2.p, P2.t, o2.n, o2p.n, ctx);
  Real four_pi = 4 * pi_value();
  int lam = std::abs(o2p.m);  // phi selection fixes the final order

  std::vector<PlanTerm> plan;
  for (int L1 = std::abs(o1.l - o1p.l); L1 <= o1.l + o1p.l; ++L1) {
    Real N4 = P1.N + L1 + 1;
    Real wradial = scalar0 * gamma_fn(N4, ctx) * real_pow(P1.p, Real(-L1));
    for (int M1 = -L1; M1 <= L1; ++M1) {
      Real G1 = real_gaunt(L1, M1, o1.l, o1.m, o1p.l, o1p.m, ctx);
      if (G1 == 0) continue;
      for (int L2 = std::abs(L1 - o2.l); L2 <= L1 + o2.l; ++L2) {
        // recoupling of the two center-a factors; the phi integral then
        // pins the surviving component to m2'
        Real G2 = real_gaunt(L2, o2p.m, L1, M1, o2.l, o2.m, ctx);
        if (G2 == 0) continue;
        Real wang = four_pi / (2 * L1 + 1) * G1 * G2 *
                    legendre_norm(L2, lam, ctx) *
                    legendre_norm(o2p.l, lam, ctx);
        Real wL = wradial * wang;
        for (const auto& [idx, c] : g_expansion(L2, o2p.l, lam).coeff) {
          auto [alpha, beta, q] = idx;
          Real w = wL * rat_to_real(c);
          if (w == 0) continue;
          emit_pair(plan, w, q, o2.n - alpha - L1 - 1, o2.n + L1 - alpha,
                    o2p.n - beta, N4, L1, P1.p, P2.p, P2.p * P2.t);
        }
      }
    }
  }
  sort_plan(plan, ctx.working_digits);
  return plan;
}

}  // namespace

std::vector<PlanTerm> integral_plan(const TwoElectronSpec& spec,
                                    const PrecisionContext& ctx) {
  spec.validate();
  PrecisionGuard guard(ctx);
  return spec.kind == IntegralKind::coulomb ? coulomb_plan(spec, ctx)
                                            : hybrid_plan(spec, ctx);
}

QuadratureOutcome evaluate_plan(const std::vector<PlanTerm>& plan,
                                const MethodChoice& method,
                                const PrecisionContext& ctx) {
  PrecisionGuard guard(ctx);
  QuadratureOutcome total;
  total.converged = true;
  auto absorb = [&total](const Real& w, const QuadratureOutcome& r) {
    total.value += w * r.value;
    total.error_estimate += abs(w) * r.error_estimate;
    total.evaluations += r.evaluations;
    total.subdivisions += r.subdivisions;
    total.converged = total.converged && r.converged;
  };

  const unsigned digits = ctx.working_digits;
  std::map<std::string, QuadratureOutcome> cache;
  auto eval_single = [&](const PlanTerm& t) {
    std::string key = aux_key(t.aux, digits);
    auto it = cache.find(key);
    if (it == cache.end())
      it = cache.emplace(key, aux_g(t.aux, method, ctx)).first;
    absorb(t.weight, it->second);
  };

  if (method.strategy != Strategy::adaptive) {
    for (const auto& t : plan) eval_single(t);
    return total;
  }

  // Batch compatible terms into shared quadrature passes, keeping the
  // plan's deterministic order for batch formation and reduction.
  struct Batch {
    AuxParams proto;
    std::vector<GroupTerm> terms;
  };
  std::vector<Batch> batches;
  std::map<std::string, size_t> index;
  for (const auto& t : plan) {
    if (corner_sensitive(t.aux)) {
      eval_single(t);
      continue;
    }
    std::string key = batch_key(t.aux, digits);
    auto it = index.find(key);
    if (it == index.end()) {
      it = index.emplace(key, batches.size()).first;
      batches.push_back({t.aux, {}});
    }
    // N1, N4, p1 sit in the batch key, so the prototype prefactor that
    // aux_g_sum applies is the right one for every member.
    batches[it->second].terms.push_back(
        {t.weight, t.aux.q, t.aux.N2, t.aux.N3});
  }
  for (const auto& b : batches) {
    QuadratureOutcome r = aux_g_sum(b.proto, b.terms, ctx);
    absorb(Real(1), r);
  }
  return total;
}

QuadratureOutcome coulomb_integral(const TwoElectronSpec& spec,
                                   const MethodChoice& method,
                                   const PrecisionContext& ctx) {
  if (spec.kind != IntegralKind::coulomb)
    throw std::domain_error("coulomb_integral: spec.kind is not coulomb");
  return evaluate_plan(integral_plan(spec, ctx), method, ctx);
}

QuadratureOutcome hybrid_integral(const TwoElectronSpec& spec,
                                  const MethodChoice& method,
                                  const PrecisionContext& ctx) {
  if (spec.kind != IntegralKind::hybrid)
    throw std::domain_error("hybrid_integral: spec.kind is not hybrid");
  return evaluate_plan(integral_plan(spec, ctx), method, ctx);
}

}  // namespace nsto
