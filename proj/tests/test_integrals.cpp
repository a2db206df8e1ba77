#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <stdexcept>

#include "nsto/integrals.hpp"
#include "nsto/quadrature.hpp"

using namespace nsto;

namespace {
const PrecisionContext ctx = PrecisionContext::make(50, 25, 35);
const PrecisionContext lite = PrecisionContext::make(30, 15, 30);

Real rel_err(const Real& got, const Real& want) {
  return abs(got - want) / max(Real(abs(want)), Real(1));
}

Orbital orb(const char* n, int l, int m, const char* zeta) {
  return {Real(n), l, m, Real(zeta)};
}

Real rpow(const Real& b, const Real& e) { return exp(e * log(b)); }

// Potential of the spherically symmetric pair density
// C r^{N-2} e^{-a r} / (4 pi) with C the product of the two radial norms.
Real s_pair_potential(const OrbitalPair& pr, const Real& r,
                      const PrecisionContext& c) {
  Real a = pr.o.zeta + pr.op.zeta;
  Real N = pr.o.n + pr.op.n;
  Real C = nsto_norm(pr.o.n, pr.o.zeta, c) * nsto_norm(pr.op.n, pr.op.zeta, c);
  return C * rpow(a, -N) * radial_potential_f(N, 0, a * r, c);
}

// Direct ellipsoidal-coordinate quadrature of an l = 0 two-electron
// integral: electron 1 contributes its one-center potential, electron 2 is
// integrated over the two-center volume element.  Independent of the
// plan assembly; only shares the generic quadrature engine.
Real brute_force(const TwoElectronSpec& spec, const PrecisionContext& c) {
  Real half_R = spec.R / 2;
  const OrbitalPair& p2 = spec.pair2;
  Real C2 = nsto_norm(p2.o.n, p2.o.zeta, c) * nsto_norm(p2.op.n, p2.op.zeta, c);
  Fn2 f = [&](const Real& mu, const Real& nu) -> Real {
    Real ra = half_R * (mu + nu);
    Real rb = half_R * (mu - nu);
    Real rho2;  // pair-2 density without the 1/4pi angular factor
    if (spec.kind == IntegralKind::coulomb)
      rho2 = rpow(rb, p2.o.n + p2.op.n - 2) *
             exp(-(p2.o.zeta + p2.op.zeta) * rb);
    else
      rho2 = rpow(ra, p2.o.n - 1) * rpow(rb, p2.op.n - 1) *
             exp(-p2.o.zeta * ra - p2.op.zeta * rb);
    return (mu * mu - nu * nu) * rho2 * s_pair_potential(spec.pair1, ra, c);
  };
  Region2D region;
  Real rate = half_R * (p2.o.zeta + p2.op.zeta);
  if (rate < 1) region.mu_scale = 1 / rate;
  auto out = adaptive_integrate_2d(f, region, c, c.tol(8));
  REQUIRE(out.converged);
  return Real(half_R * half_R * half_R * (C2 / 2) * out.value);
}
}  // namespace

TEST_CASE("orbital and spec validation") {
  PrecisionGuard g(ctx.working_digits);
  Orbital ok = orb("1.5", 1, -1, "2.5");
  CHECK_NOTHROW(ok.validate());
  Orbital bad = ok;
  bad.n = 0;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
  bad = ok;
  bad.l = -1;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
  bad = ok;
  bad.m = 2;  // |m| > l
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
  bad = ok;
  bad.zeta = 0;
  CHECK_THROWS_AS(bad.validate(), std::domain_error);
  // n > l is deliberately not required
  CHECK_NOTHROW(orb("0.4", 2, 0, "1").validate());

  TwoElectronSpec spec;
  spec.R = 0;
  CHECK_THROWS_AS(spec.validate(), std::domain_error);
}

TEST_CASE("pair parameters") {
  PrecisionGuard g(ctx.working_digits);
  OrbitalPair pr{orb("2", 0, 0, "3"), orb("1.5", 0, 0, "1")};
  PairParams pp = pair_params(pr, Real("0.5"));
  CHECK(rel_err(pp.p, Real(1)) <= ctx.tol(5));
  CHECK(rel_err(pp.t, Real("0.5")) <= ctx.tol(5));
  CHECK(rel_err(pp.N, Real("3.5")) <= ctx.tol(5));
  CHECK(rel_err(pp.x_scale, Real(4)) <= ctx.tol(5));
}

TEST_CASE("radial normalization") {
  PrecisionGuard g(ctx.working_digits);
  // n = 1, zeta = 1/2: (2 zeta)^{3/2} / sqrt(Gamma(3)) = 1/sqrt(2)
  CHECK(rel_err(nsto_norm(Real(1), Real("0.5"), ctx),
                Real(1) / sqrt(Real(2))) <= ctx.tol(5));
  // quadrature check of int_0^inf (N r^{n-1} e^{-zeta r})^2 r^2 dr = 1
  Real n("1.1"), zeta("5.2");
  Real norm = nsto_norm(n, zeta, ctx);
  Fn1 f = [&](const Real& r) -> Real {
    return rpow(r, 2 * n) * exp(-2 * zeta * r);
  };
  auto out = adaptive_integrate_1d(f, Real("1e-40"), Real(20), ctx,
                                   ctx.tol(10));
  REQUIRE(out.converged);
  CHECK(rel_err(norm * norm * out.value, Real(1)) <= ctx.tol(12));
}

TEST_CASE("pair normalization") {
  PrecisionGuard g(ctx.working_digits);
  // symmetric pair: collapses to p^{N+1} / sqrt(Gamma(2n+1) Gamma(2n'+1))
  Real p(3), n(2), np("1.5");
  Real want = rpow(p, n + np + 1) /
              sqrt(gamma_fn(2 * n + 1, ctx) * gamma_fn(2 * np + 1, ctx));
  CHECK(rel_err(pair_norm(p, Real(0), n, np, ctx), want) <= ctx.tol(5));

  // relation to the one-orbital norms: p(1+t) = R zeta, p(1-t) = R zeta'
  OrbitalPair pr{orb("2.3", 0, 0, "3.1"), orb("1.4", 0, 0, "1.2")};
  Real R("0.7");
  PairParams pp = pair_params(pr, R);
  Real lhs = pair_norm(pp.p, pp.t, pr.o.n, pr.op.n, ctx);
  Real rhs = rpow(R / 2, pp.N + 1) * nsto_norm(pr.o.n, pr.o.zeta, ctx) *
             nsto_norm(pr.op.n, pr.op.zeta, ctx);
  CHECK(rel_err(lhs, rhs) <= ctx.tol(5));

  CHECK_THROWS_AS(pair_norm(p, Real(1), n, np, ctx), std::domain_error);
  CHECK_THROWS_AS(pair_norm(Real(0), Real(0), n, np, ctx),
                  std::domain_error);
}

TEST_CASE("radial potential factor") {
  PrecisionGuard g(ctx.working_digits);
  // L1 = 0, N1 = 1: f = (1 - e^{-x}(1+x))/x + e^{-x}
  Real x("2.5");
  Real want = (1 - exp(-x) * (1 + x)) / x + exp(-x);
  CHECK(rel_err(radial_potential_f(Real(1), 0, x, ctx), want) <= ctx.tol(10));

  // multipole tail: x -> inf leaves Gamma(N1+L1+1) x^{-(L1+1)}
  Real N1("2.4");
  Real big(200);
  CHECK(rel_err(radial_potential_f(N1, 1, big, ctx),
                gamma_fn(N1 + 2, ctx) / (big * big)) <= ctx.tol(20));

  // quadrature oracle at moderate x:
  // f = x^{-(L1+1)} int_0^x s^{N1+L1} e^{-s} ds
  //     + x^{L1} int_x^inf s^{N1-L1-1} e^{-s} ds
  long L1 = 1;
  Real xm(3);
  Fn1 lo = [&](const Real& s) -> Real { return rpow(s, N1 + L1) * exp(-s); };
  Fn1 hi = [&](const Real& s) -> Real {
    return rpow(s, N1 - L1 - 1) * exp(-s);
  };
  auto olo = adaptive_integrate_1d(lo, Real("1e-40"), xm, ctx, ctx.tol(10));
  auto ohi = adaptive_integrate_1d(hi, xm, Real(150), ctx, ctx.tol(10));
  REQUIRE(olo.converged);
  REQUIRE(ohi.converged);
  Real want2 = olo.value / (xm * xm) + xm * ohi.value;
  CHECK(rel_err(radial_potential_f(N1, L1, xm, ctx), want2) <= ctx.tol(12));

  CHECK_THROWS_AS(radial_potential_f(Real(1), 2, x, ctx), std::domain_error);
  CHECK_THROWS_AS(radial_potential_f(Real(1), 0, Real(0), ctx),
                  std::domain_error);
}

TEST_CASE("plan structure") {
  PrecisionGuard g(ctx.working_digits);
  TwoElectronSpec spec;
  spec.pair1 = {orb("2", 1, 1, "4.0"), orb("2", 1, 1, "3.1")};
  spec.pair2 = {orb("2", 1, 1, "3.1"), orb("2", 1, 0, "4.1")};
  spec.R = Real("2.5");
  auto plan = integral_plan(spec, ctx);
  REQUIRE(!plan.empty());
  for (size_t i = 1; i < plan.size(); ++i)
    CHECK(abs(plan[i].aux.p2 - plan[0].aux.p2) <= ctx.tol(5) * plan[0].aux.p2);
  for (size_t i = 1; i < plan.size(); ++i)
    CHECK(abs(plan[i].weight) <= abs(plan[i - 1].weight));
}

TEST_CASE("frozen Coulomb references, integer quantum numbers") {
  PrecisionGuard g(ctx.working_digits);
  TwoElectronSpec spec;
  spec.pair1 = {orb("1", 0, 0, "5.2"), orb("1", 0, 0, "5.2")};
  spec.pair2 = {orb("2", 0, 0, "4.1"), orb("2", 0, 0, "4.1")};
  spec.R = Real("0.2");
  auto r = coulomb_integral(spec, {Strategy::adaptive}, ctx);
  CHECK(r.converged);
  CHECK(rel_err(r.value,
                Real("1.8228925537506626809706249994721810")) <= pow10(-21));

  // near-degenerate exponents at short range
  spec.pair1 = {orb("1", 0, 0, "0.99"), orb("1", 0, 0, "0.99")};
  spec.pair2 = {orb("1", 0, 0, "1.01"), orb("1", 0, 0, "1.01")};
  spec.R = Real("0.01");
  r = coulomb_integral(spec, {Strategy::adaptive}, ctx);
  CHECK(r.converged);
  CHECK(rel_err(r.value,
                Real("6.2491667058300881498345518383512994e-1")) <=
        pow10(-21));
}

TEST_CASE("frozen hybrid references") {
  PrecisionGuard g(ctx.working_digits);
  TwoElectronSpec spec;
  spec.kind = IntegralKind::hybrid;
  spec.pair1 = {orb("1", 0, 0, "5.2"), orb("1", 0, 0, "5.2")};
  spec.pair2 = {orb("1", 0, 0, "5.2"), orb("2", 0, 0, "4.1")};
  spec.R = Real("0.2");
  auto r = hybrid_integral(spec, {Strategy::adaptive}, ctx);
  CHECK(r.converged);
  CHECK(rel_err(r.value,
                Real("1.8228332730080038254787867310949757")) <= pow10(-21));

  spec.pair1 = {orb("2", 0, 0, "1.0"), orb("1", 0, 0, "1.5")};
  spec.pair2 = {orb("1", 0, 0, "1.0"), orb("2", 0, 0, "1.5")};
  spec.R = Real("0.5");
  r = hybrid_integral(spec, {Strategy::adaptive}, ctx);
  CHECK(r.converged);
  CHECK(rel_err(r.value,
                Real("3.5283059069426014558521523216762934e-1")) <=
        pow10(-21));
}

TEST_CASE("frozen references, non-integer quantum numbers") {
  PrecisionGuard g(ctx.working_digits);
  TwoElectronSpec spec;
  spec.pair1 = {orb("1.1", 0, 0, "5.2"), orb("1.1", 0, 0, "5.2")};
  spec.pair2 = {orb("2.1", 0, 0, "4.1"), orb("2.1", 0, 0, "4.1")};
  spec.R = Real("2.0");
  auto r = coulomb_integral(spec, {Strategy::adaptive}, ctx);
  CHECK(r.converged);
  CHECK(rel_err(r.value,
                Real("4.9996044305092697451247068e-1")) <= pow10(-21));

  spec.kind = IntegralKind::hybrid;
  spec.pair1 = {orb("1.1", 0, 0, "3.3"), orb("1.1", 0, 0, "7.5")};
  spec.pair2 = {orb("2.1", 0, 0, "5.2"), orb("2.1", 0, 0, "4.1")};
  r = hybrid_integral(spec, {Strategy::adaptive}, ctx);
  CHECK(r.converged);
  CHECK(rel_err(r.value,
                Real("3.3457065033295204901678182e-2")) <= pow10(-21));
}

TEST_CASE("exchange symmetry of the Coulomb integral") {
  PrecisionGuard g(lite.working_digits);
  TwoElectronSpec spec;
  spec.pair1 = {orb("2.3", 1, 1, "3.1"), orb("1.4", 0, 0, "4.1")};
  spec.pair2 = {orb("2", 1, 1, "2.5"), orb("3", 2, 0, "1.8")};
  spec.R = Real("1.5");
  auto r1 = coulomb_integral(spec, {Strategy::adaptive}, lite);
  std::swap(spec.pair1, spec.pair2);
  auto r2 = coulomb_integral(spec, {Strategy::adaptive}, lite);
  CHECK(r1.converged);
  CHECK(r2.converged);
  CHECK(rel_err(r1.value, r2.value) <= lite.tol(10));
}

TEST_CASE("large separation leaves the monopole term") {
  PrecisionGuard g(ctx.working_digits);
  TwoElectronSpec spec;
  spec.pair1 = {orb("1", 0, 0, "5.2"), orb("1", 0, 0, "5.2")};
  spec.pair2 = {orb("2", 0, 0, "4.1"), orb("2", 0, 0, "4.1")};
  spec.R = 100;
  auto r = coulomb_integral(spec, {Strategy::adaptive}, ctx);
  CHECK(r.converged);
  CHECK(rel_err(r.value, Real("0.01")) <= pow10(-20));
}

TEST_CASE("brute-force quadrature oracle") {
  PrecisionGuard g(lite.working_digits);
  TwoElectronSpec spec;
  spec.pair1 = {orb("1", 0, 0, "1.3"), orb("2", 0, 0, "0.9")};
  spec.pair2 = {orb("2", 0, 0, "1.1"), orb("1.5", 0, 0, "1.7")};
  spec.R = Real("1.8");
  auto r = coulomb_integral(spec, {Strategy::adaptive}, lite);
  CHECK(r.converged);
  CHECK(rel_err(r.value, brute_force(spec, lite)) <= pow10(-15));

  spec.kind = IntegralKind::hybrid;
  spec.pair1 = {orb("1.2", 0, 0, "2.1"), orb("1", 0, 0, "1.4")};
  spec.pair2 = {orb("1", 0, 0, "1.6"), orb("2", 0, 0, "1.1")};
  auto h = hybrid_integral(spec, {Strategy::adaptive}, lite);
  CHECK(h.converged);
  CHECK(rel_err(h.value, brute_force(spec, lite)) <= pow10(-15));
}

TEST_CASE("continuity in the principal quantum number") {
  PrecisionGuard g(lite.working_digits);
  TwoElectronSpec spec;
  spec.pair1 = {orb("1", 0, 0, "1.3"), orb("2", 0, 0, "0.9")};
  spec.pair2 = {orb("2", 0, 0, "1.1"), orb("2", 0, 0, "1.7")};
  spec.R = Real("1.8");
  Real base = coulomb_integral(spec, {Strategy::adaptive}, lite).value;
  spec.pair2.o.n = Real(2) + Real("1e-8");
  Real bumped = coulomb_integral(spec, {Strategy::adaptive}, lite).value;
  CHECK(rel_err(bumped, base) <= pow10(-6));
}

TEST_CASE("strategies agree on a full integral") {
  PrecisionGuard g(lite.working_digits);
  TwoElectronSpec spec;
  spec.pair1 = {orb("1", 0, 0, "5.2"), orb("1", 0, 0, "5.2")};
  spec.pair2 = {orb("2", 0, 0, "4.1"), orb("2", 0, 0, "4.1")};
  spec.R = Real("0.2");
  Real va = coulomb_integral(spec, {Strategy::adaptive}, lite).value;
  Real vr = coulomb_integral(spec, {Strategy::recurrence}, lite).value;
  CHECK(rel_err(va, vr) <= lite.tol(10));
}

TEST_CASE("kind mismatch is rejected") {
  PrecisionGuard g(lite.working_digits);
  TwoElectronSpec spec;
  spec.pair1 = {orb("1", 0, 0, "1"), orb("1", 0, 0, "1")};
  spec.pair2 = spec.pair1;
  CHECK_THROWS_AS(hybrid_integral(spec, {Strategy::adaptive}, lite),
                  std::domain_error);
  spec.kind = IntegralKind::hybrid;
  CHECK_THROWS_AS(coulomb_integral(spec, {Strategy::adaptive}, lite),
                  std::domain_error);
}
