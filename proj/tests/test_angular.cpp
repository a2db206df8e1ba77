#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "nsto/angular.hpp"
#include "nsto/quadrature.hpp"

using namespace nsto;

namespace {
const PrecisionContext ctx = PrecisionContext::make(50, 25, 35);

void check_rel(const Real& got, const Real& want, int tol_exp) {
  PrecisionGuard g(ctx.working_digits);
  Real denom = abs(want) > 0 ? abs(want) : Real(1);
  CHECK(Real(abs(got - want) / denom) <= pow10(tol_exp));
}
}  // namespace

TEST_CASE("assoc_legendre closed forms, positive convention") {
  PrecisionGuard g(ctx.working_digits);
  for (const char* xs : {"-0.9", "0.0", "0.5", "1.0"}) {
    Real x(xs);
    CHECK(assoc_legendre(0, 0, x, ctx) == 1);
    CHECK(assoc_legendre(1, 0, x, ctx) == x);
    // P_21 = 3 x sqrt(1-x^2), no Condon-Shortley sign
    check_rel(assoc_legendre(2, 1, x, ctx), 3 * x * sqrt(Real(1 - x * x)),
              -46);
    // P_22 = 3(1-x^2)
    check_rel(assoc_legendre(2, 2, x, ctx), 3 * (1 - x * x), -46);
  }
  CHECK(assoc_legendre(1, 0, Real("0.5"), ctx) == Real("0.5"));
  CHECK_THROWS_AS(assoc_legendre(2, 1, Real(2), ctx), std::domain_error);
  CHECK_THROWS_AS(assoc_legendre(1, 2, Real(0), ctx), std::domain_error);
}

TEST_CASE("legendre_norm orthonormalizes the theta factor") {
  PrecisionGuard g(ctx.working_digits);
  for (int l = 0; l <= 4; ++l)
    for (int la = 0; la <= l; ++la) {
      Real k = legendre_norm(l, la, ctx);
      auto out = adaptive_integrate_1d(
          [&](const Real& x) {
            Real p = assoc_legendre(l, la, x, ctx);
            return Real(k * k * p * p);
          },
          Real(-1), Real(1), ctx, pow10(-30));
      CHECK(out.converged);
      check_rel(out.value, Real(1), -28);
    }
}

TEST_CASE("gaunt_coeff selection rules and quadrature oracle") {
  PrecisionGuard g(ctx.working_digits);
  // triangle rule violation
  CHECK(gaunt_coeff(3, 0, 1, 0, 1, 0, ctx) == 0);
  // parity violation: l1 + l2 + L odd
  CHECK(gaunt_coeff(1, 0, 1, 0, 1, 0, ctx) == 0);
  // l1=l2=0 normalization case
  check_rel(gaunt_coeff(0, 0, 0, 0, 0, 0, ctx), Real(1), -46);

  // quadrature oracle for a set of nontrivial cases
  struct Case {
    int L, M, l1, m1, l2, m2;
  };
  for (const Case& c : {Case{2, 0, 1, 0, 1, 0}, Case{2, 2, 1, 1, 1, 1},
                        Case{4, 1, 3, 1, 3, 2}, Case{2, 1, 2, 1, 2, 2},
                        Case{3, 1, 2, 1, 1, 0}}) {
    int la1 = std::abs(c.m1), la2 = std::abs(c.m2), La = std::abs(c.M);
    Real want = sqrt(Real(2) / (2 * c.L + 1)) *
                adaptive_integrate_1d(
                    [&](const Real& x) {
                      return Real(legendre_norm(c.l1, la1, ctx) *
                                  assoc_legendre(c.l1, la1, x, ctx) *
                                  legendre_norm(c.l2, la2, ctx) *
                                  assoc_legendre(c.l2, la2, x, ctx) *
                                  legendre_norm(c.L, La, ctx) *
                                  assoc_legendre(c.L, La, x, ctx));
                    },
                    Real(-1), Real(1), ctx, pow10(-30))
                    .value;
    check_rel(gaunt_coeff(c.L, c.M, c.l1, c.m1, c.l2, c.m2, ctx), want, -27);
  }

  // exact hand value: C for (2,0;1,0;1,0) is 2/5
  check_rel(gaunt_coeff(2, 0, 1, 0, 1, 0, ctx), Real(2) / 5, -46);
}

TEST_CASE("gaunt_coeff exchange symmetry") {
  PrecisionGuard g(ctx.working_digits);
  std::mt19937_64 rng(99);
  for (int i = 0; i < 50; ++i) {
    int l1 = (int)(rng() % 4), l2 = (int)(rng() % 4);
    int m1 = l1 ? (int)(rng() % (2 * l1 + 1)) - l1 : 0;
    int m2 = l2 ? (int)(rng() % (2 * l2 + 1)) - l2 : 0;
    int L = (int)(rng() % 7), M = L ? (int)(rng() % (2 * L + 1)) - L : 0;
    CHECK(gaunt_coeff(L, M, l1, m1, l2, m2, ctx) ==
          gaunt_coeff(L, M, l2, m2, l1, m1, ctx));
  }
}

TEST_CASE("a_coeff closed forms") {
  PrecisionGuard g(ctx.working_digits);
  CHECK(a_coeff(0, 0, 0, ctx) == 1);
  for (int m : {1, 2, 3}) {
    CHECK(a_coeff(0, m, m, ctx) == 1);
    CHECK(a_coeff(0, -m, -m, ctx) == 1);
  }
  // selection rule: M outside {|m1-m2|, |m1+m2|}
  CHECK(a_coeff(1, 1, 1, ctx) == 0);
  CHECK(a_coeff(3, 1, 1, ctx) == 0);
  // sine/cosine parity: one sine factor integrates to zero
  CHECK(a_coeff(2, 1, -1, ctx) == 0);
  // hand values
  check_rel(a_coeff(2, 1, 1, ctx), 1 / sqrt(Real(2)), -46);
  check_rel(a_coeff(-2, 1, -1, ctx), 1 / sqrt(Real(2)), -46);
  check_rel(a_coeff(0, 2, -2, ctx), Real(0), -46);
}

TEST_CASE("real_gaunt against direct composition") {
  PrecisionGuard g(ctx.working_digits);
  const Real pi = boost::math::constants::pi<Real>();
  check_rel(real_gaunt(0, 0, 0, 0, 0, 0, ctx), 1 / sqrt(4 * pi), -46);
  check_rel(real_gaunt(2, 0, 1, 0, 1, 0, ctx),
            sqrt(Real(5) / (4 * pi)) * (Real(2) / 5), -46);
}

TEST_CASE("g_expansion hand cases") {
  const GExpansion& g00 = g_expansion(0, 0, 0);
  REQUIRE(g00.coeff.size() == 1);
  CHECK(g00.coeff.at({0, 0, 0}) == 1);

  // P1(cos theta_a) = (1+mu nu)/(mu+nu)
  const GExpansion& g10 = g_expansion(1, 0, 0);
  CHECK(g10.coeff.at({1, 0, 0}) == 1);
  CHECK(g10.coeff.at({1, 0, 1}) == 1);
  CHECK(g10.coeff.size() == 2);

  // P1(cos theta_b) = (1-mu nu)/(mu-nu)
  const GExpansion& g01 = g_expansion(0, 1, 0);
  CHECK(g01.coeff.at({0, 1, 0}) == 1);
  CHECK(g01.coeff.at({0, 1, 1}) == -1);
  CHECK(g01.coeff.size() == 2);

  CHECK_THROWS_AS(g_expansion(1, 0, 1), std::domain_error);
}

TEST_CASE("g_expansion reconstructs the Legendre product") {
  PrecisionGuard g(ctx.working_digits);
  std::mt19937_64 rng(31337);
  std::uniform_real_distribution<double> dmu(1.0, 5.0), dnu(-1.0, 1.0);
  std::vector<std::pair<Real, Real>> pts;
  for (int i = 0; i < 200; ++i) pts.emplace_back(Real(dmu(rng)), Real(dnu(rng)));
  for (int L1 = 0; L1 <= 4; ++L1)
    for (int L2 = 0; L2 <= 4; ++L2)
      for (int la = 0; la <= std::min(L1, L2); ++la) {
        const GExpansion& ge = g_expansion(L1, L2, la);
        for (auto& [mu, nu] : pts) {
          Real ca = (1 + mu * nu) / (mu + nu);
          Real cb = (1 - mu * nu) / (mu - nu);
          Real want = assoc_legendre(L1, la, ca, ctx) *
                      assoc_legendre(L2, la, cb, ctx);
          Real got = g_reconstruct(ge, mu, nu, ctx);
          // coefficient growth in the cleared polynomials costs ~10 digits
          Real denom = std::max(Real(abs(want)), Real(1e-20));
          CHECK(Real(abs(got - want) / denom) <= pow10(-36));
        }
      }
}
