#include "nsto/angular.hpp"

#include <boost/math/constants/constants.hpp>

#include <algorithm>
#include <stdexcept>
#include <vector>

namespace nsto {

Real rat_to_real(const Rat& r) {
  Real n(numerator(r).str());
  Real d(denominator(r).str());
  return n / d;
}

namespace {

Real to_real(const Rat& r) { return rat_to_real(r); }

// ---- exact univariate polynomials over cpp_rational, coeff[k] ~ x^k ----
using Poly = std::vector<Rat>;

Poly poly_mul(const Poly& a, const Poly& b) {
  Poly r(a.size() + b.size() - 1, Rat(0));
  for (size_t i = 0; i < a.size(); ++i)
    for (size_t j = 0; j < b.size(); ++j) r[i + j] += a[i] * b[j];
  return r;
}

// Legendre polynomial P_l, exact coefficients, memoized.
const Poly& legendre_poly(int l) {
  static std::vector<Poly> cache = {{Rat(1)}, {Rat(0), Rat(1)}};
  while ((int)cache.size() <= l) {
    int k = (int)cache.size();  // build P_k from P_{k-1}, P_{k-2}
    const Poly& pm1 = cache[k - 1];
    const Poly& pm2 = cache[k - 2];
    Poly p(k + 1, Rat(0));
    for (size_t i = 0; i < pm1.size(); ++i)
      p[i + 1] += Rat(2 * k - 1) * pm1[i] / k;
    for (size_t i = 0; i < pm2.size(); ++i) p[i] -= Rat(k - 1) * pm2[i] / k;
    cache.push_back(std::move(p));
  }
  return cache[l];
}

// d^m/dx^m P_l — the polynomial part Q_{lm} of P_lm.
Poly legendre_deriv(int l, int m) {
  Poly p = legendre_poly(l);
  for (int d = 0; d < m; ++d) {
    if (p.size() <= 1) return {Rat(0)};
    Poly q(p.size() - 1);
    for (size_t i = 1; i < p.size(); ++i) q[i - 1] = Rat((long)i) * p[i];
    p = std::move(q);
  }
  return p;
}

Real poly_eval(const Poly& p, const Real& x) {
  Real r = 0;
  for (size_t i = p.size(); i-- > 0;) r = r * x + to_real(p[i]);
  return r;
}

// exact integral over [-1,1]
Rat poly_int11(const Poly& p) {
  Rat r = 0;
  for (size_t i = 0; i < p.size(); i += 2) r += 2 * p[i] / Rat((long)i + 1);
  return r;
}

Rat factorial_rat(int n) {
  Rat r = 1;
  for (int i = 2; i <= n; ++i) r *= i;
  return r;
}

// ---- exact bivariate polynomials, key (deg_mu, deg_nu) ----
using Poly2 = std::map<std::pair<int, int>, Rat>;

Poly2 p2_mul(const Poly2& a, const Poly2& b) {
  Poly2 r;
  for (auto& [ka, va] : a)
    for (auto& [kb, vb] : b) {
      Rat& c = r[{ka.first + kb.first, ka.second + kb.second}];
      c += va * vb;
    }
  return r;
}

Poly2 p2_pow(const Poly2& a, int n) {
  Poly2 r{{{0, 0}, Rat(1)}};
  for (int i = 0; i < n; ++i) r = p2_mul(r, a);
  return r;
}

void p2_prune(Poly2& a) {
  for (auto it = a.begin(); it != a.end();)
    it = (it->second == 0) ? a.erase(it) : std::next(it);
}

const Poly2 kMuPlusNu{{{1, 0}, Rat(1)}, {{0, 1}, Rat(1)}};
const Poly2 kMuMinusNu{{{1, 0}, Rat(1)}, {{0, 1}, Rat(-1)}};
const Poly2 kOnePlusMuNu{{{0, 0}, Rat(1)}, {{1, 1}, Rat(1)}};
const Poly2 kOneMinusMuNu{{{0, 0}, Rat(1)}, {{1, 1}, Rat(-1)}};
// (mu^2 - 1)(1 - nu^2)
const Poly2 kPairing{{{2, 0}, Rat(1)},
                     {{2, 2}, Rat(-1)},
                     {{0, 0}, Rat(-1)},
                     {{0, 2}, Rat(1)}};

// (mu+nu)^{L-lambda} Q_{L,lambda}((1+mu nu)/(mu+nu)), and likewise for the
// b center — the denominator-cleared polynomial part of P_{L,lambda}(cos).
Poly2 cleared_legendre(int L, int lambda, bool center_a) {
  Poly q = legendre_deriv(L, lambda);
  const Poly2& num = center_a ? kOnePlusMuNu : kOneMinusMuNu;
  const Poly2& den = center_a ? kMuPlusNu : kMuMinusNu;
  Poly2 r;
  int d = L - lambda;  // degree of q
  for (int k = 0; k <= d; ++k) {
    if ((int)q.size() <= k || q[k] == 0) continue;
    Poly2 term = p2_mul(p2_pow(num, k), p2_pow(den, d - k));
    for (auto& [key, v] : term) {
      Rat& c = r[key];
      c += q[k] * v;
    }
  }
  p2_prune(r);
  return r;
}

GExpansion build_g_expansion(int L1, int L2, int lambda) {
  if (lambda < 0 || lambda > std::min(L1, L2))
    throw std::domain_error("g_expansion: requires 0 <= lambda <= min(L1,L2)");

  // LHS * (mu+nu)^{L1} (mu-nu)^{L2} as an exact polynomial
  Poly2 lhs = p2_mul(cleared_legendre(L1, lambda, true),
                     cleared_legendre(L2, lambda, false));
  lhs = p2_mul(lhs, p2_pow(kPairing, lambda));
  p2_prune(lhs);

  // unknowns: (alpha, beta, q) over the coupled summation ranges
  struct Key {
    int alpha, beta, q;
  };
  std::vector<Key> unknowns;
  std::vector<Poly2> basis;
  for (int alpha = -lambda; alpha <= L1; ++alpha)
    for (int beta = lambda; beta <= L2; ++beta)
      for (int q = 0; q <= alpha + beta; ++q) {
        unknowns.push_back({alpha, beta, q});
        Poly2 b = p2_mul(p2_pow(kMuPlusNu, L1 - alpha),
                         p2_pow(kMuMinusNu, L2 - beta));
        b = p2_mul(b, Poly2{{{q, q}, Rat(1)}});
        basis.push_back(std::move(b));
      }

  // monomial row index
  std::map<std::pair<int, int>, size_t> rows;
  auto row_of = [&](const std::pair<int, int>& mono) {
    auto it = rows.find(mono);
    if (it == rows.end()) it = rows.emplace(mono, rows.size()).first;
    return it->second;
  };
  for (auto& [mono, c] : lhs) row_of(mono);
  for (auto& b : basis)
    for (auto& [mono, c] : b) row_of(mono);

  size_t nrows = rows.size(), ncols = unknowns.size();
  std::vector<std::vector<Rat>> A(nrows, std::vector<Rat>(ncols + 1, Rat(0)));
  for (size_t j = 0; j < ncols; ++j)
    for (auto& [mono, c] : basis[j]) A[rows[mono]][j] = c;
  for (auto& [mono, c] : lhs) A[rows[mono]][ncols] = c;

  // deterministic Gaussian elimination; free variables are left at zero
  std::vector<long> pivot_col_of_row(nrows, -1);
  size_t r = 0;
  for (size_t c = 0; c < ncols && r < nrows; ++c) {
    size_t p = r;
    while (p < nrows && A[p][c] == 0) ++p;
    if (p == nrows) continue;
    std::swap(A[p], A[r]);
    for (size_t i = 0; i < nrows; ++i) {
      if (i == r || A[i][c] == 0) continue;
      Rat f = A[i][c] / A[r][c];
      for (size_t j = c; j <= ncols; ++j) A[i][j] -= f * A[r][j];
    }
    pivot_col_of_row[r] = (long)c;
    ++r;
  }
  for (size_t i = r; i < nrows; ++i)
    if (A[i][ncols] != 0)
      throw std::runtime_error("g_expansion: inconsistent linear system");

  std::vector<Rat> x(ncols, Rat(0));
  for (size_t i = 0; i < r; ++i) {
    long c = pivot_col_of_row[i];
    x[c] = A[i][ncols] / A[i][c];
  }

  GExpansion g;
  g.L1 = L1;
  g.L2 = L2;
  g.lambda = lambda;
  for (size_t j = 0; j < ncols; ++j)
    if (x[j] != 0)
      g.coeff[{unknowns[j].alpha, unknowns[j].beta, unknowns[j].q}] = x[j];

  // exact reconstruction check
  Poly2 rec;
  for (size_t j = 0; j < ncols; ++j) {
    if (x[j] == 0) continue;
    for (auto& [mono, c] : basis[j]) {
      Rat& cc = rec[mono];
      cc += x[j] * c;
    }
  }
  p2_prune(rec);
  if (rec != lhs)
    throw std::runtime_error("g_expansion: reconstruction residual nonzero");
  return g;
}

}  // namespace

Real assoc_legendre(int l, int m, const Real& x, const PrecisionContext& ctx) {
  PrecisionGuard guard(ctx.working_digits);
  if (l < 0 || m < 0 || m > l)
    throw std::domain_error("assoc_legendre: requires 0 <= m <= l");
  if (abs(x) > 1) throw std::domain_error("assoc_legendre: requires |x| <= 1");
  Real q = poly_eval(legendre_deriv(l, m), x);
  if (m == 0) return q;
  // (1-x^2)^{m/2}
  Real s = sqrt(Real(1 - x * x));
  return q * pow(s, m);
}

Real legendre_norm(int l, int lambda, const PrecisionContext& ctx) {
  PrecisionGuard guard(ctx.working_digits);
  if (lambda < 0 || lambda > l)
    throw std::domain_error("legendre_norm: requires 0 <= lambda <= l");
  Rat r = Rat(2 * l + 1) * factorial_rat(l - lambda) /
          (2 * factorial_rat(l + lambda));
  return sqrt(to_real(r));
}

Real gaunt_coeff(int L, int M, int l1, int m1, int l2, int m2,
                 const PrecisionContext& ctx) {
  PrecisionGuard guard(ctx.working_digits);
  int la1 = std::abs(m1), la2 = std::abs(m2), La = std::abs(M);
  if (la1 > l1 || la2 > l2 || La > L) return Real(0);
  if (L < std::abs(l1 - l2) || L > l1 + l2) return Real(0);
  int s2 = la1 + la2 + La;
  if (s2 % 2 != 0) return Real(0);          // phi parity: never paired with F!=0
  if ((l1 + l2 + L) % 2 != 0) return Real(0);  // theta parity
  Poly prod = poly_mul(poly_mul(legendre_deriv(l1, la1), legendre_deriv(l2, la2)),
                       legendre_deriv(L, La));
  // (1-x^2)^{s2/2} is a polynomial since s2 is even
  Poly w{Rat(1)};
  Poly one_minus_x2{Rat(1), Rat(0), Rat(-1)};
  for (int i = 0; i < s2 / 2; ++i) w = poly_mul(w, one_minus_x2);
  Rat integral = poly_int11(poly_mul(prod, w));
  Real T = legendre_norm(l1, la1, ctx) * legendre_norm(l2, la2, ctx) *
           legendre_norm(L, La, ctx) * to_real(integral);
  return sqrt(Real(2) / (2 * L + 1)) * T;
}

namespace {

// Integral over [0,2pi] of the three unnormalized phi factors, divided by pi.
// kind: true = cos(n phi), false = sin(n phi).
Rat phi_triple_over_pi(bool c1, int n1, bool c2, int n2, bool c3, int n3) {
  int sines = (!c1) + (!c2) + (!c3);
  if (sines % 2 != 0) return Rat(0);
  if ((!c1 && n1 == 0) || (!c2 && n2 == 0) || (!c3 && n3 == 0)) return Rat(0);
  if (sines == 0) {
    if (n1 == 0 && n2 == 0 && n3 == 0) return Rat(2);
    Rat r = 0;
    if (n1 == n2 + n3) r += Rat(1, 2);
    if (n2 == n1 + n3) r += Rat(1, 2);
    if (n3 == n1 + n2) r += Rat(1, 2);
    return r;
  }
  // two sines: bring the cosine factor to front
  int a, b, c;
  if (c1) {
    a = n1; b = n2; c = n3;
  } else if (c2) {
    a = n2; b = n1; c = n3;
  } else {
    a = n3; b = n1; c = n2;
  }
  Rat r = 0;
  if (b == a + c) r += Rat(1, 2);
  if (c == a + b) r += Rat(1, 2);
  if (a == b + c) r -= Rat(1, 2);
  return r;
}

}  // namespace

Real a_coeff(int M, int m1, int m2, const PrecisionContext& ctx) {
  PrecisionGuard guard(ctx.working_digits);
  Rat over_pi = phi_triple_over_pi(m1 >= 0, std::abs(m1), m2 >= 0,
                                   std::abs(m2), M >= 0, std::abs(M));
  if (over_pi == 0) return Real(0);
  // F = (over_pi * pi) / sqrt(pi^3 * prod(1+delta)); a = sqrt(2 pi) F
  long denom = (m1 == 0 ? 2 : 1) * (long)(m2 == 0 ? 2 : 1) * (M == 0 ? 2 : 1);
  return to_real(over_pi) * sqrt(Real(2) / denom);
}

Real real_gaunt(int L, int M, int l1, int m1, int l2, int m2,
                const PrecisionContext& ctx) {
  PrecisionGuard guard(ctx.working_digits);
  Real c = gaunt_coeff(L, M, l1, m1, l2, m2, ctx);
  if (c == 0) return c;
  Real a = a_coeff(M, m1, m2, ctx);
  if (a == 0) return a;
  const Real pi = boost::math::constants::pi<Real>();
  return sqrt(Real(2 * L + 1) / (4 * pi)) * c * a;
}

const GExpansion& g_expansion(int L1, int L2, int lambda) {
  static std::map<std::tuple<int, int, int>, GExpansion> cache;
  auto key = std::make_tuple(L1, L2, lambda);
  auto it = cache.find(key);
  if (it == cache.end())
    it = cache.emplace(key, build_g_expansion(L1, L2, lambda)).first;
  return it->second;
}

Real g_reconstruct(const GExpansion& g, const Real& mu, const Real& nu,
                   const PrecisionContext& ctx) {
  PrecisionGuard guard(ctx.working_digits);
  Real sum = 0;
  for (auto& [key, c] : g.coeff) {
    auto [alpha, beta, q] = key;
    Real term = to_real(c);
    if (q) term *= pow(mu * nu, q);
    term *= pow(Real(mu + nu), -alpha);
    term *= pow(Real(mu - nu), -beta);
    sum += term;
  }
  return sum;
}

}  // namespace nsto
