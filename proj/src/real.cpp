#include "nsto/real.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <sstream>

namespace nsto {

PrecisionContext PrecisionContext::make(unsigned working, unsigned target,
                                        unsigned max_rec) {
  if (working < target + 10)
    throw std::domain_error(
        "PrecisionContext: working_digits must be >= target_digits + 10");
  if (max_rec < 1)
    throw std::domain_error("PrecisionContext: max_recursion must be >= 1");
  PrecisionContext ctx;
  ctx.working_digits = working;
  ctx.target_digits = target;
  ctx.max_recursion = max_rec;
  PrecisionGuard guard(working);
  ctx.series_rel_cutoff = pow10(-static_cast<long>(working));
  return ctx;
}

Real PrecisionContext::tol(int offset) const {
  return pow10(-static_cast<long>(working_digits) + offset);
}

Real pow10(long k) {
  Real ten = 10;
  return pow(ten, k);
}

bool is_integer(const Real& x) { return floor(x) == x; }

std::string format_scientific(const Real& x, unsigned sig_digits) {
  if (sig_digits == 0) sig_digits = 1;
  // mpfr_snprintf implements correct rounding to the requested digit count.
  mpfr_srcptr p = x.backend().data();
  char buf[64];
  std::string fmt = "%." + std::to_string(sig_digits - 1) + "RNE";
  int need = mpfr_snprintf(buf, sizeof(buf), fmt.c_str(), p);
  std::string s;
  if (need < static_cast<int>(sizeof(buf))) {
    s.assign(buf);
  } else {
    std::string big(static_cast<size_t>(need) + 1, '\0');
    mpfr_snprintf(big.data(), big.size(), fmt.c_str(), p);
    s.assign(big.c_str());
  }
  // Normalize to d.dddE±XX.
  auto epos = s.find_first_of("eE");
  std::string mant = s.substr(0, epos);
  std::string expo = epos == std::string::npos ? "+00" : s.substr(epos + 1);
  if (expo[0] != '+' && expo[0] != '-') expo.insert(expo.begin(), '+');
  while (expo.size() < 3) expo.insert(expo.begin() + 1, '0');
  return mant + "E" + expo;
}

int matching_digits(const Real& a, const Real& b) {
  if (a == b) return 1000;
  Real scale = (std::max)(abs(a), abs(b));
  if (scale == 0) return 1000;
  Real rel = abs(a - b) / scale;
  // rel = 10^{-d}
  double d = -static_cast<double>(log10(rel));
  return d < 0 ? 0 : static_cast<int>(d);
}

}  // namespace nsto
