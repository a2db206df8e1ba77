// Multiprecision arithmetic substrate and precision bookkeeping shared by
// every module. All numeric work runs on MPFR-backed floats whose decimal
// precision is set per PrecisionContext.
#pragma once

#include <boost/multiprecision/mpfr.hpp>

#include <stdexcept>
#include <string>

namespace nsto {

using Real = boost::multiprecision::mpfr_float;

// Governs working precision, tolerances and subdivision limits of every
// numeric operation. Immutable after construction.
struct PrecisionContext {
  unsigned working_digits = 50;   // significant decimal digits of intermediates
  unsigned target_digits = 25;    // digits requested in final results
  unsigned max_recursion = 35;    // adaptive-subdivision depth cap
  Real series_rel_cutoff;         // relative term size that terminates a series

  static PrecisionContext make(unsigned working = 50, unsigned target = 25,
                               unsigned max_rec = 35);

  // 10^{-(working_digits - offset)}
  Real tol(int offset = 0) const;
};

// RAII guard installing a default mpfr precision for the current scope.
class PrecisionGuard {
 public:
  explicit PrecisionGuard(unsigned digits)
      : saved_(Real::default_precision()) {
    Real::default_precision(digits);
  }
  explicit PrecisionGuard(const PrecisionContext& ctx)
      : PrecisionGuard(ctx.working_digits) {}
  ~PrecisionGuard() { Real::default_precision(saved_); }
  PrecisionGuard(const PrecisionGuard&) = delete;
  PrecisionGuard& operator=(const PrecisionGuard&) = delete;

 private:
  unsigned saved_;
};

// 10^k at the current default precision.
Real pow10(long k);

// Exact-integer test (value representable and equal to an integer).
bool is_integer(const Real& x);

// d.dddd...E±XX with exactly `sig_digits` significant decimals, round half
// even, uppercase exponent marker and a two-digit (minimum) exponent.
std::string format_scientific(const Real& x, unsigned sig_digits);

// Significant-decimal agreement between two values; returns a large count
// when both are exactly equal or both zero.
int matching_digits(const Real& a, const Real& b);

}  // namespace nsto
