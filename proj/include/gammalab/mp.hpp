#pragma once

// Arbitrary-precision floating point with rigorous absolute error bounds,
// plus the constants and functions the sequence formulas consume.
//
// A `Bounded` is a value together with an `ErrBound` e such that the exact
// quantity it approximates lies in [value - e, value + e]. Every operation
// adds its own rounding error to the propagated bound, so bounds remain valid
// through arbitrary compositions. Precision is always explicit; there is no
// global precision state.

#include <compare>
#include <optional>
#include <string>
#include <vector>

#include <mpfr.h>

#include "gammalab/errors.hpp"
#include "gammalab/exact.hpp"

namespace gammalab::mp {

using prec_t = long;

inline constexpr prec_t kDefaultGuardBits = 64;

// RAII owner of an mpfr_t.
class BigFloat {
 public:
  explicit BigFloat(prec_t prec = 64);
  BigFloat(const BigFloat& other);
  BigFloat(BigFloat&& other) noexcept;
  BigFloat& operator=(const BigFloat& other);
  BigFloat& operator=(BigFloat&& other) noexcept;
  ~BigFloat();

  static BigFloat from_long(long v, prec_t prec);
  static BigFloat from_double(double v, prec_t prec);
  // Parses a decimal string, rounding to nearest. Throws DomainError on bad input.
  static BigFloat from_string(const std::string& text, prec_t prec);

  prec_t precision() const { return mpfr_get_prec(raw_); }
  int sign() const { return mpfr_sgn(raw_); }
  bool is_zero() const { return mpfr_zero_p(raw_) != 0; }
  double to_double() const { return mpfr_get_d(raw_, MPFR_RNDN); }

  // `digits` significant decimal digits, round to nearest.
  std::string to_decimal(int digits) const;

  // Exact binary form "mantissa*2^exponent" at this precision; inverse of
  // from_exact_string. Used by the on-disk cache.
  std::string to_exact_string() const;
  static BigFloat from_exact_string(const std::string& text);

  mpfr_ptr get() { return raw_; }
  mpfr_srcptr get() const { return raw_; }

  friend bool operator==(const BigFloat& a, const BigFloat& b) {
    return a.precision() == b.precision() && mpfr_equal_p(a.raw_, b.raw_) != 0;
  }

 private:
  mpfr_t raw_;
};

// Non-negative absolute error bound, held at 64 bits and always rounded up.
class ErrBound {
 public:
  static constexpr prec_t kBits = 64;

  ErrBound();  // zero

  static ErrBound from_double(double v);
  static ErrBound pow2(long exponent);  // 2^exponent
  static ErrBound upper(const BigFloat& v);  // |v| rounded up
  // One unit in the last place of z (0 when z is zero).
  static ErrBound ulp(const BigFloat& z);
  // Upper bound for a rational's absolute value.
  static ErrBound upper(const Rat& q);

  bool is_zero() const { return bound_.is_zero(); }
  double to_double() const;  // rounded up
  std::string to_string(int digits = 3) const;  // rounded up, scientific
  // log2 of the bound (floor); LONG_MIN for zero.
  long log2_floor() const;

  const BigFloat& value() const { return bound_; }

  ErrBound& operator+=(const ErrBound& other);
  friend ErrBound operator+(ErrBound a, const ErrBound& b) { return a += b; }
  friend ErrBound operator*(const ErrBound& a, const ErrBound& b);
  ErrBound scaled(const BigFloat& factor) const;  // this * |factor|
  ErrBound scaled(const Rat& factor) const;
  ErrBound scaled_pow2(long exponent) const;

  friend std::partial_ordering operator<=>(const ErrBound& a, const ErrBound& b);
  friend bool operator==(const ErrBound& a, const ErrBound& b) {
    return mpfr_equal_p(a.bound_.get(), b.bound_.get()) != 0;
  }

  std::string to_exact_string() const { return bound_.to_exact_string(); }
  static ErrBound from_exact_string(const std::string& text);

 private:
  explicit ErrBound(BigFloat v) : bound_(std::move(v)) {}
  BigFloat bound_;
};

// Upper bound for |a - b|.
ErrBound abs_diff_upper(const BigFloat& a, const BigFloat& b);

struct Bounded {
  BigFloat value;
  ErrBound err;

  prec_t precision() const { return value.precision(); }

  // Exact rational, rounded to `prec` bits.
  static Bounded exact(const Rat& q, prec_t prec);
  static Bounded exact(const Int& z, prec_t prec);
  static Bounded exact(long v, prec_t prec);

  // Lower and upper ends of the enclosure, rounded outward.
  BigFloat lower() const;
  BigFloat upper() const;

  // True when [value - err, value + err] contains x.
  bool contains(const BigFloat& x) const;
  bool contains(const Rat& q) const;

  // Same value and error rounded to a different precision (adds rounding).
  Bounded rounded(prec_t prec) const;

  std::string to_decimal(int digits) const { return value.to_decimal(digits); }
};

Bounded operator+(const Bounded& a, const Bounded& b);
Bounded operator-(const Bounded& a, const Bounded& b);
Bounded operator-(const Bounded& a);
Bounded operator*(const Bounded& a, const Bounded& b);
// Throws PrecisionInsufficient when the divisor's enclosure contains 0.
Bounded operator/(const Bounded& a, const Bounded& b);
Bounded operator*(const Bounded& a, const Rat& q);
Bounded operator*(const Bounded& a, const Int& z);
Bounded operator/(const Bounded& a, const Int& z);
Bounded abs(const Bounded& a);
Bounded sqrt(const Bounded& a);

// True when the two enclosures overlap, i.e. |a - b| <= err_a + err_b is
// not excluded.
bool consistent(const Bounded& a, const Bounded& b);

// Natural log. Throws DomainError for x <= 0 (or an enclosure reaching 0).
Bounded ln(const BigFloat& x, prec_t prec);
Bounded ln(const Bounded& x);
Bounded ln_int(const Int& m, prec_t prec);
Bounded ln_int(unsigned long m, prec_t prec);

Bounded ln2_const(prec_t prec);
Bounded pi_const(prec_t prec);

// gamma by Euler-Maclaurin at a chosen cutoff:
//   gamma = H_N - ln N - 1/(2N) + sum_{k=1..K} B_{2k}/(2k N^{2k}) + R,
// with N = 2^log2_cutoff and the order-(2K+1) remainder bound
//   |R| <= 2 zeta(3) (2K)! / ((2 pi)^{2K+1} N^{2K+1}).
struct GammaEvaluation {
  Bounded value;
  unsigned log2_cutoff = 0;  // N = 2^log2_cutoff
  unsigned terms = 0;        // K
};

GammaEvaluation euler_gamma_em(prec_t prec, unsigned log2_cutoff, unsigned terms);

// Chooses (N, K) so that the truncation error is below 2^-(prec + guard).
GammaEvaluation euler_gamma_auto(prec_t prec);

// gamma with an error bound near 2^-prec; memoized per precision.
Bounded euler_gamma(prec_t prec);

// ln(m!) = sum_{k<=m} ln k. Accumulated at prec + 64 bits so the absolute
// bound stays below m * 2^(2 - prec); memoized per precision.
Bounded log_factorial(index_t m, prec_t prec);

// psi(k+1) = H_k - gamma.
Bounded digamma_int(index_t k, prec_t prec);

struct FracPart {
  Int floor;
  Bounded frac;  // 0 <= frac < 1; inherits the input's error bound
};

// Certified floor and fractional part. Throws PrecisionInsufficient when
// [x - err, x + err] straddles an integer.
FracPart frac_part_certified(const Bounded& x);

struct PrecisionPolicy {
  prec_t target_bits = 128;  // requested accuracy / fractional bits
  prec_t guard_bits = kDefaultGuardBits;
  prec_t max_bits = 1L << 16;
  bool auto_escalate = true;
};

// Calls `compute(p)` starting at `start`, doubling p on PrecisionInsufficient
// while the policy allows. Rethrows once max_bits is exceeded; a start above
// max_bits fails immediately.
template <class F>
auto with_escalation(const PrecisionPolicy& policy, prec_t start, F&& compute)
    -> decltype(compute(start)) {
  if (start > policy.max_bits) {
    throw PrecisionInsufficient("required precision exceeds the policy maximum",
                                start - policy.max_bits);
  }
  prec_t p = start;
  for (;;) {
    try {
      return compute(p);
    } catch (const PrecisionInsufficient&) {
      if (!policy.auto_escalate || 2 * p > policy.max_bits) throw;
      p *= 2;
    }
  }
}

// Memo-cache snapshots for the disk cache.
std::vector<prec_t> log_factorial_cached_precisions();
std::vector<Bounded> log_factorial_table_snapshot(prec_t prec);
void seed_log_factorial_table(prec_t prec, const std::vector<Bounded>& table);
std::vector<prec_t> euler_gamma_cached_precisions();
std::optional<Bounded> euler_gamma_cached(prec_t prec);
void seed_euler_gamma(prec_t prec, const Bounded& value);

}  // namespace gammalab::mp
