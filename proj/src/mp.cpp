#include "gammalab/mp.hpp"

#include <algorithm>
#include <climits>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>
#include <utility>

#include "gammalab/memo.hpp"

namespace gammalab::mp {
namespace {

std::string format_mpfr(const char* fmt, int digits, mpfr_srcptr x) {
  char* buf = nullptr;
  mpfr_asprintf(&buf, fmt, digits, x);
  std::string out(buf);
  mpfr_free_str(buf);
  return out;
}

// Rounding error of an MPFR result carrying ternary value `t`.
ErrBound rounding(const BigFloat& z, int t) { return t == 0 ? ErrBound() : ErrBound::ulp(z); }

prec_t joint_prec(const Bounded& a, const Bounded& b) { return std::max(a.precision(), b.precision()); }

// |value| rounded down at 64 bits, for denominators of error ratios.
BigFloat abs_lower(const BigFloat& v) {
  BigFloat out(ErrBound::kBits);
  mpfr_abs(out.get(), v.get(), MPFR_RNDD);
  return out;
}

}  // namespace

// ---------------------------------------------------------------- BigFloat

BigFloat::BigFloat(prec_t prec) {
  mpfr_init2(raw_, std::max<prec_t>(prec, MPFR_PREC_MIN));
  mpfr_set_zero(raw_, 1);
}

BigFloat::BigFloat(const BigFloat& other) {
  mpfr_init2(raw_, other.precision());
  mpfr_set(raw_, other.raw_, MPFR_RNDN);
}

BigFloat::BigFloat(BigFloat&& other) noexcept {
  mpfr_init2(raw_, MPFR_PREC_MIN);
  mpfr_swap(raw_, other.raw_);
}

BigFloat& BigFloat::operator=(const BigFloat& other) {
  if (this != &other) {
    mpfr_set_prec(raw_, other.precision());
    mpfr_set(raw_, other.raw_, MPFR_RNDN);
  }
  return *this;
}

BigFloat& BigFloat::operator=(BigFloat&& other) noexcept {
  if (this != &other) mpfr_swap(raw_, other.raw_);
  return *this;
}

BigFloat::~BigFloat() { mpfr_clear(raw_); }

BigFloat BigFloat::from_long(long v, prec_t prec) {
  BigFloat out(prec);
  mpfr_set_si(out.raw_, v, MPFR_RNDN);
  return out;
}

BigFloat BigFloat::from_double(double v, prec_t prec) {
  BigFloat out(prec);
  mpfr_set_d(out.raw_, v, MPFR_RNDN);
  return out;
}

BigFloat BigFloat::from_string(const std::string& text, prec_t prec) {
  BigFloat out(prec);
  char* end = nullptr;
  mpfr_strtofr(out.raw_, text.c_str(), &end, 10, MPFR_RNDN);
  if (text.empty() || end == text.c_str() || *end != '\0' || !mpfr_number_p(out.raw_)) {
    throw DomainError("not a decimal number: '" + text + "'");
  }
  return out;
}

std::string BigFloat::to_decimal(int digits) const {
  if (is_zero()) return "0";
  return format_mpfr("%.*RNg", std::max(digits, 1), raw_);
}

std::string BigFloat::to_exact_string() const {
  std::ostringstream out;
  out << precision() << ':';
  if (is_zero()) {
    out << "0:0";
    return out.str();
  }
  mpz_class mantissa;
  const mpfr_exp_t exponent = mpfr_get_z_2exp(mantissa.get_mpz_t(), raw_);
  out << mantissa.get_str(16) << ':' << exponent;
  return out.str();
}

BigFloat BigFloat::from_exact_string(const std::string& text) {
  const auto first = text.find(':');
  const auto second = text.find(':', first == std::string::npos ? first : first + 1);
  if (first == std::string::npos || second == std::string::npos) {
    throw DomainError("malformed exact float: '" + text + "'");
  }
  try {
    const prec_t prec = std::stol(text.substr(0, first));
    const mpz_class mantissa(text.substr(first + 1, second - first - 1), 16);
    const long exponent = std::stol(text.substr(second + 1));
    if (prec < MPFR_PREC_MIN || prec > (1L << 24)) throw DomainError("bad precision");
    BigFloat out(prec);
    if (mpfr_set_z_2exp(out.raw_, mantissa.get_mpz_t(), exponent, MPFR_RNDN) != 0) {
      throw DomainError("mantissa does not fit precision");
    }
    return out;
  } catch (const std::invalid_argument&) {
    throw DomainError("malformed exact float: '" + text + "'");
  } catch (const std::out_of_range&) {
    throw DomainError("malformed exact float: '" + text + "'");
  }
}

// ---------------------------------------------------------------- ErrBound

ErrBound::ErrBound() : bound_(kBits) {}

ErrBound ErrBound::from_double(double v) {
  if (!(v >= 0) || !std::isfinite(v)) throw DomainError("error bound must be finite and >= 0");
  BigFloat b(kBits);
  mpfr_set_d(b.get(), v, MPFR_RNDU);
  return ErrBound(std::move(b));
}

ErrBound ErrBound::pow2(long exponent) {
  BigFloat b(kBits);
  mpfr_set_ui_2exp(b.get(), 1, exponent, MPFR_RNDU);
  return ErrBound(std::move(b));
}

ErrBound ErrBound::upper(const BigFloat& v) {
  BigFloat b(kBits);
  mpfr_abs(b.get(), v.get(), MPFR_RNDU);
  return ErrBound(std::move(b));
}

ErrBound ErrBound::upper(const Rat& q) {
  BigFloat b(kBits);
  const Rat magnitude = ::abs(q);
  mpfr_set_q(b.get(), magnitude.get_mpq_t(), MPFR_RNDU);
  return ErrBound(std::move(b));
}

ErrBound ErrBound::ulp(const BigFloat& z) {
  if (z.is_zero() || !mpfr_number_p(z.get())) return ErrBound();
  return pow2(static_cast<long>(mpfr_get_exp(z.get())) - z.precision());
}

double ErrBound::to_double() const { return mpfr_get_d(bound_.get(), MPFR_RNDU); }

std::string ErrBound::to_string(int digits) const {
  if (is_zero()) return "0";
  return format_mpfr("%.*RUe", std::max(digits - 1, 0), bound_.get());
}

long ErrBound::log2_floor() const {
  if (is_zero()) return LONG_MIN;
  return static_cast<long>(mpfr_get_exp(bound_.get())) - 1;
}

ErrBound& ErrBound::operator+=(const ErrBound& other) {
  mpfr_add(bound_.get(), bound_.get(), other.bound_.get(), MPFR_RNDU);
  return *this;
}

ErrBound operator*(const ErrBound& a, const ErrBound& b) {
  BigFloat out(ErrBound::kBits);
  mpfr_mul(out.get(), a.bound_.get(), b.bound_.get(), MPFR_RNDU);
  return ErrBound(std::move(out));
}

ErrBound ErrBound::scaled(const BigFloat& factor) const { return *this * upper(factor); }

ErrBound ErrBound::scaled(const Rat& factor) const { return *this * upper(factor); }

ErrBound ErrBound::scaled_pow2(long exponent) const {
  BigFloat out(kBits);
  mpfr_mul_2si(out.get(), bound_.get(), exponent, MPFR_RNDU);
  return ErrBound(std::move(out));
}

std::partial_ordering operator<=>(const ErrBound& a, const ErrBound& b) {
  const int c = mpfr_cmp(a.bound_.get(), b.bound_.get());
  return c < 0 ? std::partial_ordering::less
               : (c > 0 ? std::partial_ordering::greater : std::partial_ordering::equivalent);
}

ErrBound ErrBound::from_exact_string(const std::string& text) {
  BigFloat v = BigFloat::from_exact_string(text);
  if (v.sign() < 0 || v.precision() != kBits) throw DomainError("bad error bound encoding");
  return ErrBound(std::move(v));
}

ErrBound abs_diff_upper(const BigFloat& a, const BigFloat& b) {
  BigFloat d(ErrBound::kBits);
  mpfr_sub(d.get(), a.get(), b.get(), MPFR_RNDA);
  return ErrBound::upper(d);
}

// ---------------------------------------------------------------- Bounded

Bounded Bounded::exact(const Rat& q, prec_t prec) {
  BigFloat v(prec);
  const int t = mpfr_set_q(v.get(), q.get_mpq_t(), MPFR_RNDN);
  ErrBound e = rounding(v, t);
  return {std::move(v), std::move(e)};
}

Bounded Bounded::exact(const Int& z, prec_t prec) {
  BigFloat v(prec);
  const int t = mpfr_set_z(v.get(), z.get_mpz_t(), MPFR_RNDN);
  ErrBound e = rounding(v, t);
  return {std::move(v), std::move(e)};
}

Bounded Bounded::exact(long v, prec_t prec) { return exact(Int(v), prec); }

BigFloat Bounded::lower() const {
  BigFloat out(std::max(precision(), ErrBound::kBits) + 2);
  mpfr_sub(out.get(), value.get(), err.value().get(), MPFR_RNDD);
  return out;
}

BigFloat Bounded::upper() const {
  BigFloat out(std::max(precision(), ErrBound::kBits) + 2);
  mpfr_add(out.get(), value.get(), err.value().get(), MPFR_RNDU);
  return out;
}

bool Bounded::contains(const BigFloat& x) const { return abs_diff_upper(value, x) <= err; }

bool Bounded::contains(const Rat& q) const {
  Rat v;
  mpfr_get_q(v.get_mpq_t(), value.get());
  Rat e;
  mpfr_get_q(e.get_mpq_t(), err.value().get());
  return ::abs(Rat(v - q)) <= e;
}

Bounded Bounded::rounded(prec_t prec) const {
  BigFloat v(prec);
  const int t = mpfr_set(v.get(), value.get(), MPFR_RNDN);
  ErrBound e = err + rounding(v, t);
  return {std::move(v), std::move(e)};
}

Bounded operator+(const Bounded& a, const Bounded& b) {
  BigFloat z(joint_prec(a, b));
  const int t = mpfr_add(z.get(), a.value.get(), b.value.get(), MPFR_RNDN);
  ErrBound e = a.err + b.err + rounding(z, t);
  return {std::move(z), std::move(e)};
}

Bounded operator-(const Bounded& a, const Bounded& b) {
  BigFloat z(joint_prec(a, b));
  const int t = mpfr_sub(z.get(), a.value.get(), b.value.get(), MPFR_RNDN);
  ErrBound e = a.err + b.err + rounding(z, t);
  return {std::move(z), std::move(e)};
}

Bounded operator-(const Bounded& a) {
  BigFloat z(a.precision());
  mpfr_neg(z.get(), a.value.get(), MPFR_RNDN);
  return {std::move(z), a.err};
}

Bounded operator*(const Bounded& a, const Bounded& b) {
  BigFloat z(joint_prec(a, b));
  const int t = mpfr_mul(z.get(), a.value.get(), b.value.get(), MPFR_RNDN);
  ErrBound e = b.err.scaled(a.value) + a.err.scaled(b.value) + a.err * b.err + rounding(z, t);
  return {std::move(z), std::move(e)};
}

Bounded operator/(const Bounded& a, const Bounded& b) {
  // |A/B - a/b| <= (e_a |b| + |a| e_b) / (|b| (|b| - e_b))
  BigFloat margin = abs_lower(b.value);
  mpfr_sub(margin.get(), margin.get(), b.err.value().get(), MPFR_RNDD);
  if (margin.sign() <= 0) {
    throw PrecisionInsufficient("division by an enclosure containing zero", b.precision());
  }
  BigFloat z(joint_prec(a, b));
  const int t = mpfr_div(z.get(), a.value.get(), b.value.get(), MPFR_RNDN);

  const ErrBound numer = a.err.scaled(b.value) + b.err.scaled(a.value);
  BigFloat denom = abs_lower(b.value);
  mpfr_mul(denom.get(), denom.get(), margin.get(), MPFR_RNDD);
  BigFloat ratio(ErrBound::kBits);
  mpfr_div(ratio.get(), numer.value().get(), denom.get(), MPFR_RNDU);
  ErrBound e = ErrBound::upper(ratio) + rounding(z, t);
  return {std::move(z), std::move(e)};
}

Bounded operator*(const Bounded& a, const Rat& q) { return a * Bounded::exact(q, a.precision()); }

Bounded operator*(const Bounded& a, const Int& z) {
  BigFloat r(a.precision());
  const int t = mpfr_mul_z(r.get(), a.value.get(), z.get_mpz_t(), MPFR_RNDN);
  ErrBound e = a.err.scaled(Rat(z)) + rounding(r, t);
  return {std::move(r), std::move(e)};
}

Bounded operator/(const Bounded& a, const Int& z) {
  if (z == 0) throw DomainError("division by zero");
  BigFloat r(a.precision());
  const int t = mpfr_div_z(r.get(), a.value.get(), z.get_mpz_t(), MPFR_RNDN);
  BigFloat scaled(ErrBound::kBits);
  const Int mag = ::abs(z);
  mpfr_div_z(scaled.get(), a.err.value().get(), mag.get_mpz_t(), MPFR_RNDU);
  ErrBound e = ErrBound::upper(scaled) + rounding(r, t);
  return {std::move(r), std::move(e)};
}

Bounded abs(const Bounded& a) {
  BigFloat z(a.precision());
  mpfr_abs(z.get(), a.value.get(), MPFR_RNDN);
  return {std::move(z), a.err};
}

Bounded sqrt(const Bounded& a) {
  if (a.value.sign() <= 0) throw DomainError("sqrt of a non-positive value");
  BigFloat z(a.precision());
  const int t = mpfr_sqrt(z.get(), a.value.get(), MPFR_RNDN);
  // |sqrt(X) - sqrt(x)| = |X - x| / (sqrt(X) + sqrt(x)) <= e / sqrt(x)
  BigFloat root(ErrBound::kBits);
  mpfr_sqrt(root.get(), a.value.get(), MPFR_RNDD);
  BigFloat ratio(ErrBound::kBits);
  mpfr_div(ratio.get(), a.err.value().get(), root.get(), MPFR_RNDU);
  ErrBound e = ErrBound::upper(ratio) + rounding(z, t);
  return {std::move(z), std::move(e)};
}

bool consistent(const Bounded& a, const Bounded& b) {
  return abs_diff_upper(a.value, b.value) <= a.err + b.err;
}

// ---------------------------------------------------------------- logs

Bounded ln(const BigFloat& x, prec_t prec) {
  if (x.sign() <= 0) throw DomainError("ln of a non-positive value");
  BigFloat z(prec);
  const int t = mpfr_log(z.get(), x.get(), MPFR_RNDN);
  ErrBound e = rounding(z, t);
  return {std::move(z), std::move(e)};
}

Bounded ln(const Bounded& x) {
  const BigFloat lo = x.lower();
  if (lo.sign() <= 0) {
    if (x.value.sign() <= 0) throw DomainError("ln of a non-positive value");
    throw PrecisionInsufficient("ln argument enclosure reaches zero", x.precision());
  }
  Bounded out = ln(x.value, x.precision());
  // Mean value theorem: |ln X - ln x| <= e / min(X, x) <= e / (x - e).
  BigFloat ratio(ErrBound::kBits);
  mpfr_div(ratio.get(), x.err.value().get(), lo.get(), MPFR_RNDU);
  out.err += ErrBound::upper(ratio);
  return out;
}

Bounded ln_int(const Int& m, prec_t prec) {
  if (m <= 0) throw DomainError("ln of a non-positive integer");
  BigFloat x(std::max<prec_t>(static_cast<prec_t>(mpz_sizeinbase(m.get_mpz_t(), 2)), 2));
  mpfr_set_z(x.get(), m.get_mpz_t(), MPFR_RNDN);  // exact: precision covers every bit
  return ln(x, prec);
}

Bounded ln_int(unsigned long m, prec_t prec) {
  if (m == 0) throw DomainError("ln of zero");
  BigFloat x(64);
  mpfr_set_ui(x.get(), m, MPFR_RNDN);
  return ln(x, prec);
}

Bounded ln2_const(prec_t prec) {
  BigFloat z(prec);
  const int t = mpfr_const_log2(z.get(), MPFR_RNDN);
  ErrBound e = rounding(z, t);
  return {std::move(z), std::move(e)};
}

Bounded pi_const(prec_t prec) {
  BigFloat z(prec);
  const int t = mpfr_const_pi(z.get(), MPFR_RNDN);
  ErrBound e = rounding(z, t);
  return {std::move(z), std::move(e)};
}

// ---------------------------------------------------------------- gamma

namespace {

// sum_{k=lo..hi-1} 1/k as an unreduced fraction p/q (binary splitting).
void harmonic_split(unsigned long lo, unsigned long hi, Int& p, Int& q) {
  if (hi - lo == 1) {
    p = 1;
    q = lo;
    return;
  }
  const unsigned long mid = lo + (hi - lo) / 2;
  Int p1, q1, p2, q2;
  harmonic_split(lo, mid, p1, q1);
  harmonic_split(mid, hi, p2, q2);
  p = p1 * q2 + p2 * q1;
  q = q1 * q2;
}

// 2 zeta(3) (2K)! / ((2 pi)^{2K+1} N^{2K+1}), bounded above using
// 2 zeta(3) < 121/50 and 2 pi > 6.
Rat gamma_remainder_bound(unsigned log2_cutoff, unsigned terms) {
  const unsigned order = 2 * terms + 1;
  Int denom;
  mpz_ui_pow_ui(denom.get_mpz_t(), 6, order);
  denom <<= static_cast<mp_bitcnt_t>(log2_cutoff) * order;
  Rat out(exact::factorial(2 * terms) * 121, denom * 50);
  out.canonicalize();
  return out;
}

double gamma_remainder_log2(unsigned log2_cutoff, unsigned terms) {
  const double order = 2.0 * terms + 1;
  return std::log2(2.42) + std::lgamma(2.0 * terms + 1) / std::log(2.0) -
         order * (std::log2(6.0) + log2_cutoff);
}

constexpr unsigned kMaxGammaTerms = 120;
constexpr unsigned kMaxGammaLog2Cutoff = 22;

struct GammaCache {
  std::mutex mutex;
  std::map<prec_t, Bounded> values;
};

GammaCache& gamma_cache() {
  static GammaCache cache;
  return cache;
}

}  // namespace

GammaEvaluation euler_gamma_em(prec_t prec, unsigned log2_cutoff, unsigned terms) {
  if (terms == 0 || log2_cutoff == 0 || log2_cutoff > 30) {
    throw DomainError("euler_gamma_em: need K >= 1 and 1 <= log2 N <= 30");
  }
  const prec_t work = prec + kDefaultGuardBits;
  const unsigned long cutoff = 1UL << log2_cutoff;

  Int hp, hq;
  harmonic_split(1, cutoff + 1, hp, hq);
  Bounded sum = Bounded::exact(hp, work) / hq;

  sum = sum - ln2_const(work) * Int(log2_cutoff);

  Rat correction(-1, 2 * cutoff);
  correction.canonicalize();
  Int power(1);
  const Int n_squared = Int(cutoff) * cutoff;
  for (unsigned k = 1; k <= terms; ++k) {
    power *= n_squared;
    Rat term = exact::bernoulli(2 * k) / Rat(Int(2 * k) * power);
    correction += term;
  }
  sum = sum + Bounded::exact(correction, work);
  sum.err += ErrBound::upper(gamma_remainder_bound(log2_cutoff, terms));
  return {std::move(sum), log2_cutoff, terms};
}

GammaEvaluation euler_gamma_auto(prec_t prec) {
  const double goal = -static_cast<double>(prec + kDefaultGuardBits) - 1.0;
  for (unsigned cut = 4; cut <= kMaxGammaLog2Cutoff; ++cut) {
    for (unsigned k = 1; k <= kMaxGammaTerms; ++k) {
      if (gamma_remainder_log2(cut, k) <= goal) return euler_gamma_em(prec, cut, k);
    }
  }
  throw PrecisionInsufficient("euler_gamma: precision beyond the supported range", 0);
}

Bounded euler_gamma(prec_t prec) {
  auto& cache = gamma_cache();
  {
    std::lock_guard lock(cache.mutex);
    if (auto it = cache.values.find(prec); it != cache.values.end()) return it->second;
  }
  Bounded value = euler_gamma_auto(prec).value;
  std::lock_guard lock(cache.mutex);
  // First writer wins; every writer computes identical bits.
  return cache.values.emplace(prec, std::move(value)).first->second;
}

std::vector<prec_t> euler_gamma_cached_precisions() {
  auto& cache = gamma_cache();
  std::lock_guard lock(cache.mutex);
  std::vector<prec_t> out;
  for (const auto& [p, v] : cache.values) out.push_back(p);
  return out;
}

std::optional<Bounded> euler_gamma_cached(prec_t prec) {
  auto& cache = gamma_cache();
  std::lock_guard lock(cache.mutex);
  if (auto it = cache.values.find(prec); it != cache.values.end()) return it->second;
  return std::nullopt;
}

void seed_euler_gamma(prec_t prec, const Bounded& value) {
  auto& cache = gamma_cache();
  std::lock_guard lock(cache.mutex);
  cache.values.emplace(prec, value);
}

// ---------------------------------------------------------------- ln(m!)

namespace {

class LogFactorialTables {
 public:
  IncrementalTable<Bounded>& table(prec_t prec) {
    std::lock_guard lock(mutex_);
    auto& slot = tables_[prec];
    if (!slot) {
      const prec_t work = prec + kDefaultGuardBits;
      slot = std::make_unique<IncrementalTable<Bounded>>(
          [work](const std::deque<Bounded>& prev, std::size_t m) {
            if (m <= 1) return Bounded::exact(0L, work);
            return prev[m - 1] + ln_int(static_cast<unsigned long>(m), work);
          });
    }
    return *slot;
  }

  std::vector<prec_t> precisions() {
    std::lock_guard lock(mutex_);
    std::vector<prec_t> out;
    for (const auto& [p, t] : tables_) out.push_back(p);
    return out;
  }

 private:
  std::mutex mutex_;
  std::map<prec_t, std::unique_ptr<IncrementalTable<Bounded>>> tables_;
};

LogFactorialTables& log_factorial_tables() {
  static LogFactorialTables tables;
  return tables;
}

}  // namespace

Bounded log_factorial(index_t m, prec_t prec) { return log_factorial_tables().table(prec).at(m); }

std::vector<prec_t> log_factorial_cached_precisions() { return log_factorial_tables().precisions(); }

std::vector<Bounded> log_factorial_table_snapshot(prec_t prec) {
  return log_factorial_tables().table(prec).snapshot();
}

void seed_log_factorial_table(prec_t prec, const std::vector<Bounded>& table) {
  log_factorial_tables().table(prec).seed(table);
}

Bounded digamma_int(index_t k, prec_t prec) {
  const Bounded gamma = euler_gamma(prec);
  return Bounded::exact(exact::harmonic(k), gamma.precision()) - gamma;
}

// ---------------------------------------------------------------- frac

FracPart frac_part_certified(const Bounded& x) {
  const BigFloat lo = x.lower();
  const BigFloat hi = x.upper();
  Int floor_lo, floor_hi;
  mpfr_get_z(floor_lo.get_mpz_t(), lo.get(), MPFR_RNDD);
  mpfr_get_z(floor_hi.get_mpz_t(), hi.get(), MPFR_RNDD);
  if (floor_lo != floor_hi) {
    // Distance from the value to the integer inside the enclosure.
    BigFloat dist(ErrBound::kBits);
    mpfr_sub_z(dist.get(), x.value.get(), floor_hi.get_mpz_t(), MPFR_RNDN);
    mpfr_abs(dist.get(), dist.get(), MPFR_RNDN);
    long extra = x.precision();
    if (!dist.is_zero()) {
      extra = std::max(1L, x.err.log2_floor() + 2 - (static_cast<long>(mpfr_get_exp(dist.get())) - 1));
    }
    throw PrecisionInsufficient("fractional part straddles an integer boundary", extra);
  }
  // x - floor is exact once the precision covers every bit from 2^0 down to
  // the last bit of x.
  const long top = x.value.is_zero() ? 0 : static_cast<long>(mpfr_get_exp(x.value.get()));
  BigFloat frac(x.precision() + std::max(0L, 1 - top) + 1);
  const int t = mpfr_sub_z(frac.get(), x.value.get(), floor_lo.get_mpz_t(), MPFR_RNDN);
  if (t != 0) throw IdentityViolation("fractional part subtraction was inexact");
  return {floor_lo, Bounded{std::move(frac), x.err}};
}

}  // namespace gammalab::mp
