#include "gammalab/sequences.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "gammalab/errors.hpp"

namespace gammalab::seq {
namespace {

using mp::BigFloat;

prec_t bit_length(const Int& z) {
  return z == 0 ? 0 : static_cast<prec_t>(mpz_sizeinbase(z.get_mpz_t(), 2));
}

Nat squared_binomial(index_t n, index_t j) {
  const Nat c = exact::binomial(n, j);
  return c * c;
}

// 2 C(n,j)^2 (H_{n-j} - H_j), the weight of ln((n+j)!) in L_n (up to sign)
// and of 1/(x+j+...) in the partial fractions after scaling by (n!)^2.
Rat log_weight(index_t n, index_t j) {
  return 2 * Rat(squared_binomial(n, j)) * (exact::harmonic(n - j) - exact::harmonic(j));
}

void require_positive_n(index_t n, const char* what) {
  if (n == 0) throw DomainError(std::string(what) + ": n must be >= 1");
}

// Partial-fraction numerators scaled by (n!)^2:
//   g(x) = (n!/(x(x+1)...(x+n)))^2 = sum_k A_k/(x+k) + B_k/(x+k)^2.
struct ScaledCoeffs {
  std::vector<Rat> A;
  std::vector<Int> B;
};

ScaledCoeffs scaled_coeffs(index_t n) {
  ScaledCoeffs out;
  out.A.resize(n + 1);
  out.B.resize(n + 1);
  Rat total(0);
  for (index_t k = 0; k <= n; ++k) {
    out.B[k] = squared_binomial(n, k);
    out.A[k] = 2 * Rat(out.B[k]) * (exact::harmonic(k) - exact::harmonic(n - k));
    total += out.A[k];
  }
  if (total != 0) throw IdentityViolation("partial-fraction residues do not sum to zero");
  return out;
}

double log2_of(const Int& z) {
  if (z == 0) return -1e300;
  long exp = 0;
  const double mant = mpz_get_d_2exp(&exp, z.get_mpz_t());
  return std::log2(std::fabs(mant)) + static_cast<double>(exp);
}

// log2 of the size of the individual partial-fraction contributions to one
// series term near v, used to pick a working precision.
double log2_term_scale(index_t n, index_t v) {
  const double hn = std::log(static_cast<double>(n) + 1.0) + 1.0;
  return log2_of(exact::binomial(2 * n, n)) + std::log2(1.0 + 2.0 * hn * std::log(v + n + 1.0));
}

// f(v) = int_v^inf g = sum_k B_k/(v+k) - sum_k A_k ln(v+k); logs supplied
// as ln_at(m) for m = v+k.
template <class LnAt>
Bounded series_term(const ScaledCoeffs& c, index_t n, index_t v, prec_t work, LnAt&& ln_at) {
  Bounded term = Bounded::exact(0L, work);
  for (index_t k = 0; k <= n; ++k) {
    Rat inv(Int(c.B[k]), Int(v + k));
    inv.canonicalize();
    term = term + Bounded::exact(inv, work) - ln_at(v + k) * c.A[k];
  }
  return term;
}

// |g^{(m)}(V)| upper bound and signed value, evaluated through the partial
// fractions in bounded arithmetic:
//   g^{(m)}(V) = (-1)^m sum_k [A_k m!/(V+k)^{m+1} + B_k (m+1)!/(V+k)^{m+2}]
class DerivativeLadder {
 public:
  DerivativeLadder(const ScaledCoeffs& c, index_t n, index_t V, prec_t work)
      : c_(c), n_(n), work_(work) {
    for (index_t k = 0; k <= n; ++k) {
      Rat inv(Int(1), Int(V + k));
      inv.canonicalize();
      inverse_.push_back(Bounded::exact(inv, work));
      power_.push_back(inverse_.back());  // (V+k)^-(m+1) for the current m
    }
  }

  // Value of g^{(m)}(V) for m = 0, 1, 2, ... in order.
  Bounded next() {
    const Int m_fact = exact::factorial(m_);
    const Int m1_fact = m_fact * (m_ + 1);
    Bounded sum = Bounded::exact(0L, work_);
    for (index_t k = 0; k <= n_; ++k) {
      const Bounded next_power = power_[k] * inverse_[k];
      sum = sum + power_[k] * (c_.A[k] * Rat(m_fact)) + next_power * m1_fact * c_.B[k];
      power_[k] = next_power;
    }
    if (m_ % 2 == 1) sum = -sum;
    ++m_;
    return sum;
  }

 private:
  const ScaledCoeffs& c_;
  index_t n_;
  prec_t work_;
  unsigned long m_ = 0;
  std::vector<Bounded> inverse_;
  std::vector<Bounded> power_;
};

ErrBound magnitude_upper(const Bounded& x) { return ErrBound::upper(x.value) + x.err; }

struct EulerMaclaurinTail {
  Bounded estimate;
  ErrBound remainder;
  unsigned terms = 0;
};

// sum_{v>V} f(v) ~ int_V^inf f - f(V)/2 + sum_{j=1..q} B_{2j}/(2j)! g^{(2j-2)}(V)
// with |remainder| <= 2 zeta(3)/(2 pi)^{2q+1} |g^{(2q-1)}(V)|, since g is
// completely monotone (each derivative has constant sign).
std::optional<EulerMaclaurinTail> euler_maclaurin_tail(const ScaledCoeffs& c, index_t n, index_t V,
                                                       prec_t work, const ErrBound& goal) {
  constexpr unsigned kMaxTerms = 200;
  // Enough extra bits for the cancellation inside the partial fractions.
  const prec_t deriv_work =
      work + static_cast<prec_t>(std::ceil((2.0 * n + 2) * std::log2(V + n + 1.0))) + 2 * n + 64;
  DerivativeLadder ladder(c, n, V, deriv_work);

  std::vector<Bounded> ln_cache;
  for (index_t k = 0; k <= n; ++k) ln_cache.push_back(mp::ln_int(static_cast<unsigned long>(V + k), work));
  auto ln_at = [&](index_t m) { return ln_cache[m - V]; };

  // int_V^inf f = -sum_k (B_k - (k+V) A_k) ln(V+k) - sum_k B_k
  Rat weight_total(0);
  Bounded integral = Bounded::exact(0L, work);
  Int b_total(0);
  for (index_t k = 0; k <= n; ++k) {
    const Rat weight = Rat(c.B[k]) - Rat(Int(k + V)) * c.A[k];
    weight_total += weight;
    integral = integral - ln_at(V + k) * weight;
    b_total += c.B[k];
  }
  if (weight_total != 0) throw IdentityViolation("tail integral weights do not sum to zero");
  integral = integral - Bounded::exact(b_total, work);

  const Bounded f_at_V = series_term(c, n, V, work, ln_at);
  Bounded estimate = integral - f_at_V * Rat(1, 2);

  std::optional<ErrBound> previous;
  for (unsigned q = 1; q <= kMaxTerms; ++q) {
    const Bounded even = ladder.next();  // g^{(2q-2)}(V)
    const Bounded odd = ladder.next();   // g^{(2q-1)}(V)
    Rat coeff = exact::bernoulli(2 * q) / Rat(exact::factorial(2 * q));
    estimate = estimate + even.rounded(work) * coeff;

    // 2 zeta(3) < 121/50, 2 pi > 6
    Int denom;
    mpz_ui_pow_ui(denom.get_mpz_t(), 6, 2 * q + 1);
    Rat factor(Int(121), Int(denom * 50));
    factor.canonicalize();
    const ErrBound remainder = magnitude_upper(odd).scaled(factor);
    if (remainder <= goal) return EulerMaclaurinTail{estimate, remainder, q};
    if (previous && remainder > *previous) return std::nullopt;  // past the optimal order
    previous = remainder;
  }
  return std::nullopt;
}

}  // namespace

// ---------------------------------------------------------------- L_n

Bounded L_via_log_factorials(index_t n, prec_t prec) {
  require_positive_n(n, "L_via_log_factorials");
  const prec_t work = prec + mp::kDefaultGuardBits;
  Bounded sum = Bounded::exact(0L, work);
  for (index_t j = 0; j <= n; ++j) {
    const Rat weight = -log_weight(n, j);
    if (weight == 0) continue;
    sum = sum + mp::log_factorial(n + j, prec) * weight;
  }
  return sum;
}

LogS logS_via_exponents(index_t n, prec_t prec) {
  require_positive_n(n, "logS_via_exponents");
  LogS out;
  out.d2n = exact::lcm_upto(2 * n);

  // Exponent 2 d_{2n} / j of each (n+k) factor, j = 1..n.
  std::vector<Int> per_j(n + 1);
  for (index_t j = 1; j <= n; ++j) {
    const Int numer = 2 * out.d2n;
    if (!mpz_divisible_ui_p(numer.get_mpz_t(), j)) {
      throw IdentityViolation("2 d_{2n}/j is not an integer at n = " + std::to_string(n) +
                              ", j = " + std::to_string(j));
    }
    per_j[j] = numer / j;
  }
  // suffix[i+1..n-i] via prefix sums over j
  std::vector<Int> prefix(n + 1, Int(0));
  for (index_t j = 1; j <= n; ++j) prefix[j] = prefix[j - 1] + per_j[j];

  out.exponents.assign(n + 1, Int(0));
  for (index_t k = 1; k <= n; ++k) {
    const index_t top_i = std::min(k - 1, n - k);
    for (index_t i = 0; i <= top_i; ++i) {
      const index_t j_hi = n - i;  // j runs over i+1..n-i
      if (j_hi < i + 1) continue;
      out.exponents[k] += squared_binomial(n, i) * (prefix[j_hi] - prefix[i]);
      out.triples += j_hi - i;
    }
  }

  Bounded sum = Bounded::exact(0L, prec);
  for (index_t k = 1; k <= n; ++k) {
    if (out.exponents[k] == 0) continue;
    sum = sum + mp::ln_int(static_cast<unsigned long>(n + k), prec) * out.exponents[k];
  }
  out.value = std::move(sum);
  return out;
}

Bounded L_via_logS(index_t n, prec_t prec) {
  require_positive_n(n, "L_via_logS");
  const prec_t work = prec + mp::kDefaultGuardBits + bit_length(exact::lcm_upto(2 * n));
  LogS s = logS_via_exponents(n, work);
  return s.value / s.d2n;
}

Consistency compare(const Bounded& a, const Bounded& b) {
  Consistency out;
  out.abs_diff = mp::abs_diff_upper(a.value, b.value);
  out.budget = a.err + b.err;
  out.pass = out.abs_diff <= out.budget;
  const Bounded diff = mp::abs(a - b);
  if (b.value.is_zero()) {
    out.relative_diff = diff;
  } else {
    out.relative_diff = diff / mp::abs(b);
  }
  return out;
}

Consistency L_consistency(index_t n, prec_t prec) {
  return compare(L_via_log_factorials(n, prec), L_via_logS(n, prec));
}

// ---------------------------------------------------------------- I_n

prec_t closed_form_floor(index_t n) { return 6 * static_cast<prec_t>(n) + 64; }

Bounded I_via_closed_form(index_t n, prec_t prec) {
  require_positive_n(n, "I_via_closed_form");
  const prec_t floor = closed_form_floor(n);
  if (prec < floor) {
    throw PrecisionInsufficient("closed form for I_n needs at least " + std::to_string(floor) +
                                    " bits at n = " + std::to_string(n),
                                floor - prec);
  }
  const prec_t work = prec + mp::kDefaultGuardBits;
  const Bounded gamma_part = mp::euler_gamma(prec) * exact::binomial(2 * n, n);
  return gamma_part + L_via_log_factorials(n, prec) - Bounded::exact(exact::A_exact(n), work);
}

ErrBound majorant_tail(index_t n, index_t V) {
  if (V == 0) throw DomainError("majorant_tail: V must be >= 1");
  const Int nf = exact::factorial(n);
  Int denom;
  mpz_ui_pow_ui(denom.get_mpz_t(), V, 2 * n);
  denom *= Int(2 * n + 1) * Int(2 * n);
  Rat bound(nf * nf, denom);
  bound.canonicalize();
  return ErrBound::upper(bound);
}

Bounded I_series_partial(index_t n, index_t V, prec_t prec) {
  require_positive_n(n, "I_series_partial");
  const ScaledCoeffs c = scaled_coeffs(n);
  std::vector<Bounded> logs;
  const index_t first = n + 1;
  for (index_t m = first; m <= V + n; ++m) logs.push_back(mp::ln_int(static_cast<unsigned long>(m), prec));
  auto ln_at = [&](index_t m) -> const Bounded& { return logs[m - first]; };

  Bounded sum = Bounded::exact(0L, prec);
  for (index_t v = n + 1; v <= V; ++v) sum = sum + series_term(c, n, v, prec, ln_at);
  return sum;
}

SeriesValue I_via_series(index_t n, const ErrBound& target_eps, TailMode mode) {
  require_positive_n(n, "I_via_series");
  if (target_eps.is_zero()) throw DomainError("I_via_series: target_eps must be > 0");
  const ErrBound half = target_eps.scaled_pow2(-1);
  const double log2_half = static_cast<double>(half.log2_floor());

  // Majorant cutoff: (n!)^2 V^-2n / ((2n+1) 2n) <= eps/2.
  const double log2_nf2 = 2.0 * log2_of(exact::factorial(n));
  const double log2_den = std::log2((2.0 * n + 1) * 2.0 * n);
  const double log2_v = (log2_nf2 - log2_den - log2_half) / (2.0 * n);
  constexpr double kMajorantLimit = 4096;
  const bool majorant_ok = log2_v <= std::log2(kMajorantLimit);

  if (mode == TailMode::automatic) mode = majorant_ok ? TailMode::majorant : TailMode::euler_maclaurin;

  index_t V = 0;
  ErrBound tail_bound;
  if (mode == TailMode::majorant) {
    if (log2_v > 31) throw DomainError("I_via_series: majorant cutoff exceeds 2^31; use Euler-Maclaurin");
    V = std::max<index_t>(n, static_cast<index_t>(std::ceil(std::exp2(log2_v))));
    while (majorant_tail(n, V) > half) ++V;
    tail_bound = majorant_tail(n, V);
  } else {
    V = std::max<index_t>(32, 2 * n + 2);
  }

  const ScaledCoeffs c = scaled_coeffs(n);
  prec_t work = static_cast<prec_t>(std::ceil(std::log2(static_cast<double>(V) + 1) +
                                              log2_term_scale(n, V) - log2_half)) +
                mp::kDefaultGuardBits;

  for (int attempt = 0; attempt < 8; ++attempt) {
    std::optional<EulerMaclaurinTail> em;
    if (mode == TailMode::euler_maclaurin) {
      // Larger V converges faster; double until the remainder fits.
      for (int grow = 0; grow < 12 && !em; ++grow) {
        em = euler_maclaurin_tail(c, n, V, work, half.scaled_pow2(-1));
        if (!em) V *= 2;
      }
      if (!em) throw PrecisionInsufficient("Euler-Maclaurin tail did not reach the target", 0);
      tail_bound = em->remainder;
    }

    Bounded sum = I_series_partial(n, V, work);
    if (em) sum = sum + em->estimate;
    ErrBound rounding = sum.err;
    if (rounding <= half) {
      sum.err += tail_bound;
      SeriesValue out{std::move(sum), TailBound{V, tail_bound, mode, em ? em->terms : 0U}, work};
      return out;
    }
    work += std::max<prec_t>(64, rounding.log2_floor() - half.log2_floor() + 8);
  }
  throw PrecisionInsufficient("I_via_series: rounding budget not met", 0);
}

ErrBound relative_series_target(index_t n, prec_t bits) {
  // I_n > 0.5 / (n 16^n) for every n >= 1.
  const long n_bits = static_cast<long>(std::ceil(std::log2(static_cast<double>(n))));
  return ErrBound::pow2(-bits - 1 - 4L * n - n_bits);
}

// ---------------------------------------------------------------- gamma

GammaRoundTrip gamma_roundtrip(index_t n, prec_t prec) {
  require_positive_n(n, "gamma_roundtrip");
  const Int central = exact::binomial(2 * n, n);
  // I_n error budget 2^-prec C(2n,n) / 4 keeps the estimate near 2^-prec.
  const ErrBound eps = ErrBound::pow2(-prec - 2).scaled(Rat(central));
  const SeriesValue series = I_via_series(n, eps);
  const prec_t work = std::max(series.precision, prec + mp::kDefaultGuardBits);

  const Bounded numer =
      series.value + Bounded::exact(exact::A_exact(n), work) - L_via_log_factorials(n, prec);
  GammaRoundTrip out;
  out.estimate = numer / central;
  out.reference = mp::euler_gamma(prec);
  out.abs_diff = mp::abs_diff_upper(out.estimate.value, out.reference.value);
  out.agrees = mp::consistent(out.estimate, out.reference);
  return out;
}

// ---------------------------------------------------------------- criterion

Bounded criterion_threshold(prec_t prec) {
  return mp::pi_const(prec) / (mp::ln2_const(prec) * Int(6));
}

prec_t criterion_precision(index_t n, prec_t frac_bits, prec_t guard) {
  return bit_length(exact::lcm_upto(2 * n)) + 2 * static_cast<prec_t>(n) + frac_bits + guard;
}

Criterion Q_criterion_at(index_t n, prec_t prec) {
  require_positive_n(n, "Q_criterion");
  LogS s = logS_via_exponents(n, prec);
  mp::FracPart fp = mp::frac_part_certified(s.value);

  Int scale_num;
  mpz_ui_pow_ui(scale_num.get_mpz_t(), 16, n);
  scale_num *= n;
  Rat scale(scale_num, s.d2n);
  scale.canonicalize();

  Criterion out;
  out.n = n;
  out.d2n = s.d2n;
  out.floor_logS = fp.floor;
  out.frac_logS = fp.frac;
  out.precision = prec;
  out.Q = Bounded::exact(Rat(0), prec) + fp.frac * scale;
  out.dist_zero = mp::abs(out.Q);
  out.dist_threshold = mp::abs(out.Q - criterion_threshold(prec));
  return out;
}

Criterion Q_criterion(index_t n, prec_t frac_bits, const mp::PrecisionPolicy& policy) {
  const ErrBound wanted = ErrBound::pow2(-frac_bits);
  return mp::with_escalation(policy, criterion_precision(n, frac_bits, policy.guard_bits),
                             [&](prec_t p) {
                               Criterion c = Q_criterion_at(n, p);
                               if (c.frac_logS.err > wanted) {
                                 throw PrecisionInsufficient("fractional part below requested bits", 1);
                               }
                               return c;
                             });
}

// ---------------------------------------------------------------- probes

Bounded Snr_probe(index_t n, index_t r, prec_t prec) {
  require_positive_n(n, "Snr_probe");
  if (r == 0) throw DomainError("Snr_probe: r must be >= 1");
  const prec_t work = prec + mp::kDefaultGuardBits + 2 * static_cast<prec_t>(n) + 16;

  // ln m for m = n+r+1 .. 2n+r, and cumulative sums so that
  // ln((n+j+r)!) - ln((n+r)!) = cumulative[j].
  std::vector<Bounded> logs;
  std::vector<Bounded> cumulative{Bounded::exact(0L, work)};
  for (index_t j = 1; j <= n; ++j) {
    logs.push_back(mp::ln_int(static_cast<unsigned long>(n) + r + j, work));
    cumulative.push_back(cumulative.back() + logs.back());
  }
  const Bounded ln_base = mp::ln_int(static_cast<unsigned long>(n) + r, work);

  // The log-factorial weights sum to zero, so ln((n+r)!) drops out exactly.
  Rat weight_total(0);
  Bounded sum = Bounded::exact(0L, work);
  for (index_t j = 0; j <= n; ++j) {
    const Rat weight = log_weight(n, j);
    weight_total += weight;
    const Bounded& ln_m = j == 0 ? ln_base : logs[j - 1];
    sum = sum + cumulative[j] * weight + ln_m * squared_binomial(n, j);
  }
  if (weight_total != 0) throw IdentityViolation("S_n(r) weights do not sum to zero");
  return sum;
}

Bounded A_float(index_t n, prec_t prec) {
  require_positive_n(n, "A_float");
  const prec_t work = prec + mp::kDefaultGuardBits;
  std::vector<Bounded> h{Bounded::exact(0L, work)};
  for (index_t m = 1; m <= 2 * n; ++m) {
    h.push_back(h.back() + Bounded::exact(Rat(Int(1), Int(m)), work));
  }
  Bounded sum = Bounded::exact(0L, work);
  for (index_t j = 0; j <= n; ++j) sum = sum + h[n + j] * squared_binomial(n, j);
  return sum;
}

// ---------------------------------------------------------------- record

SeqRecord build_record(index_t n, const mp::PrecisionPolicy& policy,
                       const std::optional<ErrBound>& tail_eps) {
  require_positive_n(n, "build_record");
  const auto started = std::chrono::steady_clock::now();
  const prec_t p = policy.target_bits + policy.guard_bits;

  SeqRecord rec;
  rec.n = n;
  rec.A = exact::A_exact(n);
  rec.d2n = exact::lcm_upto(2 * n);

  rec.L_logfact = L_via_log_factorials(n, p);
  rec.L_logS = L_via_logS(n, p);
  rec.L_consistent = compare(rec.L_logfact, rec.L_logS).pass;

  const prec_t closed_p = closed_form_floor(n) + policy.target_bits;
  rec.I_closed = I_via_closed_form(n, closed_p);
  const SeriesValue series =
      I_via_series(n, tail_eps ? *tail_eps : relative_series_target(n, policy.target_bits));
  rec.I_series = series.value;
  rec.tail_cutoff = series.tail.V;
  rec.tail_bound = series.tail.bound;
  rec.I_consistent = mp::consistent(rec.I_closed, rec.I_series);
  rec.precision_used = std::max({p, closed_p, series.precision});

  try {
    const Criterion crit = Q_criterion(n, policy.target_bits, policy);
    rec.logS = logS_via_exponents(n, crit.precision).value;
    rec.frac_logS = crit.frac_logS;
    rec.Q = crit.Q;
    rec.dist_Q_zero = crit.dist_zero;
    rec.dist_Q_threshold = crit.dist_threshold;
    rec.precision_used = std::max(rec.precision_used, crit.precision);
    rec.has_criterion = true;
  } catch (const PrecisionInsufficient& e) {
    rec.status = std::string("precision-insufficient: criterion: ") + e.what();
  }

  if (!rec.L_consistent) rec.status = "L cross-check failed";
  if (!rec.I_consistent) rec.status = "I cross-check failed";
  rec.elapsed = std::chrono::steady_clock::now() - started;
  return rec;
}

}  // namespace gammalab::seq
