#pragma once

// Per-n quantities of the decomposition
//   I_n = C(2n,n) gamma + L_n - A_n,
// each computed with a certified error bound, and where possible by two
// independent routes:
//
//   L_n  via the log-factorial sum, and via log S_n / d_{2n} with the
//        product S_n expanded into integer exponents;
//   I_n  via the closed form C(2n,n) gamma + L_n - A_n, and via the series
//        sum_{v>n} int_v^inf (n!/(x(x+1)...(x+n)))^2 dx with the inner
//        integral done exactly through the partial-fraction coefficients.

#include <chrono>
#include <optional>
#include <string>
#include <vector>

#include "gammalab/exact.hpp"
#include "gammalab/mp.hpp"

namespace gammalab::seq {

using mp::Bounded;
using mp::ErrBound;
using mp::prec_t;

// -(sum_j C(n,j)^2 2(H_{n-j} - H_j) ln((n+j)!))
Bounded L_via_log_factorials(index_t n, prec_t prec);

struct LogS {
  Bounded value;
  Nat d2n;
  // Exact integer exponent of (n+k) in S_n, k = 1..n (index 0 unused).
  std::vector<Int> exponents;
  std::size_t triples = 0;  // (k, i, j) triples visited
};

// log S_n. Every exponent 2 d_{2n} / j is checked to be an integer before
// use; a failure throws IdentityViolation.
LogS logS_via_exponents(index_t n, prec_t prec);

// log S_n / d_{2n}
Bounded L_via_logS(index_t n, prec_t prec);

struct Consistency {
  Bounded relative_diff;  // |a - b| / |b|
  ErrBound abs_diff;      // upper bound on |a.value - b.value|
  ErrBound budget;        // a.err + b.err
  bool pass = false;      // abs_diff <= budget
};

Consistency compare(const Bounded& a, const Bounded& b);
Consistency L_consistency(index_t n, prec_t prec);

// Working precision below which the closed form cannot resolve I_n: the
// terms are ~4^n ln(2n) while I_n ~ 16^-n / n.
prec_t closed_form_floor(index_t n);

// C(2n,n) gamma + L_n - A_n. Throws PrecisionInsufficient when
// prec < closed_form_floor(n).
Bounded I_via_closed_form(index_t n, prec_t prec);

enum class TailMode {
  automatic,       // majorant when its cutoff is small, else Euler-Maclaurin
  majorant,        // omit the tail, bound it by (n!)^2 V^-2n / ((2n+1) 2n)
  euler_maclaurin  // add an Euler-Maclaurin tail estimate with a rigorous remainder
};

struct TailBound {
  index_t V = 0;        // last summed v
  ErrBound bound;       // >= |true tail - tail estimate|
  TailMode mode = TailMode::majorant;
  unsigned em_terms = 0;  // Euler-Maclaurin correction terms (0 for majorant)
};

struct SeriesValue {
  Bounded value;  // err includes rounding and the tail bound
  TailBound tail;
  prec_t precision = 0;
};

// Upper bound of the majorant tail beyond V.
ErrBound majorant_tail(index_t n, index_t V);

// sum_{v=n+1..V} of the series terms only, at working precision `prec`;
// err covers rounding only.
Bounded I_series_partial(index_t n, index_t V, prec_t prec);

// I_n to absolute accuracy target_eps (tail <= eps/2, rounding <= eps/2).
SeriesValue I_via_series(index_t n, const ErrBound& target_eps,
                         TailMode mode = TailMode::automatic);

// Absolute target for I_n with ~bits correct bits relative to its size.
ErrBound relative_series_target(index_t n, prec_t bits);

struct GammaRoundTrip {
  Bounded estimate;   // (I_n + A_n - L_n) / C(2n,n)
  Bounded reference;  // euler_gamma
  ErrBound abs_diff;
  bool agrees = false;  // enclosures overlap
};

GammaRoundTrip gamma_roundtrip(index_t n, prec_t prec);

struct Criterion {
  index_t n = 0;
  Nat d2n;
  Int floor_logS;
  Bounded frac_logS;
  Bounded Q;               // (16^n n / d_{2n}) {log S_n}
  Bounded dist_zero;       // |Q|
  Bounded dist_threshold;  // |Q - pi/(6 ln 2)|
  prec_t precision = 0;
};

// p = bits(d_{2n}) + 2n + frac_bits + guard
prec_t criterion_precision(index_t n, prec_t frac_bits, prec_t guard = mp::kDefaultGuardBits);

// At a fixed working precision; throws PrecisionInsufficient on straddle.
Criterion Q_criterion_at(index_t n, prec_t prec);

// Auto precision with escalation per policy.
Criterion Q_criterion(index_t n, prec_t frac_bits, const mp::PrecisionPolicy& policy = {});

// S_n(r) = sum_j C(n,j)^2 (2(H_{n-j} - H_j) ln((n+j+r)!) + ln(n+j+r)).
Bounded Snr_probe(index_t n, index_t r, prec_t prec);

// A_n in floating arithmetic (harmonic numbers summed in floating point).
Bounded A_float(index_t n, prec_t prec);

// pi / (6 ln 2)
Bounded criterion_threshold(prec_t prec);

struct SeqRecord {
  index_t n = 0;
  Rat A;
  Nat d2n;
  Bounded L_logfact, L_logS, logS, I_closed, I_series, frac_logS, Q;
  Bounded dist_Q_zero, dist_Q_threshold;
  bool L_consistent = false;
  bool I_consistent = false;
  bool has_criterion = false;  // logS, frac_logS, Q and distances are set
  prec_t precision_used = 0;
  index_t tail_cutoff = 0;
  ErrBound tail_bound;
  std::string status = "ok";  // or a description of the failed step
  std::chrono::nanoseconds elapsed{0};
};

// tail_eps, when given, replaces the default absolute target of the series
// evaluation of I_n (policy.target_bits relative to the size of I_n).
SeqRecord build_record(index_t n, const mp::PrecisionPolicy& policy,
                       const std::optional<ErrBound>& tail_eps = std::nullopt);

}  // namespace gammalab::seq
