#include <gtest/gtest.h>

#include <cmath>

#include "gammalab/errors.hpp"
#include "gammalab/sequences.hpp"
#include "oracles.hpp"

using namespace gammalab;
using namespace gammalab::seq;
using mp::Bounded;
using mp::ErrBound;

namespace {

// Reference values from an independent 200-digit evaluation.
constexpr const char* kI1 = "0.0407256909229563400474884230811579982353";
constexpr const char* kI2 = "0.00134727210653142766153431334438444198176";
constexpr const char* kL3 = "32.0390776021077386836484040922875799331";
constexpr const char* kL10 = "505909.170094053944681943100732957445527";

Rat decimal(const std::string& s) {
  const auto dot = s.find('.');
  std::string digits = s.substr(0, dot) + s.substr(dot + 1);
  Rat q;
  q.get_num().set_str(digits, 10);
  mpz_ui_pow_ui(q.get_den().get_mpz_t(), 10, s.size() - dot - 1);
  q.canonicalize();
  return q;
}

Rat exact_of(const mp::BigFloat& x) {
  Rat q;
  mpfr_get_q(q.get_mpq_t(), x.get());
  return q;
}

Rat pow10(int e) {
  Rat q = 1;
  mpz_ui_pow_ui(q.get_den().get_mpz_t(), 10, e);
  return q;
}

bool agrees_to_digits(const Bounded& x, const Rat& ref, int digits) {
  return abs(exact_of(x.value) - ref) <= pow10(digits) * ::abs(ref);
}

}  // namespace

TEST(L, ClosedFormsAtSmallN) {
  const Rat ln2 = oracle::ln2_rational(200), ln3 = oracle::ln3_rational(200);
  EXPECT_TRUE(agrees_to_digits(L_via_log_factorials(1, 160), Rat(2 * ln2), 30));
  EXPECT_TRUE(agrees_to_digits(L_via_logS(1, 160), Rat(2 * ln2), 30));
  const Rat three_ln12 = 3 * (2 * ln2 + ln3);
  EXPECT_TRUE(agrees_to_digits(L_via_log_factorials(2, 160), three_ln12, 30));
  EXPECT_TRUE(agrees_to_digits(L_via_logS(2, 160), three_ln12, 30));
  EXPECT_TRUE(agrees_to_digits(L_via_log_factorials(3, 192), decimal(kL3), 36));
  EXPECT_TRUE(agrees_to_digits(L_via_log_factorials(10, 192), decimal(kL10), 36));
}

TEST(LogS, SmallN) {
  const Rat ln2 = oracle::ln2_rational(200), ln3 = oracle::ln3_rational(200);
  const LogS s1 = logS_via_exponents(1, 160);
  EXPECT_EQ(s1.d2n, 2);
  EXPECT_EQ(s1.exponents[1], 4);  // S_1 = 2^4
  EXPECT_TRUE(agrees_to_digits(s1.value, Rat(4 * ln2), 40));
  const LogS s2 = logS_via_exponents(2, 160);
  EXPECT_EQ(s2.exponents[1], 36);  // base 3: 24 + 12
  EXPECT_EQ(s2.exponents[2], 36);  // base 4: 24 + 12
  EXPECT_TRUE(agrees_to_digits(s2.value, Rat(36 * (2 * ln2 + ln3)), 40));
}

TEST(LogS, ExponentsIntegralUpTo100) {
  for (index_t n = 1; n <= 100; n += 3) ASSERT_NO_THROW(logS_via_exponents(n, 96)) << n;
}

TEST(L, CrossMethodUpTo30) {
  for (index_t n = 1; n <= 30; ++n) {
    const Consistency c = L_consistency(n, 192);
    ASSERT_TRUE(c.pass) << n;
  }
  const Consistency c10 = L_consistency(10, 192);
  EXPECT_LE(c10.relative_diff.value.to_double(), std::ldexp(1.0, -(192 - 64)));
}

TEST(IClosed, SmallN) {
  EXPECT_TRUE(agrees_to_digits(I_via_closed_form(1, closed_form_floor(1) + 128), decimal(kI1), 36));
  EXPECT_TRUE(agrees_to_digits(I_via_closed_form(2, closed_form_floor(2) + 128), decimal(kI2), 36));
  EXPECT_THROW(I_via_closed_form(10, closed_form_floor(10) - 1), PrecisionInsufficient);
}

TEST(ISeries, MatchesClosedFormUpTo20) {
  Bounded prev;
  for (index_t n = 1; n <= 20; ++n) {
    const SeriesValue s = I_via_series(n, relative_series_target(n, 100));
    const Bounded closed = I_via_closed_form(n, closed_form_floor(n) + 128);
    ASSERT_TRUE(mp::consistent(s.value, closed)) << n;
    ASSERT_GT(s.value.value.sign(), 0);
    if (n > 1) ASSERT_LT(s.value.value.to_double(), prev.value.to_double());
    prev = s.value;
  }
}

TEST(ISeries, OneTo30Digits) {
  const SeriesValue s = I_via_series(1, ErrBound::pow2(-120));
  EXPECT_TRUE(agrees_to_digits(s.value, decimal(kI1), 31));
  const SeriesValue loose = I_via_series(1, ErrBound::from_double(1e-12));
  EXPECT_TRUE(loose.value.contains(decimal(kI1)) || loose.value.err <= ErrBound::from_double(1e-12));
  EXPECT_TRUE(mp::consistent(loose.value, I_via_closed_form(1, 192)));
}

TEST(ISeries, MajorantModeMatches) {
  const SeriesValue m = I_via_series(3, ErrBound::from_double(1e-18), TailMode::majorant);
  EXPECT_EQ(m.tail.mode, TailMode::majorant);
  const SeriesValue e = I_via_series(3, ErrBound::from_double(1e-18), TailMode::euler_maclaurin);
  EXPECT_EQ(e.tail.mode, TailMode::euler_maclaurin);
  EXPECT_TRUE(mp::consistent(m.value, e.value));
}

TEST(ISeries, TailCertificate) {
  for (index_t n : {1u, 2u, 5u, 10u, 20u}) {
    const index_t V = 64;
    const Bounded a = I_series_partial(n, V, 192);
    const Bounded b = I_series_partial(n, 2 * V, 192);
    const ErrBound claimed = majorant_tail(n, V);
    const ErrBound moved = mp::abs_diff_upper(a.value, b.value);
    EXPECT_TRUE(moved <= claimed + a.err + b.err) << n;
    // the Euler-Maclaurin estimate also stays within its bound
    const SeriesValue s = I_via_series(n, relative_series_target(n, 80));
    const SeriesValue t = I_via_series(n, relative_series_target(n, 160));
    EXPECT_TRUE(mp::consistent(s.value, t.value)) << n;
  }
}

TEST(ISeries, FiveNearAsymptote) {
  const SeriesValue s = I_via_series(5, relative_series_target(5, 64));
  const double ratio = s.value.value.to_double() * 5 * std::pow(16.0, 5) /
                       (M_PI / (6 * std::log(2.0)));
  EXPECT_NEAR(ratio, 1.0, 0.25);
}

TEST(GammaRoundTrip, AllSmallN) {
  for (index_t n = 1; n <= 20; ++n) ASSERT_TRUE(gamma_roundtrip(n, 192).agrees) << n;
  const GammaRoundTrip r = gamma_roundtrip(1, 192);
  EXPECT_EQ(r.estimate.to_decimal(6), "0.577216");
}

TEST(GammaRoundTrip, TwentyAt512Bits) {
  const GammaRoundTrip r = gamma_roundtrip(20, 512);
  EXPECT_TRUE(r.agrees);
  EXPECT_TRUE(r.abs_diff <= ErrBound::from_double(1e-30));
  const GammaRoundTrip coarse = gamma_roundtrip(20, 256);
  EXPECT_TRUE(r.estimate.err <= coarse.estimate.err);
}

TEST(Criterion, SmallN) {
  const Criterion c1 = Q_criterion(1, 64);
  EXPECT_EQ(c1.floor_logS, 2);
  EXPECT_EQ(c1.frac_logS.to_decimal(7), "0.7725887");
  EXPECT_EQ(c1.Q.to_decimal(7), "6.18071");
  const Criterion c2 = Q_criterion(2, 64);
  EXPECT_EQ(c2.floor_logS, 89);
  EXPECT_EQ(c2.frac_logS.to_decimal(6), "0.456639");
  EXPECT_EQ(c2.Q.to_decimal(7), "19.48328");
  EXPECT_EQ(Q_criterion(3, 64).Q.to_decimal(9), "70.5855747");
  EXPECT_EQ(Q_criterion(10, 64).Q.to_decimal(12), "12212.1770083");
  const Bounded thr = criterion_threshold(128);
  EXPECT_TRUE(mp::consistent(c1.dist_threshold, mp::abs(c1.Q - thr)));
}

TEST(Criterion, PrecisionDoublingAgrees) {
  for (index_t n = 1; n <= 40; n += 3) {
    const prec_t p = criterion_precision(n, 64);
    const Criterion a = Q_criterion_at(n, p);
    const Criterion b = Q_criterion_at(n, 2 * p);
    EXPECT_TRUE(mp::abs_diff_upper(a.frac_logS.value, b.frac_logS.value) <= ErrBound::pow2(-56)) << n;
  }
}

TEST(Snr, SmallNLimits) {
  const Bounded s = Snr_probe(1, 1000, 128);
  EXPECT_NEAR(s.value.to_double(), std::log(1001.0 / 1002.0), 1e-15);
  EXPECT_EQ(s.to_decimal(4), "-0.0009985");
  auto mag = [](index_t n, index_t r) { return std::fabs(Snr_probe(n, r, 160).value.to_double()); };
  EXPECT_LT(mag(1, 1000000), mag(1, 1000));
  EXPECT_LT(mag(1, 1000), mag(1, 10));
  for (index_t n : {1u, 2u, 3u, 5u}) {
    EXPECT_LT(mag(n, 1000), mag(n, 100)) << n;
    EXPECT_LT(mag(n, 10000), mag(n, 1000)) << n;
  }
}

TEST(AFloat, MatchesExact) {
  EXPECT_TRUE(A_float(1, 128).contains(Rat(5, 2)));
  Rat a2(131, 12);
  EXPECT_TRUE(A_float(2, 128).contains(a2));
  const Bounded a300 = A_float(300, 192);
  EXPECT_TRUE(a300.contains(exact::A_exact(300)));
  const double rel = a300.err.to_double() / a300.value.to_double();
  EXPECT_LE(rel, std::ldexp(1.0, -(192 - 64 - 9)));
}

TEST(Record, SmallN) {
  mp::PrecisionPolicy policy;
  const SeqRecord r1 = build_record(1, policy);
  EXPECT_EQ(r1.status, "ok");
  EXPECT_EQ(r1.A, Rat(5, 2));
  EXPECT_EQ(r1.L_logfact.to_decimal(7), "1.386294");
  EXPECT_EQ(r1.I_series.to_decimal(6), "0.0407257");
  EXPECT_EQ(r1.Q.to_decimal(6), "6.18071");
  EXPECT_TRUE(r1.L_consistent && r1.I_consistent && r1.has_criterion);
  const SeqRecord r2 = build_record(2, policy);
  EXPECT_EQ(r2.A, Rat(131, 12));
  EXPECT_EQ(r2.L_logfact.to_decimal(7), "7.45472");
  EXPECT_EQ(r2.I_series.to_decimal(5), "0.0013473");
}

TEST(Record, Deterministic) {
  mp::PrecisionPolicy policy;
  const SeqRecord a = build_record(7, policy), b = build_record(7, policy);
  EXPECT_EQ(a.L_logfact.value, b.L_logfact.value);
  EXPECT_EQ(a.L_logfact.err, b.L_logfact.err);
  EXPECT_EQ(a.I_series.value, b.I_series.value);
  EXPECT_EQ(a.Q.value, b.Q.value);
  EXPECT_EQ(a.tail_cutoff, b.tail_cutoff);
}
