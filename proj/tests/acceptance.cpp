// Acceptance run: one PASS/FAIL line per criterion. Exit status is the
// number of failed criteria (0 when all pass).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "gammalab/asymptotics.hpp"
#include "gammalab/cli/commands.hpp"
#include "gammalab/exact.hpp"
#include "gammalab/sequences.hpp"
#include "gammalab/verify.hpp"
#include "oracles.hpp"

using namespace gammalab;
using mp::Bounded;
using mp::ErrBound;

namespace {

// Pinned limits.
constexpr index_t kIdentityNMax = 200;
constexpr double kIdentitySeconds = 60.0;
constexpr index_t kPartialFractionNMax = 50;
constexpr unsigned kPartialFractionPoints = 5;
constexpr index_t kCoeffNMax = 60;
constexpr index_t kStirlingMMax = 200;
constexpr index_t kIntegralityNMax = 200;
constexpr index_t kLCrossNMax = 30;
constexpr mp::prec_t kLCrossBits = 192;
constexpr int kSymbolicDigits = 30;
constexpr index_t kICrossNMax = 20;
constexpr int kI1Digits = 30;
constexpr index_t kRoundTripN = 20;
constexpr mp::prec_t kRoundTripBits = 512;
constexpr int kRoundTripDigits = 30;
constexpr mp::prec_t kDualNBits = 192;
constexpr long kDualNAgreeBits = 120;
constexpr double kEq9Tolerance = 0.1;
constexpr index_t kQNMax = 60;
constexpr mp::prec_t kQFracBits = 64;
constexpr long kQAgreeBits = 32;
constexpr std::uint64_t kSeed = 20240611;

struct Outcome {
  bool pass = false;
  std::string detail;
};

Rat exact_of(const mp::BigFloat& x) {
  Rat q;
  mpfr_get_q(q.get_mpq_t(), x.get());
  return q;
}

Rat ten_to_minus(int digits) {
  Rat q = 1;
  mpz_ui_pow_ui(q.get_den().get_mpz_t(), 10, digits);
  return q;
}

// Every point of the enclosure within 10^-digits relative of ref.
bool matches_digits(const Bounded& x, const Rat& ref, int digits) {
  const Rat tol = ten_to_minus(digits) * abs(ref);
  return abs(exact_of(x.lower()) - ref) <= tol && abs(exact_of(x.upper()) - ref) <= tol;
}

Rat oracle_gamma() {
  const std::string s = oracle::gamma_decimal(120);
  Rat q;
  q.get_num().set_str(s.substr(2), 10);
  mpz_ui_pow_ui(q.get_den().get_mpz_t(), 10, 120);
  q.canonicalize();
  return q;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

Outcome criterion1() {
  const auto start = std::chrono::steady_clock::now();
  index_t bad = 0;
  for (index_t n = 1; n <= kIdentityNMax && !bad; ++n) {
    if (exact::zero_sum_weighted_residual(n) != 0 || exact::zero_sum_linear_residual(n) != 0) bad = n;
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (bad) return {false, "nonzero residual at n=" + std::to_string(bad)};
  return {secs <= kIdentitySeconds, "n<=200 all zero in " + fmt("%.2f", secs) + " s"};
}

Outcome criterion2() {
  verify::Options opt;
  opt.seed = kSeed;
  opt.partial_fraction_n_max = kPartialFractionNMax;
  opt.partial_fraction_points = kPartialFractionPoints;
  opt.coeff_n_max = kCoeffNMax;
  const verify::Report rep = verify::run_exact_suite(kCoeffNMax, opt);
  const auto& l = rep.suites.at(verify::kPartialFractions);
  const auto& c = rep.suites.at(verify::kCoeffSymmetry);
  const bool ok = l.failed == 0 && c.failed == 0 && l.passed == kPartialFractionNMax * kPartialFractionPoints &&
                  c.passed == kCoeffNMax + 1;
  return {ok, std::to_string(l.passed) + " rational points, " + std::to_string(c.passed) +
                  " coefficient sets"};
}

Outcome criterion3() {
  for (index_t m = 0; m <= kStirlingMMax; ++m) {
    if (!exact::stirling_small_k_residuals(m).all_zero()) return {false, "residual at m=" + std::to_string(m)};
    Nat sum = 0;
    for (const Nat& v : exact::stirling1_row(m).values) sum += v;
    if (sum != exact::factorial(m)) return {false, "row sum at m=" + std::to_string(m)};
  }
  return {true, "m<=200 residuals (0,0,0), row sums m!"};
}

Outcome criterion4() {
  for (index_t n = 1; n <= kIntegralityNMax; ++n) {
    try {
      exact::integrality_witness(n);
    } catch (const std::exception&) {
      return {false, "not integral at n=" + std::to_string(n)};
    }
  }
  return {true, "d_2n A_n integral for n<=200"};
}

Outcome criterion5() {
  for (index_t n = 1; n <= kLCrossNMax; ++n) {
    if (!seq::L_consistency(n, kLCrossBits).pass) return {false, "mismatch at n=" + std::to_string(n)};
  }
  const Rat ln2 = oracle::ln2_rational(256), ln3 = oracle::ln3_rational(256);
  const Rat two_ln2 = 2 * ln2, three_ln12 = 3 * (2 * ln2 + ln3);
  const bool sym = matches_digits(seq::L_via_log_factorials(1, kLCrossBits), two_ln2, kSymbolicDigits) &&
                   matches_digits(seq::L_via_logS(1, kLCrossBits), two_ln2, kSymbolicDigits) &&
                   matches_digits(seq::L_via_log_factorials(2, kLCrossBits), three_ln12, kSymbolicDigits) &&
                   matches_digits(seq::L_via_logS(2, kLCrossBits), three_ln12, kSymbolicDigits);
  return {sym, "n<=30 within budgets; 2 ln 2 and 3 ln 12 to 30 digits"};
}

Outcome criterion6() {
  for (index_t n = 1; n <= kICrossNMax; ++n) {
    const auto s = seq::I_via_series(n, seq::relative_series_target(n, 128));
    const Bounded c = seq::I_via_closed_form(n, seq::closed_form_floor(n) + 128);
    if (!mp::consistent(s.value, c)) return {false, "mismatch at n=" + std::to_string(n)};
  }
  // 2 gamma + 2 ln 2 - 5/2 from independent constants
  const Rat i1 = 2 * oracle_gamma() + 2 * oracle::ln2_rational(400) - Rat(5, 2);
  const auto s1 = seq::I_via_series(1, ErrBound::pow2(-130));
  const bool ok = matches_digits(s1.value, i1, kI1Digits);
  return {ok, "n<=20 within budgets; I_1 = " + s1.value.to_decimal(32)};
}

Outcome criterion7() {
  const seq::GammaRoundTrip rt = seq::gamma_roundtrip(kRoundTripN, kRoundTripBits);
  const bool rt_ok = rt.agrees && matches_digits(rt.estimate, oracle_gamma(), kRoundTripDigits);
  const mp::GammaEvaluation a = mp::euler_gamma_auto(kDualNBits);
  const mp::GammaEvaluation b = mp::euler_gamma_em(kDualNBits, a.log2_cutoff + 2, a.terms + 2);
  const ErrBound dual = mp::abs_diff_upper(a.value.value, b.value.value) + a.value.err + b.value.err;
  const bool dual_ok = dual <= ErrBound::pow2(-kDualNAgreeBits);
  return {rt_ok && dual_ok, "round trip |diff| " + rt.abs_diff.to_string(3) + "; dual-N spread " +
                                dual.to_string(3)};
}

Outcome criterion8() {
  const double g10 = std::fabs(asym::ratio_I_decay(10).ratio.value.to_double() - 1);
  const double g40 = std::fabs(asym::ratio_I_decay(40).ratio.value.to_double() - 1);
  return {g40 < g10 && g40 <= kEq9Tolerance,
          "|ratio-1| n=10 " + fmt("%.6g", g10) + ", n=40 " + fmt("%.6g", g40)};
}

Outcome criterion9() {
  struct Scan {
    asym::Law law;
    index_t lo, hi;
  };
  const Scan scans[] = {{asym::Law::a_leading, 50, 500},
                        {asym::Law::l_leading, 20, 200},
                        {asym::Law::l_binomial, 20, 200},
                        {asym::Law::centered_squares, 40, 400},
                        {asym::Law::central_binomial, 10, 1000}};
  std::string detail;
  bool ok = true;
  for (const Scan& s : scans) {
    const double glo = std::fabs(asym::evaluate(s.law, s.lo).ratio.value.to_double() - 1);
    const double ghi = std::fabs(asym::evaluate(s.law, s.hi).ratio.value.to_double() - 1);
    ok = ok && ghi < glo;
    detail += std::string(asym::law_id(s.law)) + " " + fmt("%.3g", glo) + "->" + fmt("%.3g", ghi) + "; ";
  }
  const std::vector<index_t> ns{10, 100, 1000};
  const auto rep = asym::convergence_report(asym::Law::lcm_growth, ns);
  ok = ok && rep.trend.report_only;
  detail += "lcm_growth report-only";
  return {ok, detail};
}

Outcome criterion10() {
  mp::PrecisionPolicy policy;
  long worst_agree = LONG_MAX;
  for (index_t n = 1; n <= kQNMax; ++n) {
    seq::Criterion c;
    try {
      c = seq::Q_criterion(n, kQFracBits, policy);
    } catch (const PrecisionInsufficient&) {
      return {false, "straddle at n=" + std::to_string(n)};
    }
    const seq::Criterion d = seq::Q_criterion_at(n, 2 * c.precision);
    if (d.floor_logS != c.floor_logS) return {false, "floor differs at n=" + std::to_string(n)};
    const ErrBound diff = mp::abs_diff_upper(c.frac_logS.value, d.frac_logS.value);
    const long agree = diff.is_zero() ? LONG_MAX : -diff.log2_floor() - 1;
    worst_agree = std::min(worst_agree, agree);
    if (!std::isfinite(c.dist_zero.value.to_double()) || !std::isfinite(c.dist_threshold.value.to_double())) {
      return {false, "distance missing at n=" + std::to_string(n)};
    }
  }
  return {worst_agree >= kQAgreeBits,
          "n<=60 certified; p vs 2p agree to >= " + std::to_string(worst_agree) + " fractional bits"};
}

Outcome criterion11() {
  const auto dir = std::filesystem::temp_directory_path() / "gammalab_acceptance";
  std::filesystem::create_directories(dir);
  cli::RunConfig c;
  c.command = "table";
  c.n_spec = "1..10";
  c.ns = cli::parse_n_spec(c.n_spec);
  std::ostringstream sink;
  std::string files[2];
  for (int i = 0; i < 2; ++i) {
    c.out = dir / ("table" + std::to_string(i) + ".csv");
    if (cli::run(c, sink, sink) != cli::kExitOk) return {false, "table run failed"};
    std::ifstream in(*c.out, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    files[i] = s.str();
  }
  std::filesystem::remove_all(dir);
  return {!files[0].empty() && files[0] == files[1], std::to_string(files[0].size()) + " bytes, identical"};
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"exact zero-sum identities, n <= 200", criterion1},
      {"partial fractions and coefficient invariants", criterion2},
      {"Stirling small-k identities and row sums, m <= 200", criterion3},
      {"integrality of d_2n A_n, n <= 200", criterion4},
      {"L_n by two methods, n <= 30", criterion5},
      {"I_n by closed form and series, n <= 20", criterion6},
      {"gamma round trip at n = 20, dual-N gamma", criterion7},
      {"I_n n 16^n asymptotic trend", criterion8},
      {"asymptotic ratio trends", criterion9},
      {"criterion quantity Q_n, n <= 60", criterion10},
      {"table determinism, n = 1..10", criterion11},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    if (!o.pass) ++failed;
    std::printf("[%s] %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(),
                o.detail.c_str());
  }
  return failed;
}
