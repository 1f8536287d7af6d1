#include "gammalab/asymptotics.hpp"

#include <cmath>

#include "gammalab/errors.hpp"
#include "gammalab/sequences.hpp"

namespace gammalab::asym {
namespace {

constexpr mp::prec_t kWork = kModelBits + mp::kDefaultGuardBits;

Bounded exact(const Rat& q) { return Bounded::exact(q, kWork); }
Bounded exact(const Int& z) { return Bounded::exact(z, kWork); }

Int pow_ui(unsigned long base, unsigned long exp) {
  Int out;
  mpz_ui_pow_ui(out.get_mpz_t(), base, exp);
  return out;
}

// 4^n / sqrt(pi n)
Bounded central_model(index_t n) {
  return exact(pow_ui(4, n)) / mp::sqrt(mp::pi_const(kWork) * Int(n));
}

Bounded ln_rat(const Rat& q) { return mp::ln(exact(q)); }

Row make_row(index_t n, Bounded model, Bounded measured) {
  Row row;
  row.n = n;
  row.ratio = measured / model;
  row.model = std::move(model);
  row.measured = std::move(measured);
  return row;
}

void require_positive_n(index_t n) {
  if (n == 0) throw DomainError("asymptotic ratios need n >= 1");
}

}  // namespace

std::string_view law_id(Law law) {
  switch (law) {
    case Law::i_decay: return "i_decay";
    case Law::l_binomial: return "l_binomial";
    case Law::a_leading: return "a_leading";
    case Law::lcm_growth: return "lcm_growth";
    case Law::centered_squares: return "centered_squares";
    case Law::central_binomial: return "central_binomial";
    case Law::l_leading: return "l_leading";
  }
  return "unknown";
}

std::optional<Law> parse_law(std::string_view id) {
  for (Law law : kAllLaws) {
    if (law_id(law) == id) return law;
  }
  return std::nullopt;
}

bool report_only(Law law) { return law == Law::lcm_growth; }

Row ratio_I_decay(index_t n) {
  require_positive_n(n);
  const seq::SeriesValue I = seq::I_via_series(n, seq::relative_series_target(n, kModelBits));
  const Bounded measured = I.value.rounded(kWork) * Int(pow_ui(16, n) * n);
  return make_row(n, seq::criterion_threshold(kWork), measured);
}

Row ratio_L_binomial(index_t n) {
  require_positive_n(n);
  const Int central = exact::binomial(2 * n, n);
  const Bounded L = seq::L_via_log_factorials(n, kWork).rounded(kWork);
  Rat three_halves_n(Int(3 * Int(n)), Int(2));
  three_halves_n.canonicalize();
  const Bounded log_model = ln_rat(three_halves_n);
  Row row = make_row(n, log_model * central, L);
  row.residual = (L / central - log_model) * Int(n);
  return row;
}

Row ratio_A_leading(index_t n) {
  require_positive_n(n);
  const Bounded A = n <= kExactAMax ? exact(exact::A_exact(n)) : seq::A_float(n, kWork).rounded(kWork);
  const Bounded bracket = mp::euler_gamma(kWork) + ln_rat(Rat(3, 2)) + mp::ln_int(n, kWork);
  return make_row(n, central_model(n) * bracket, A);
}

Row ratio_L_leading(index_t n) {
  require_positive_n(n);
  const Bounded L = seq::L_via_log_factorials(n, kWork).rounded(kWork);
  const Bounded bracket = ln_rat(Rat(3, 2)) + mp::ln_int(n, kWork);
  return make_row(n, central_model(n) * bracket, L);
}

Row ratio_central_binomial(index_t n) {
  require_positive_n(n);
  return make_row(n, central_model(n), exact(exact::binomial(2 * n, n)));
}

Row lcm_growth_ratio(index_t n) {
  require_positive_n(n);
  return make_row(n, exact(Int(2 * Int(n))), mp::ln_int(exact::lcm_upto(2 * n), kWork));
}

Row centered_square_ratio(index_t n) {
  require_positive_n(n);
  const Rat scaled = exact::centered_square_sum(n) * Rat(Int(8) * n);
  return make_row(n, exact(exact::binomial(2 * n, n)), exact(scaled));
}

Row evaluate(Law law, index_t n) {
  switch (law) {
    case Law::i_decay: return ratio_I_decay(n);
    case Law::l_binomial: return ratio_L_binomial(n);
    case Law::a_leading: return ratio_A_leading(n);
    case Law::lcm_growth: return lcm_growth_ratio(n);
    case Law::centered_squares: return centered_square_ratio(n);
    case Law::central_binomial: return ratio_central_binomial(n);
    case Law::l_leading: return ratio_L_leading(n);
  }
  throw DomainError("unknown law");
}

AitkenResult aitken_limit(std::span<const std::pair<double, double>> series) {
  if (series.size() < 3) throw DomainError("aitken_limit needs at least three points");
  const double x0 = series[series.size() - 3].second;
  const double x1 = series[series.size() - 2].second;
  const double x2 = series[series.size() - 1].second;
  const double d1 = x1 - x0;
  const double d2 = x2 - x1;
  const double dd = d2 - d1;
  const double scale = std::max({std::fabs(x0), std::fabs(x1), std::fabs(x2), 1e-300});
  if (!std::isfinite(dd) || std::fabs(dd) <= 64 * 2.220446049250313e-16 * scale) {
    return {x2, true};
  }
  return {x2 - d2 * d2 / dd, false};
}

Trend summarize(Law law, std::span<const Row> rows) {
  Trend trend;
  trend.report_only = report_only(law);
  if (rows.empty()) return trend;
  auto distance = [](const Row& r) { return std::fabs(r.ratio.value.to_double() - 1.0); };
  trend.closer_at_high_end = rows.size() >= 2 && distance(rows.back()) < distance(rows.front());
  trend.monotone = true;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (distance(rows[i]) > distance(rows[i - 1])) trend.monotone = false;
  }
  if (rows.size() >= 3) {
    std::vector<std::pair<double, double>> points;
    for (const Row& r : rows) points.emplace_back(r.n, r.ratio.value.to_double());
    trend.aitken = aitken_limit(points);
  }
  return trend;
}

ConvergenceReport convergence_report(Law law, std::span<const index_t> ns) {
  ConvergenceReport report{law, {}, {}};
  for (index_t n : ns) report.rows.push_back(evaluate(law, n));
  std::sort(report.rows.begin(), report.rows.end(),
            [](const Row& a, const Row& b) { return a.n < b.n; });
  report.trend = summarize(law, report.rows);
  return report;
}

}  // namespace gammalab::asym
