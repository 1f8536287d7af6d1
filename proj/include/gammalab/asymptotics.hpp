#pragma once

// Ratio-to-model series for the asymptotic laws around I_n, L_n and A_n.
// A "~" claim is checked as a trend (|ratio - 1| shrinking between two n)
// plus an Aitken extrapolation of the ratio sequence; no fixed tolerance is
// attached to any single n.

#include <optional>
#include <span>
#include <string_view>
#include <utility>
#include <vector>

#include "gammalab/exact.hpp"
#include "gammalab/mp.hpp"

namespace gammalab::asym {

using mp::Bounded;

// Models are evaluated at this precision (plus guard bits).
inline constexpr mp::prec_t kModelBits = 128;

enum class Law {
  i_decay,           // I_n n 16^n / (pi / (6 ln 2))
  l_binomial,        // L_n / (C(2n,n) ln(3n/2)), residual n (L_n/C(2n,n) - ln(3n/2))
  a_leading,         // A_n / ((4^n / sqrt(pi n)) (gamma + ln(3/2) + ln n))
  lcm_growth,        // ln(d_{2n}) / (2n), report only
  centered_squares,  // 8n sum_j C(n,j)^2 (1/2 - j/n)^2 / C(2n,n)
  central_binomial,  // C(2n,n) sqrt(pi n) / 4^n
  l_leading,         // L_n / ((4^n / sqrt(pi n)) (ln(3/2) + ln n))
};

inline constexpr Law kAllLaws[] = {Law::i_decay,          Law::l_binomial,       Law::a_leading,
                                   Law::lcm_growth,       Law::centered_squares, Law::central_binomial,
                                   Law::l_leading};

std::string_view law_id(Law law);
std::optional<Law> parse_law(std::string_view id);
bool report_only(Law law);

struct Row {
  index_t n = 0;
  Bounded model;
  Bounded measured;
  Bounded ratio;
  std::optional<Bounded> residual;
};

Row ratio_I_decay(index_t n);
Row ratio_L_binomial(index_t n);
Row ratio_A_leading(index_t n);
Row ratio_L_leading(index_t n);
Row ratio_central_binomial(index_t n);
Row lcm_growth_ratio(index_t n);
Row centered_square_ratio(index_t n);

Row evaluate(Law law, index_t n);

// A_n exactly up to this n, by floating summation beyond.
inline constexpr index_t kExactAMax = 300;

struct AitkenResult {
  double limit = 0;
  bool degenerate = false;  // second difference vanished; limit is the last raw value
};

// Aitken delta-squared on the last three points of (n, value).
// Throws DomainError with fewer than three points.
AitkenResult aitken_limit(std::span<const std::pair<double, double>> series);

struct Trend {
  bool closer_at_high_end = false;  // |ratio(n_last) - 1| < |ratio(n_first) - 1|
  bool monotone = false;            // |ratio - 1| non-increasing along the rows
  std::optional<AitkenResult> aitken;
  bool report_only = false;
};

struct ConvergenceReport {
  Law law;
  std::vector<Row> rows;  // ordered by n
  Trend trend;
};

Trend summarize(Law law, std::span<const Row> rows);
ConvergenceReport convergence_report(Law law, std::span<const index_t> ns);

}  // namespace gammalab::asym
