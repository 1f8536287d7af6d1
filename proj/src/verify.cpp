#include "gammalab/verify.hpp"

#include <random>

#include "gammalab/errors.hpp"

namespace gammalab::verify {
namespace {

class Recorder {
 public:
  explicit Recorder(Report& report) : report_(report) {}

  void check(const char* identity, index_t n, bool ok, const std::string& detail = {}) {
    Counts& c = report_.suites[identity];
    if (ok) {
      ++c.passed;
      return;
    }
    ++c.failed;
    if (!report_.first_failure) report_.first_failure = Failure{identity, n, detail};
  }

 private:
  Report& report_;
};

std::string residual_detail(const Rat& r) { return "residual " + r.get_str(); }

void check_stirling(Recorder& rec, index_t m, const Options& options) {
  exact::StirlingResiduals res;
  if (options.corrupt_stirling) {
    exact::StirlingRow row = exact::stirling1_row(m + 1);
    options.corrupt_stirling(m, row);
    res = exact::stirling_small_k_residuals(m, row);
  } else {
    res = exact::stirling_small_k_residuals(m);
  }
  rec.check(kStirling, m, res.all_zero(),
            "residuals (" + res.k0.get_str() + ", " + res.k1.get_str() + ", " + res.k2.get_str() + ")");

  const exact::StirlingRow& row = exact::stirling1_row(m);
  Nat sum = 0;
  for (const Nat& v : row.values) sum += v;
  rec.check(kStirlingRowSum, m, sum == exact::factorial(m), "row sum " + sum.get_str());
}

void check_coefficients(Recorder& rec, index_t n) {
  const exact::PartialFractionCoeffs c = exact::partial_fraction_coeffs(n);
  Rat sum = 0;
  bool ok = true;
  for (index_t k = 0; k <= n; ++k) {
    sum += c.a[k];
    if (c.a[n - k] != -c.a[k] || c.b[n - k] != c.b[k] || c.b[k] <= 0) ok = false;
  }
  rec.check(kCoeffSymmetry, n, ok && sum == 0, "sum of a_k " + sum.get_str());
}

}  // namespace

std::vector<Rat> sample_points(index_t n, unsigned count, std::uint64_t seed) {
  std::mt19937_64 rng(seed ^ (0x9e3779b97f4a7c15ULL * (n + 1)));
  std::uniform_int_distribution<long> num(-4L * (n + 1), 4L * (n + 1));
  std::uniform_int_distribution<long> den(1, 97);
  std::vector<Rat> points;
  while (points.size() < count) {
    Rat x(num(rng), den(rng));
    x.canonicalize();
    const bool pole = x.get_den() == 1 && x <= 0 && x >= -static_cast<long>(n);
    if (!pole) points.push_back(x);
  }
  return points;
}

Report run_exact_suite(index_t n_max, const Options& options) {
  if (n_max == 0) throw DomainError("verification needs n_max >= 1");
  Report report;
  report.n_max = n_max;
  Recorder rec(report);

  for (index_t m = 0; m <= n_max; ++m) check_stirling(rec, m, options);

  for (index_t n = 1; n <= n_max; ++n) {
    const Rat r37 = exact::zero_sum_weighted_residual(n);
    rec.check(kZeroSumWeighted, n, r37 == 0, residual_detail(r37));
    const Rat r38 = exact::zero_sum_linear_residual(n);
    rec.check(kZeroSumLinear, n, r38 == 0, residual_detail(r38));

    bool integral = true;
    try {
      exact::integrality_witness(n);
    } catch (const IdentityViolation&) {
      integral = false;
    }
    rec.check(kIntegrality, n, integral, "d_2n * A_n not an integer");

    Nat squares = 0;
    for (index_t j = 0; j <= n; ++j) {
      const Nat c = exact::binomial(n, j);
      squares += c * c;
    }
    rec.check(kCentralBinomial, n, squares == exact::binomial(2 * n, n));
  }

  for (index_t n = 0; n <= std::min(n_max, options.coeff_n_max); ++n) check_coefficients(rec, n);

  for (index_t n = 1; n <= std::min(n_max, options.partial_fraction_n_max); ++n) {
    const exact::PartialFractionCoeffs c = exact::partial_fraction_coeffs(n);
    for (const Rat& x : sample_points(n, options.partial_fraction_points, options.seed)) {
      const Rat r = exact::partial_fraction_residual(c, x);
      rec.check(kPartialFractions, n, r == 0, "at x = " + x.get_str() + ", " + residual_detail(r));
    }
  }
  return report;
}

}  // namespace gammalab::verify
