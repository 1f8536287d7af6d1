#include "gammalab/exact.hpp"

#include <algorithm>
#include <mutex>
#include <string>

#include "gammalab/errors.hpp"
#include "gammalab/memo.hpp"

namespace gammalab::exact {
namespace {

IncrementalTable<Rat>& harmonic_table() {
  static IncrementalTable<Rat> table([](const std::deque<Rat>& prev, std::size_t i) {
    if (i == 0) return Rat(0);
    return Rat(prev[i - 1] + Rat(1, static_cast<unsigned long>(i)));
  });
  return table;
}

// Entry 0 holds 1 (empty lcm) so the recurrence has a base; the public
// accessor rejects n = 0.
IncrementalTable<Nat>& lcm_table() {
  static IncrementalTable<Nat> table([](const std::deque<Nat>& prev, std::size_t i) {
    if (i == 0) return Nat(1);
    Nat out;
    mpz_lcm_ui(out.get_mpz_t(), prev[i - 1].get_mpz_t(), static_cast<unsigned long>(i));
    return out;
  });
  return table;
}

IncrementalTable<StirlingRow>& stirling_table() {
  static IncrementalTable<StirlingRow> table(
      [](const std::deque<StirlingRow>& prev, std::size_t i) {
        StirlingRow row;
        row.m = static_cast<index_t>(i);
        row.values.assign(i + 1, Nat(0));
        if (i == 0) {
          row.values[0] = 1;
          return row;
        }
        // [m+1, k] = m [m, k] + [m, k-1]
        const auto& up = prev[i - 1].values;
        const unsigned long m = i - 1;
        for (std::size_t k = 0; k <= i; ++k) {
          if (k < up.size()) row.values[k] = m * up[k];
          if (k >= 1) row.values[k] += up[k - 1];
        }
        return row;
      });
  return table;
}

struct BernoulliCache {
  std::mutex mutex;
  std::vector<Rat> values;  // B_0.. with B_1 = +1/2 (Akiyama-Tanigawa convention)
};

BernoulliCache& bernoulli_cache() {
  static BernoulliCache cache;
  return cache;
}

// Akiyama-Tanigawa: B^+_m for m = 0..top.
std::vector<Rat> akiyama_tanigawa(index_t top) {
  std::vector<Rat> out(top + 1);
  std::vector<Rat> row(top + 1);
  for (index_t m = 0; m <= top; ++m) {
    row[m] = Rat(1, m + 1);
    for (index_t j = m; j >= 1; --j) {
      row[j - 1] = j * (row[j - 1] - row[j]);
    }
    out[m] = row[0];
  }
  return out;
}

}  // namespace

Nat factorial(index_t n) {
  Nat out;
  mpz_fac_ui(out.get_mpz_t(), n);
  return out;
}

Nat binomial(index_t n, index_t k) {
  if (k > n) {
    throw DomainError("binomial: k = " + std::to_string(k) + " exceeds n = " + std::to_string(n));
  }
  Nat out;
  mpz_bin_uiui(out.get_mpz_t(), n, k);
  return out;
}

const Rat& harmonic(index_t n) { return harmonic_table().at(n); }

const Nat& lcm_upto(index_t n) {
  if (n == 0) throw DomainError("lcm_upto: n must be >= 1");
  return lcm_table().at(n);
}

Rat bernoulli(index_t index) {
  if (index == 1) return Rat(-1, 2);
  if (index % 2 == 1) return Rat(0);
  auto& cache = bernoulli_cache();
  std::lock_guard lock(cache.mutex);
  if (cache.values.size() <= index) {
    // Grow geometrically; the recurrence is quadratic in the top index.
    index_t top = index;
    if (!cache.values.empty()) top = std::max<index_t>(index, 2 * static_cast<index_t>(cache.values.size()));
    cache.values = akiyama_tanigawa(top);
  }
  return cache.values[index];
}

const StirlingRow& stirling1_row(index_t m) { return stirling_table().at(m); }

StirlingResiduals stirling_small_k_residuals(index_t m) {
  return stirling_small_k_residuals(m, stirling1_row(m + 1));
}

StirlingResiduals stirling_small_k_residuals(index_t m, const StirlingRow& next_row) {
  if (next_row.values.size() < 2) throw DomainError("stirling row too short");
  const Nat fact = factorial(m);
  StirlingResiduals out;
  out.k0 = Rat(next_row.values[0]);
  out.k1 = Rat(next_row.values[1] - fact);
  // Row 1 has no k = 2 entry; [1,2] = 0.
  const Nat k2 = next_row.values.size() > 2 ? next_row.values[2] : Nat(0);
  out.k2 = Rat(k2) - Rat(fact) * harmonic(m);
  return out;
}

PartialFractionCoeffs partial_fraction_coeffs(index_t n) {
  PartialFractionCoeffs out;
  out.n = n;
  out.a.resize(n + 1);
  out.b.resize(n + 1);
  for (index_t k = 0; k <= n; ++k) {
    const Nat denom_root = factorial(k) * factorial(n - k);
    const Rat b(Nat(1), Nat(denom_root * denom_root));
    out.b[k] = b;
    out.a[k] = 2 * (harmonic(k) - harmonic(n - k)) * b;
  }
  return out;
}

Rat partial_fraction_residual(index_t n, const Rat& x) {
  return partial_fraction_residual(partial_fraction_coeffs(n), x);
}

Rat partial_fraction_residual(const PartialFractionCoeffs& coeffs, const Rat& x) {
  const index_t n = coeffs.n;
  Rat product(1);
  for (index_t i = 0; i <= n; ++i) {
    const Rat shifted = x + i;
    if (shifted == 0) {
      throw DomainError("partial_fraction_residual: x = -" + std::to_string(i) + " is a pole");
    }
    product *= shifted;
  }
  Rat rhs(0);
  for (index_t k = 0; k <= n; ++k) {
    const Rat shifted = x + k;
    rhs += coeffs.a[k] / shifted + coeffs.b[k] / (shifted * shifted);
  }
  return 1 / (product * product) - rhs;
}

Rat zero_sum_weighted_residual(index_t n) {
  Rat sum(0);
  for (index_t j = 0; j <= n; ++j) {
    const Nat c = binomial(n, j);
    const long weight = 2L * j - static_cast<long>(n);
    sum += Rat(c * c) * ((harmonic(n - j) - harmonic(j)) * weight + 1);
  }
  return sum;
}

Rat zero_sum_linear_residual(index_t n) {
  Rat sum(0);
  for (index_t j = 0; j <= n; ++j) {
    const Nat c = binomial(n, j);
    sum += Rat(c * c) * (2 * j * (harmonic(n - j) - harmonic(j)) + 1);
  }
  return sum;
}

Rat A_exact(index_t n) {
  Rat sum(0);
  for (index_t j = 0; j <= n; ++j) {
    const Nat c = binomial(n, j);
    sum += Rat(c * c) * harmonic(n + j);
  }
  return sum;
}

Int integrality_witness(index_t n) {
  const Rat product = Rat(lcm_upto(2 * n)) * A_exact(n);
  if (product.get_den() != 1) {
    throw IdentityViolation("d_{2n} A_n is not an integer at n = " + std::to_string(n));
  }
  return product.get_num();
}

Rat centered_square_sum(index_t n) {
  if (n == 0) throw DomainError("centered_square_sum: n must be >= 1");
  Rat sum(0);
  for (index_t j = 0; j <= n; ++j) {
    const Nat c = binomial(n, j);
    Rat ratio{Nat(j), Nat(n)};
    ratio.canonicalize();
    const Rat offset = Rat(1, 2) - ratio;
    sum += Rat(c * c) * offset * offset;
  }
  return sum;
}

std::vector<Nat> lcm_table_snapshot() { return lcm_table().snapshot(); }
void seed_lcm_table(const std::vector<Nat>& table) { lcm_table().seed(table); }
std::vector<StirlingRow> stirling_table_snapshot() { return stirling_table().snapshot(); }
void seed_stirling_table(const std::vector<StirlingRow>& rows) { stirling_table().seed(rows); }

}  // namespace gammalab::exact
