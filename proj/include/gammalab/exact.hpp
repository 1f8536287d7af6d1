#pragma once

// Exact integer/rational arithmetic and the identities around the
// decomposition I_n = C(2n,n)*gamma + L_n - A_n that hold with zero
// rounding error.

#include <cstdint>
#include <vector>

#include <gmpxx.h>

namespace gammalab {

using Nat = mpz_class;  // non-negative by contract
using Int = mpz_class;
using Rat = mpq_class;  // gmpxx keeps results canonical

using index_t = std::uint32_t;

}  // namespace gammalab

namespace gammalab::exact {

Nat factorial(index_t n);

// Throws DomainError when k > n.
Nat binomial(index_t n, index_t k);

// H_n, memoized incrementally. H_0 = 0.
const Rat& harmonic(index_t n);

// d_n = lcm(1, ..., n), memoized. Throws DomainError for n = 0.
const Nat& lcm_upto(index_t n);

// Bernoulli number B_index (B_1 = -1/2; odd indices > 1 are 0).
Rat bernoulli(index_t index);

// Row m of the unsigned Stirling numbers of the first kind, the
// coefficients of x(x+1)...(x+m-1).
struct StirlingRow {
  index_t m = 0;
  std::vector<Nat> values;  // values[k] = [m, k], k = 0..m
};

const StirlingRow& stirling1_row(index_t m);

// Residuals of the small-k closed forms
//   [m+1,0] = 0,  [m+1,1] = m!,  [m+1,2] = m! H_m.
struct StirlingResiduals {
  Rat k0, k1, k2;
  bool all_zero() const { return k0 == 0 && k1 == 0 && k2 == 0; }
};

StirlingResiduals stirling_small_k_residuals(index_t m);

// Same check against a caller-supplied row m+1 (used by the verification
// harness to prove that a corrupted table is detected).
StirlingResiduals stirling_small_k_residuals(index_t m, const StirlingRow& next_row);

// Coefficients of
//   1 / (x(x+1)...(x+n))^2 = sum_k a_k/(x+k) + sum_k b_k/(x+k)^2
// with a_k = 2(H_k - H_{n-k}) / (k!(n-k)!)^2 and b_k = 1 / (k!(n-k)!)^2.
struct PartialFractionCoeffs {
  index_t n = 0;
  std::vector<Rat> a;
  std::vector<Rat> b;
};

PartialFractionCoeffs partial_fraction_coeffs(index_t n);

// LHS - RHS of the decomposition above at x. Zero when the identity holds.
// Throws DomainError when x is a pole (0, -1, ..., -n).
Rat partial_fraction_residual(index_t n, const Rat& x);
Rat partial_fraction_residual(const PartialFractionCoeffs& coeffs, const Rat& x);

// sum_j C(n,j)^2 ((H_{n-j} - H_j)(2j - n) + 1)
Rat zero_sum_weighted_residual(index_t n);

// sum_j C(n,j)^2 (2j(H_{n-j} - H_j) + 1). Equals 1 at n = 0; the claim is
// for n >= 1 only.
Rat zero_sum_linear_residual(index_t n);

// A_n = sum_j C(n,j)^2 H_{n+j}
Rat A_exact(index_t n);

// d_{2n} * A_n; throws IdentityViolation if that is not an integer.
Int integrality_witness(index_t n);

// sum_j C(n,j)^2 (1/2 - j/n)^2, exact.
Rat centered_square_sum(index_t n);

// Snapshots and seeding of the memo tables (disk-cache support).
std::vector<Nat> lcm_table_snapshot();
void seed_lcm_table(const std::vector<Nat>& table);
std::vector<StirlingRow> stirling_table_snapshot();
void seed_stirling_table(const std::vector<StirlingRow>& rows);

}  // namespace gammalab::exact
