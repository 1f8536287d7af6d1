#include <gtest/gtest.h>

#include <random>

#include "gammalab/errors.hpp"
#include "gammalab/exact.hpp"
#include "oracles.hpp"

using namespace gammalab;
using namespace gammalab::exact;

namespace {

Rat rat(long num, long den) {
  Rat q(num, den);
  q.canonicalize();
  return q;
}

}  // namespace

TEST(Factorial, SmallValues) {
  EXPECT_EQ(factorial(0), 1);
  EXPECT_EQ(factorial(1), 1);
  EXPECT_EQ(factorial(6), 720);
  Nat product = 1;
  for (index_t k = 1; k <= 40; ++k) product *= k;
  EXPECT_EQ(factorial(40), product);
}

TEST(Binomial, MatchesPascal) {
  EXPECT_EQ(binomial(7, 0), 1);
  EXPECT_EQ(binomial(4, 2), 6);
  for (index_t n = 0; n <= 30; ++n) {
    for (index_t k = 0; k <= n; ++k) EXPECT_EQ(binomial(n, k), oracle::pascal_binomial(n, k));
  }
  EXPECT_THROW(binomial(3, 4), DomainError);
}

TEST(Binomial, SumOfSquaresIsCentral) {
  for (index_t n = 0; n <= 200; ++n) {
    Nat s = 0;
    for (index_t j = 0; j <= n; ++j) s += binomial(n, j) * binomial(n, j);
    ASSERT_EQ(s, binomial(2 * n, n)) << n;
  }
}

TEST(Harmonic, Values) {
  EXPECT_EQ(harmonic(0), 0);
  EXPECT_EQ(harmonic(2), rat(3, 2));
  EXPECT_EQ(harmonic(4), rat(25, 12));
  Rat direct = 0;
  for (long k = 1; k <= 300; ++k) direct += rat(1, k);
  EXPECT_EQ(harmonic(300), direct);
}

TEST(LcmUpto, MatchesFold) {
  EXPECT_EQ(lcm_upto(1), 1);
  EXPECT_EQ(lcm_upto(6), 60);
  EXPECT_EQ(lcm_upto(10), 2520);
  for (index_t n = 1; n <= 400; n += 7) EXPECT_EQ(lcm_upto(n), oracle::lcm_fold(n)) << n;
  EXPECT_THROW(lcm_upto(0), DomainError);
}

TEST(Bernoulli, MatchesConvolutionRecurrence) {
  EXPECT_EQ(bernoulli(0), 1);
  EXPECT_EQ(bernoulli(1), rat(-1, 2));
  EXPECT_EQ(bernoulli(2), rat(1, 6));
  EXPECT_EQ(bernoulli(4), rat(-1, 30));
  EXPECT_EQ(bernoulli(7), 0);
  const auto table = oracle::bernoulli_table(120);
  for (index_t m = 0; m <= 120; ++m) ASSERT_EQ(bernoulli(m), table[m]) << m;
}

TEST(Stirling, SmallRows) {
  EXPECT_EQ(stirling1_row(2).values, (std::vector<Nat>{0, 1, 1}));
  EXPECT_EQ(stirling1_row(3).values, (std::vector<Nat>{0, 2, 3, 1}));
  EXPECT_EQ(stirling1_row(0).values, (std::vector<Nat>{1}));
}

TEST(Stirling, RowSumsAndShape) {
  for (index_t m = 1; m <= 200; ++m) {
    const StirlingRow& row = stirling1_row(m);
    ASSERT_EQ(row.values.size(), m + 1);
    EXPECT_EQ(row.values[0], 0);
    EXPECT_EQ(row.values[m], 1);
    Nat sum = 0;
    for (const Nat& v : row.values) sum += v;
    ASSERT_EQ(sum, factorial(m)) << m;
  }
}

TEST(Stirling, SmallKResiduals) {
  for (index_t m : {0u, 2u, 5u}) EXPECT_TRUE(stirling_small_k_residuals(m).all_zero()) << m;
  EXPECT_EQ(stirling1_row(6).values[2], 274);
  for (index_t m = 0; m <= 200; ++m) ASSERT_TRUE(stirling_small_k_residuals(m).all_zero()) << m;
}

TEST(Stirling, CorruptedRowIsDetected) {
  StirlingRow row = stirling1_row(8);
  row.values[2] += 1;
  const StirlingResiduals r = stirling_small_k_residuals(7, row);
  EXPECT_FALSE(r.all_zero());
  EXPECT_EQ(r.k2, 1);
}

TEST(PartialFractions, SmallCases) {
  const PartialFractionCoeffs c1 = partial_fraction_coeffs(1);
  EXPECT_EQ(c1.a, (std::vector<Rat>{-2, 2}));
  EXPECT_EQ(c1.b, (std::vector<Rat>{1, 1}));
  const PartialFractionCoeffs c2 = partial_fraction_coeffs(2);
  EXPECT_EQ(c2.b, (std::vector<Rat>{rat(1, 4), 1, rat(1, 4)}));
}

TEST(PartialFractions, SymmetryZeroSumAndScaling) {
  for (index_t n = 0; n <= 60; ++n) {
    const PartialFractionCoeffs c = partial_fraction_coeffs(n);
    Rat sum = 0;
    const Nat nf2 = factorial(n) * factorial(n);
    for (index_t k = 0; k <= n; ++k) {
      sum += c.a[k];
      ASSERT_EQ(c.a[n - k], -c.a[k]);
      ASSERT_EQ(c.b[n - k], c.b[k]);
      ASSERT_GT(c.b[k], 0);
      const Nat ck2 = binomial(n, k) * binomial(n, k);
      ASSERT_EQ(Rat(nf2 * c.b[k]), Rat(ck2));
      ASSERT_EQ(Rat(nf2 * c.a[k]), Rat(2 * ck2 * (harmonic(k) - harmonic(n - k))));
    }
    ASSERT_EQ(sum, 0) << n;
  }
}

TEST(PartialFractionResidual, HandExamplesAndPoles) {
  EXPECT_EQ(partial_fraction_residual(1, Rat(1)), 0);
  EXPECT_EQ(partial_fraction_residual(3, rat(1, 2)), 0);
  EXPECT_THROW(partial_fraction_residual(2, Rat(-1)), DomainError);
  EXPECT_THROW(partial_fraction_residual(2, Rat(0)), DomainError);
}

TEST(PartialFractionResidual, RandomRationalPoints) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<long> num(-500, 500), den(1, 50);
  for (index_t n = 0; n <= 60; ++n) {
    const PartialFractionCoeffs c = partial_fraction_coeffs(n);
    int used = 0;
    while (used < 5) {
      const Rat x = rat(num(rng), den(rng));
      if (x.get_den() == 1 && x <= 0 && x >= -static_cast<long>(n)) continue;
      ASSERT_EQ(partial_fraction_residual(c, x), 0) << "n=" << n << " x=" << x;
      ++used;
    }
  }
}

TEST(ZeroSumIdentities, Examples) {
  EXPECT_EQ(zero_sum_weighted_residual(1), 0);
  EXPECT_EQ(zero_sum_weighted_residual(2), 0);
  EXPECT_EQ(zero_sum_linear_residual(1), 0);
  EXPECT_EQ(zero_sum_linear_residual(3), 0);
  EXPECT_EQ(zero_sum_linear_residual(0), 1);
}

TEST(ZeroSumIdentities, HoldUpTo200) {
  for (index_t n = 1; n <= 200; ++n) {
    ASSERT_EQ(zero_sum_weighted_residual(n), 0) << n;
    ASSERT_EQ(zero_sum_linear_residual(n), 0) << n;
  }
}

TEST(A, ExactValues) {
  EXPECT_EQ(A_exact(0), 0);
  EXPECT_EQ(A_exact(1), rat(5, 2));
  EXPECT_EQ(A_exact(2), rat(131, 12));
}

TEST(Integrality, WitnessValues) {
  EXPECT_EQ(integrality_witness(1), 5);
  EXPECT_EQ(integrality_witness(2), 131);
  const Rat a3 = harmonic(3) + 9 * harmonic(4) + 9 * harmonic(5) + harmonic(6);
  EXPECT_EQ(Rat(integrality_witness(3)), Rat(60 * a3));
  for (index_t n = 1; n <= 200; ++n) ASSERT_NO_THROW(integrality_witness(n)) << n;
}

TEST(CenteredSquareSum, SmallCases) {
  EXPECT_EQ(centered_square_sum(1), rat(1, 2));
  EXPECT_EQ(centered_square_sum(2), rat(1, 2));
}

TEST(MemoTables, SnapshotSeedRoundTrip) {
  lcm_upto(50);
  const auto lcm = lcm_table_snapshot();
  ASSERT_GE(lcm.size(), 51u);
  seed_lcm_table(lcm);
  EXPECT_EQ(lcm_upto(50), oracle::lcm_fold(50));
  stirling1_row(20);
  const auto rows = stirling_table_snapshot();
  seed_stirling_table(rows);
  EXPECT_EQ(stirling1_row(20).values, rows[20].values);
}
