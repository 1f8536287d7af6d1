#pragma once

// The exact identity suite: every invariant that must hold with zero
// residual, run over n = 1..n_max.

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>

#include "gammalab/exact.hpp"

namespace gammalab::verify {

struct Options {
  std::uint64_t seed = 20240611;
  index_t partial_fraction_n_max = 60;        // rational-point checks of the partial fractions
  unsigned partial_fraction_points = 5;       // points per n
  index_t coeff_n_max = 60;         // symmetry and zero-sum of a_k, b_k
  // Applied to a copy of row m+1 before the small-k Stirling check.
  std::function<void(index_t m, exact::StirlingRow&)> corrupt_stirling;
};

struct Failure {
  std::string identity;
  index_t n = 0;
  std::string detail;
};

struct Counts {
  std::size_t passed = 0;
  std::size_t failed = 0;
};

struct Report {
  index_t n_max = 0;
  std::map<std::string, Counts> suites;  // keyed by identity name
  std::optional<Failure> first_failure;
  bool ok() const { return !first_failure; }
};

// Identity names used in reports.
inline constexpr const char* kZeroSumWeighted = "zero_sum_weighted";
inline constexpr const char* kZeroSumLinear = "zero_sum_linear";
inline constexpr const char* kStirling = "stirling_small_k";
inline constexpr const char* kStirlingRowSum = "stirling_row_sum";
inline constexpr const char* kIntegrality = "integrality";
inline constexpr const char* kCentralBinomial = "central_binomial";
inline constexpr const char* kPartialFractions = "partial_fractions";
inline constexpr const char* kCoeffSymmetry = "coeff_symmetry";

// Throws DomainError when n_max = 0.
Report run_exact_suite(index_t n_max, const Options& options = {});

// Rational points away from the poles 0, -1, ..., -n, drawn deterministically.
std::vector<Rat> sample_points(index_t n, unsigned count, std::uint64_t seed);

}  // namespace gammalab::verify
