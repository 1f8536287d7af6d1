#pragma once

#include <stdexcept>
#include <string>

namespace gammalab {

// Input outside an operation's domain (pole, k > n, x <= 0, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// An exact identity that must hold did not. Never expected to fire on a
// correct build; the verification suites surface it as a failure.
class IdentityViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// The working precision cannot certify the requested result.
class PrecisionInsufficient : public std::runtime_error {
 public:
  PrecisionInsufficient(const std::string& what, long extra_bits)
      : std::runtime_error(what), extra_bits_(extra_bits) {}

  // Estimated number of additional bits that would resolve the failure.
  long extra_bits() const noexcept { return extra_bits_; }

 private:
  long extra_bits_;
};

}  // namespace gammalab
