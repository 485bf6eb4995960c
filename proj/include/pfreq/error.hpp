#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace pfreq {

/// Malformed input: reflex vertex chains, degenerate shapes, bad exponents.
class InvalidInput : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A documented precondition of an operation does not hold for its argument.
class PreconditionViolation : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class OutOfDomain : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// An iterative solve hit its iteration cap. Carries the last iterate so the
/// caller can inspect how far it got.
class NonConvergence : public std::runtime_error {
 public:
  NonConvergence(const std::string& what, double last_value, std::vector<double> last_iterate)
      : std::runtime_error(what), last_value_(last_value), last_iterate_(std::move(last_iterate)) {}

  double last_value() const noexcept { return last_value_; }
  const std::vector<double>& last_iterate() const noexcept { return last_iterate_; }

 private:
  double last_value_;
  std::vector<double> last_iterate_;
};

}  // namespace pfreq
