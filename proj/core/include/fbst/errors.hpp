#pragma once

#include <stdexcept>
#include <string>

namespace fbst {

/// Input outside the mathematical domain of an operation (non-finite value,
/// probability outside (0,1), non-positive variance, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A numerical routine could not reach its requested accuracy.
class NumericalError : public std::runtime_error {
 public:
  NumericalError(const std::string& what, double error_estimate)
      : std::runtime_error(what), error_estimate_(error_estimate) {}

  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double error_estimate_;
};

}  // namespace fbst
