#pragma once

#include <compare>

namespace fbst {

/// A value in [0, 1]. Construction checks the range.
class Probability {
 public:
  constexpr Probability() = default;
  explicit Probability(double value);

  /// Clamps `value` into [0, 1]. Debug builds assert the clamp moved it by
  /// at most 1e-12, so only round-off is absorbed.
  static Probability clamped(double value);

  constexpr double value() const noexcept { return value_; }
  constexpr operator double() const noexcept { return value_; }

  friend constexpr auto operator<=>(Probability, Probability) = default;

 private:
  double value_ = 0.0;
};

/// Standard normal CDF. Throws DomainError for non-finite x.
Probability std_normal_cdf(double x);

/// Upper tail 1 - Φ(x) without cancellation.
double std_normal_ccdf(double x);

/// Standard normal quantile Φ⁻¹(p) for 0 < p < 1.
///
/// Wichura's AS 241 (PPND16) rational approximation, followed by one Halley
/// step against std_normal_cdf. Throws DomainError for p outside (0, 1).
double std_normal_quantile(double p);

/// Standard normal density.
double std_normal_pdf(double x);

}  // namespace fbst
