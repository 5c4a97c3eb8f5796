#pragma once

#include <cstdint>
#include <optional>

#include "fbst/special_functions.hpp"

namespace fbst {

/// Conjugate prior Normal(m, v2) on the mean θ.
struct PriorSpec {
  double m = 0.0;
  double v2 = 1.0;

  void validate() const;
  friend bool operator==(const PriorSpec&, const PriorSpec&) = default;
};

/// Sampling model: X_i ~ Normal(θ, sigma2) i.i.d., n observations, H0: θ = theta0.
struct SamplingSpec {
  double theta0 = 0.0;
  double sigma2 = 1.0;
  std::int64_t n = 1;

  void validate() const;
  friend bool operator==(const SamplingSpec&, const SamplingSpec&) = default;
};

/// Everything fixed in one testing problem.
///
/// `design_prior`, when set, replaces `prior` as the distribution of θ over
/// which the type II error is averaged. The evidence always uses `prior`.
struct TestConfig {
  PriorSpec prior;
  SamplingSpec sampling;
  std::optional<PriorSpec> design_prior;

  /// Throws DomainError if any component is invalid.
  void validate() const;

  const PriorSpec& averaging_prior() const {
    return design_prior ? *design_prior : prior;
  }

  friend bool operator==(const TestConfig&, const TestConfig&) = default;
};

/// Builds and validates a config.
TestConfig make_config(double m, double v2, double theta0, double sigma2,
                       std::int64_t n);

struct PosteriorParams {
  double mean = 0.0;
  double variance = 0.0;
};

/// Closed interval [lo, hi].
struct Interval {
  double lo = 0.0;
  double hi = 0.0;

  double width() const { return hi - lo; }
  friend bool operator==(const Interval&, const Interval&) = default;
};

/// FBST evidence in favour of H0.
struct Evidence {
  Probability value;
};

enum class Decision { accept, reject };

/// Normal posterior of θ given the sample mean.
PosteriorParams posterior_params(const TestConfig& config, double xbar);

/// Tangential set {θ : f(θ|x) > f(θ0|x)}: the interval between θ0 and its
/// reflection 2M - θ0 about the posterior mean. Degenerate when M = θ0.
Interval tangential_interval(const TestConfig& config, double xbar);

/// ev(θ0; x̄) = 2Φ(-|σ²(θ0-m) + n v²(θ0-x̄)| / (σ v √(σ²+nv²))).
/// Exactly 1 when the posterior mean equals θ0.
Evidence evidence(const TestConfig& config, double xbar);

/// Rejects H0 iff ev <= k. Requires 0 < k <= 1.
Decision decide(Evidence ev, double k);

/// Throws DomainError unless 0 < k <= 1.
void require_cutoff(double k);

}  // namespace fbst
