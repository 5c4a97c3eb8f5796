#pragma once

#include <cstdint>
#include <vector>

#include "fbst/model.hpp"
#include "fbst/risk.hpp"
#include "fbst/special_functions.hpp"

namespace fbst {

/// Binomial Monte Carlo estimate.
struct McEstimate {
  Probability value;
  double std_error = 0.0;
  std::int64_t draws = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const McEstimate&, const McEstimate&) = default;
};

/// Simulation controls. Draws are split into chunks of `chunk_size`; chunk c
/// uses the generator SplitMix64(derive_seed(seed, c)). The chunk layout, not
/// the worker count, fixes the random stream, so results are identical for
/// any `workers` (0 = hardware concurrency).
struct McOptions {
  std::int64_t draws = 1'000'000;
  std::uint64_t seed = 0;
  std::int64_t chunk_size = 1 << 16;
  unsigned workers = 0;

  void validate() const;
};

/// Fraction of simulated samples x̄ ~ Normal(θ, σ²/n) for which the test
/// rejects (ev <= k). Normal variates come from std_normal_quantile applied
/// to the generator's open-interval uniforms.
McEstimate estimate_rejection_rate(double k, double theta,
                                   const TestConfig& config,
                                   const McOptions& mc);

/// Fraction of (θ, x̄) pairs, θ from the averaging prior and x̄ | θ from the
/// sampling model, for which the test accepts H0. Each pair consumes two
/// consecutive variates of its chunk: θ first, then x̄.
McEstimate estimate_expected_type2(double k, const TestConfig& config,
                                   const McOptions& mc);

struct McCutoffEstimate {
  double k = 0.0;
  std::vector<double> objectives;  // one per grid point
};

/// Grid argmin of a·(rejection rate at θ0) + b·(acceptance rate under the
/// prior), with the same simulated samples reused at every grid point. The
/// null-hypothesis stream uses seed `mc.seed`; the prior stream uses
/// derive_seed(mc.seed, 2^32). Ties resolve to the smallest k.
McCutoffEstimate estimate_optimal_cutoff(const TestConfig& config,
                                         const Weights& w,
                                         const std::vector<double>& k_grid,
                                         const McOptions& mc);

}  // namespace fbst
