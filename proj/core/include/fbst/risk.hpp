#pragma once

#include "fbst/model.hpp"
#include "fbst/special_functions.hpp"

namespace fbst {

/// Loss weights of the calibration objective a·α + b·β̄.
struct Weights {
  double a = 1.0;
  double b = 1.0;

  void validate() const;
  friend bool operator==(const Weights&, const Weights&) = default;
};

/// The quantities Q, z1, z2 of the power function. Acceptance of H0 happens
/// exactly when a standard normal Z lands in (z1, z2); z2 - z1 = -2Q >= 0.
struct PowerTerms {
  double q = 0.0;
  double z1 = 0.0;
  double z2 = 0.0;
};

enum class QuadratureScheme { gauss_hermite, adaptive };

struct QuadratureOptions {
  QuadratureScheme scheme = QuadratureScheme::gauss_hermite;
  int order = 128;
  double abs_tol = 1e-10;
  int max_panels = 4000;

  void validate() const;
  friend bool operator==(const QuadratureOptions&,
                         const QuadratureOptions&) = default;
};

PowerTerms power_terms(double k, double theta, const TestConfig& config);

/// π(θ) = P(ev <= k | θ) = 1 - [Φ(z2) - Φ(z1)].
Probability power(double k, double theta, const TestConfig& config);

/// P(accept | θ) = Φ(z2) - Φ(z1), evaluated on whichever tail keeps precision.
Probability acceptance_probability(const PowerTerms& terms);

/// α(k) = power at θ = θ0.
Probability type1_error(double k, const TestConfig& config);

/// β̄(k) = ∫ [Φ(z2(θ)) - Φ(z1(θ))] f(θ) dθ, f the averaging prior.
///
/// Gauss–Hermite in the standardized prior variable, checked against the
/// half-order rule; if the two differ by more than abs_tol (the acceptance
/// window is too narrow for the nodes) the adaptive Gauss–Kronrod route over
/// m ± 10v with breakpoints at the window edges takes over. The adaptive
/// scheme throws NumericalError if abs_tol is not reached.
Probability expected_type2_error(double k, const TestConfig& config,
                                 const QuadratureOptions& quad = {});

struct ErrorRates {
  double k = 0.0;
  Probability alpha;
  Probability beta_bar;
  double objective = 0.0;
};

/// α, β̄ and a·α + b·β̄ at one cut-off.
ErrorRates error_rates(double k, const TestConfig& config, const Weights& w,
                       const QuadratureOptions& quad = {});

double objective(double k, const TestConfig& config, const Weights& w,
                 const QuadratureOptions& quad = {});

}  // namespace fbst
