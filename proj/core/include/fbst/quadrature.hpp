#pragma once

#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace fbst::quadrature {

/// Nodes and weights for ∫ f(t) exp(-t²) dt ≈ Σ w_i f(t_i).
struct GaussHermiteRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// Rule of the given order (>= 1). Rules are computed once per order and
/// shared; the returned reference stays valid for the program lifetime.
const GaussHermiteRule& gauss_hermite_rule(int order);

struct Estimate {
  double value = 0.0;
  double error = 0.0;
  int evaluations = 0;
};

/// Globally adaptive 15-point Gauss–Kronrod integration of f over [a, b].
///
/// `breakpoints` inside (a, b) seed the initial partition. Bisects the panel
/// with the largest error estimate until the summed estimate is <= abs_tol
/// or `max_panels` is reached; the caller checks `error` against its tolerance.
Estimate gauss_kronrod(const std::function<double(double)>& f, double a,
                       double b, std::span<const double> breakpoints,
                       double abs_tol, int max_panels = 2000);

}  // namespace fbst::quadrature
