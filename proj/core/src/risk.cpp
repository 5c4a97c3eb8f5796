#include "fbst/risk.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "fbst/errors.hpp"
#include "fbst/quadrature.hpp"

namespace fbst {

namespace {

// θ-independent pieces of the power terms: z1,2 = ±Q + offset - slope·(θ-θ0).
struct PowerGeometry {
  double q;
  double offset;
  double slope;
  double theta0;

  PowerTerms at(double theta) const {
    const double shift = offset - slope * (theta - theta0);
    return {q, q + shift, -q + shift};
  }
};

PowerGeometry geometry(double k, const TestConfig& config) {
  require_cutoff(k);
  config.validate();
  const double n = static_cast<double>(config.sampling.n);
  const double sigma = std::sqrt(config.sampling.sigma2);
  const double v2 = config.prior.v2;
  const double v = std::sqrt(v2);
  const double root_n = std::sqrt(n);

  const double q = std::sqrt(config.sampling.sigma2 + n * v2) *
                   std_normal_quantile(0.5 * k) / (root_n * v);
  const double offset = sigma * (config.sampling.theta0 - config.prior.m) /
                        (root_n * v2);
  return {q, offset, root_n / sigma, config.sampling.theta0};
}

double gauss_hermite_mean(const PowerGeometry& g, const PriorSpec& prior,
                          int order) {
  const auto& rule = quadrature::gauss_hermite_rule(order);
  const double scale = std::numbers::sqrt2 * std::sqrt(prior.v2);
  double sum = 0.0;
  for (std::size_t i = 0; i < rule.nodes.size(); ++i) {
    const double theta = prior.m + scale * rule.nodes[i];
    sum += rule.weights[i] * acceptance_probability(g.at(theta)).value();
  }
  return sum / std::sqrt(std::numbers::pi);
}

double adaptive_mean(const PowerGeometry& g, const PriorSpec& prior,
                     const QuadratureOptions& quad) {
  const double v = std::sqrt(prior.v2);
  const double lo = prior.m - 10.0 * v;
  const double hi = prior.m + 10.0 * v;

  // Acceptance window in θ: centre where the shift vanishes, half-width |Q|/slope,
  // edges smeared over 1/slope.
  const double centre = g.theta0 + g.offset / g.slope;
  const double half = std::fabs(g.q) / g.slope;
  const double blur = 1.0 / g.slope;
  const double cuts[] = {prior.m,
                         centre,
                         centre - half,
                         centre + half,
                         centre - half - 6.0 * blur,
                         centre - half + 6.0 * blur,
                         centre + half - 6.0 * blur,
                         centre + half + 6.0 * blur};

  const auto integrand = [&](double theta) {
    const double z = (theta - prior.m) / v;
    return acceptance_probability(g.at(theta)).value() * std_normal_pdf(z) / v;
  };
  const auto est =
      quadrature::gauss_kronrod(integrand, lo, hi, cuts, quad.abs_tol,
                                quad.max_panels);
  if (!(est.error <= quad.abs_tol)) {
    throw NumericalError("expected type II error: adaptive quadrature reached " +
                             std::to_string(est.error) + " > abs_tol " +
                             std::to_string(quad.abs_tol),
                         est.error);
  }
  return est.value;
}

}  // namespace

void Weights::validate() const {
  if (!(std::isfinite(a) && a > 0.0)) throw DomainError("weight a must be > 0");
  if (!(std::isfinite(b) && b > 0.0)) throw DomainError("weight b must be > 0");
}

void QuadratureOptions::validate() const {
  if (scheme == QuadratureScheme::gauss_hermite && (order < 8 || order > 1024)) {
    throw DomainError("Gauss-Hermite order must lie in [8, 1024]");
  }
  if (!(abs_tol > 0.0 && abs_tol <= 1e-4)) {
    throw DomainError("quadrature abs_tol must lie in (0, 1e-4]");
  }
  if (max_panels < 1) throw DomainError("max_panels must be >= 1");
}

PowerTerms power_terms(double k, double theta, const TestConfig& config) {
  if (!std::isfinite(theta)) throw DomainError("theta must be finite");
  return geometry(k, config).at(theta);
}

Probability acceptance_probability(const PowerTerms& t) {
  // z1 <= z2; pick the tail where both CDF values are small.
  if (t.z1 >= 0.0) {
    return Probability::clamped(std_normal_ccdf(t.z1) - std_normal_ccdf(t.z2));
  }
  if (t.z2 <= 0.0) {
    return Probability::clamped(std_normal_cdf(t.z2).value() -
                                std_normal_cdf(t.z1).value());
  }
  return Probability::clamped(1.0 - std_normal_cdf(t.z1).value() -
                              std_normal_ccdf(t.z2));
}

Probability power(double k, double theta, const TestConfig& config) {
  const PowerTerms t = power_terms(k, theta, config);
  // 1 - [Φ(z2) - Φ(z1)] written as two tails.
  return Probability::clamped(std_normal_cdf(t.z1).value() +
                              std_normal_ccdf(t.z2));
}

Probability type1_error(double k, const TestConfig& config) {
  return power(k, config.sampling.theta0, config);
}

Probability expected_type2_error(double k, const TestConfig& config,
                                 const QuadratureOptions& quad) {
  quad.validate();
  const PowerGeometry g = geometry(k, config);
  const PriorSpec& prior = config.averaging_prior();

  // The acceptance probability is a smoothed box in the standardized prior
  // variable whose edges have width 1/tau. An order-N rule resolves it to
  // roughly machine precision while tau <= 0.25 sqrt(N); past that, both the
  // full and half rule can step over the window and agree on a wrong value.
  const double tau = g.slope * std::sqrt(prior.v2);
  if (quad.scheme == QuadratureScheme::gauss_hermite &&
      tau <= 0.25 * std::sqrt(static_cast<double>(quad.order))) {
    const double full = gauss_hermite_mean(g, prior, quad.order);
    const double half = gauss_hermite_mean(g, prior, quad.order / 2);
    if (std::fabs(full - half) <= quad.abs_tol) {
      return Probability::clamped(full);
    }
  }
  return Probability::clamped(adaptive_mean(g, prior, quad));
}

ErrorRates error_rates(double k, const TestConfig& config, const Weights& w,
                       const QuadratureOptions& quad) {
  w.validate();
  ErrorRates r;
  r.k = k;
  r.alpha = type1_error(k, config);
  r.beta_bar = expected_type2_error(k, config, quad);
  r.objective = w.a * r.alpha.value() + w.b * r.beta_bar.value();
  return r;
}

double objective(double k, const TestConfig& config, const Weights& w,
                 const QuadratureOptions& quad) {
  return error_rates(k, config, w, quad).objective;
}

}  // namespace fbst
