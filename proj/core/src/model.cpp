#include "fbst/model.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fbst/errors.hpp"

namespace fbst {

namespace {

void require_finite(double x, const char* name) {
  if (!std::isfinite(x)) {
    throw DomainError(std::string(name) + " must be finite");
  }
}

void require_positive(double x, const char* name) {
  if (!(std::isfinite(x) && x > 0.0)) {
    throw DomainError(std::string(name) + " must be positive and finite");
  }
}

// σ²(θ0 - m) + n v²(θ0 - x̄); zero exactly when the posterior mean is θ0.
double evidence_numerator(const TestConfig& c, double xbar) {
  const double n = static_cast<double>(c.sampling.n);
  return c.sampling.sigma2 * (c.sampling.theta0 - c.prior.m) +
         n * c.prior.v2 * (c.sampling.theta0 - xbar);
}

}  // namespace

void PriorSpec::validate() const {
  require_finite(m, "prior mean m");
  require_positive(v2, "prior variance v2");
}

void SamplingSpec::validate() const {
  require_finite(theta0, "theta0");
  require_positive(sigma2, "sampling variance sigma2");
  if (n < 1) throw DomainError("sample size n must be >= 1");
}

void TestConfig::validate() const {
  prior.validate();
  sampling.validate();
  if (design_prior) design_prior->validate();
}

TestConfig make_config(double m, double v2, double theta0, double sigma2,
                       std::int64_t n) {
  TestConfig config{PriorSpec{m, v2}, SamplingSpec{theta0, sigma2, n}, {}};
  config.validate();
  return config;
}

void require_cutoff(double k) {
  if (!(k > 0.0 && k <= 1.0)) {
    throw DomainError("cut-off k must lie in (0, 1], got " + std::to_string(k));
  }
}

PosteriorParams posterior_params(const TestConfig& config, double xbar) {
  config.validate();
  require_finite(xbar, "xbar");
  const double s2 = config.sampling.sigma2;
  const double nv2 = static_cast<double>(config.sampling.n) * config.prior.v2;
  const double denom = s2 + nv2;
  return {(s2 * config.prior.m + nv2 * xbar) / denom,
          s2 * config.prior.v2 / denom};
}

Interval tangential_interval(const TestConfig& config, double xbar) {
  const double theta0 = config.sampling.theta0;
  const PosteriorParams post = posterior_params(config, xbar);
  if (evidence_numerator(config, xbar) == 0.0) return {theta0, theta0};
  const double reflected = 2.0 * post.mean - theta0;
  return {std::min(theta0, reflected), std::max(theta0, reflected)};
}

Evidence evidence(const TestConfig& config, double xbar) {
  config.validate();
  require_finite(xbar, "xbar");
  const double numerator = std::fabs(evidence_numerator(config, xbar));
  if (numerator == 0.0) return {Probability(1.0)};

  const double s2 = config.sampling.sigma2;
  const double v2 = config.prior.v2;
  const double nv2 = static_cast<double>(config.sampling.n) * v2;
  const double scale = std::sqrt(s2 * v2 * (s2 + nv2));
  const double z = numerator / scale;
  if (!std::isfinite(z)) return {Probability(0.0)};
  return {Probability::clamped(2.0 * std_normal_cdf(-z).value())};
}

Decision decide(Evidence ev, double k) {
  require_cutoff(k);
  return ev.value.value() <= k ? Decision::reject : Decision::accept;
}

}  // namespace fbst
