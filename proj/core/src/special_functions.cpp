#include "fbst/special_functions.hpp"

#include <cassert>
#include <cmath>
#include <numbers>
#include <string>

#include "fbst/errors.hpp"

namespace fbst {

namespace {

// √2 split as hi + lo, hi exactly representable.
constexpr double kSqrt2Hi = 1.4142135623730951;
constexpr double kSqrt2Lo = -9.667293313452913e-17;
constexpr double kInvSqrt2Pi = 0.3989422804014327;  // 1/√(2π)
constexpr double kTwoOverSqrtPi = 1.1283791670955126;

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw DomainError(std::string(what) + ": argument must be finite");
  }
}

// erfc(t / √2) for t >= 0, correcting for the rounding of t / √2 so the
// relative accuracy in the far tail is that of std::erfc itself.
double erfc_scaled_arg(double t) {
  const double s = t * std::numbers::sqrt2 * 0.5;
  // delta = t/√2 - s, evaluated in extra precision
  double r = std::fma(-s, kSqrt2Hi, t);
  r -= s * kSqrt2Lo;
  const double delta = r * std::numbers::sqrt2 * 0.5;
  const double base = std::erfc(s);
  if (delta == 0.0 || s == 0.0) return base;
  return base - delta * kTwoOverSqrtPi * std::exp(-s * s);
}

double horner(const double* c, int n, double x) {
  double acc = c[n - 1];
  for (int i = n - 2; i >= 0; --i) acc = acc * x + c[i];
  return acc;
}

// AS 241 coefficients, lowest order first.
constexpr double kA[8] = {3.3871328727963666080e0, 1.3314166789178437745e+2,
                          1.9715909503065514427e+3, 1.3731693765509461125e+4,
                          4.5921953931549871457e+4, 6.7265770927008700853e+4,
                          3.3430575583588128105e+4, 2.5090809287301226727e+3};
constexpr double kB[8] = {1.0,
                          4.2313330701600911252e+1,
                          6.8718700749205790830e+2,
                          5.3941960214247511077e+3,
                          2.1213794301586595867e+4,
                          3.9307895800092710610e+4,
                          2.8729085735721942674e+4,
                          5.2264952788528545610e+3};
constexpr double kC[8] = {1.42343711074968357734e0, 4.63033784615654529590e0,
                          5.76949722146069140550e0, 3.64784832476320460504e0,
                          1.27045825245236838258e0, 2.41780725177450611770e-1,
                          2.27238449892691845833e-2, 7.74545014278341407640e-4};
constexpr double kD[8] = {1.0,
                          2.05319162663775882187e0,
                          1.67638483018380384940e0,
                          6.89767334985100004550e-1,
                          1.48103976427480074590e-1,
                          1.51986665636164571966e-2,
                          5.47593808499534494600e-4,
                          1.05075007164441684324e-9};
constexpr double kE[8] = {6.65790464350110377720e0, 5.46378491116411436990e0,
                          1.78482653991729133580e0, 2.96560571828504891230e-1,
                          2.65321895265761230930e-2, 1.24266094738807843860e-3,
                          2.71155556874348757815e-5, 2.01033439929228813265e-7};
constexpr double kF[8] = {1.0,
                          5.99832206555887937690e-1,
                          1.36929880922735805310e-1,
                          1.48753612908506148525e-2,
                          7.86869131145613259100e-4,
                          1.84631831751005468180e-5,
                          1.42151175831644588870e-7,
                          2.04426310338993978564e-15};

double ppnd16(double p) {
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    return q * horner(kA, 8, r) / horner(kB, 8, r);
  }
  double r = q < 0.0 ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    x = horner(kC, 8, r) / horner(kD, 8, r);
  } else {
    r -= 5.0;
    x = horner(kE, 8, r) / horner(kF, 8, r);
  }
  return q < 0.0 ? -x : x;
}

}  // namespace

Probability::Probability(double value) : value_(value) {
  if (!(value >= 0.0 && value <= 1.0)) {
    throw DomainError("probability outside [0, 1]: " + std::to_string(value));
  }
}

Probability Probability::clamped(double value) {
  assert(value >= -1e-12 && value <= 1.0 + 1e-12);
  if (value < 0.0) value = 0.0;
  if (value > 1.0) value = 1.0;
  return Probability(value);
}

double std_normal_ccdf(double x) {
  require_finite(x, "std_normal_ccdf");
  if (x >= 0.0) return 0.5 * erfc_scaled_arg(x);
  return 1.0 - 0.5 * erfc_scaled_arg(-x);
}

Probability std_normal_cdf(double x) {
  require_finite(x, "std_normal_cdf");
  if (x <= 0.0) return Probability(0.5 * erfc_scaled_arg(-x));
  return Probability(1.0 - 0.5 * erfc_scaled_arg(x));
}

double std_normal_pdf(double x) {
  require_finite(x, "std_normal_pdf");
  return kInvSqrt2Pi * std::exp(-0.5 * x * x);
}

double std_normal_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError("std_normal_quantile: p must lie in (0, 1), got " +
                      std::to_string(p));
  }
  if (p == 0.5) return 0.0;
  double x = ppnd16(p);

  // One Halley step; the residual is taken on the tail nearer to p so it
  // keeps relative precision.
  const double density = std_normal_pdf(x);
  if (density > 0.0) {
    const double residual = p < 0.5 ? std_normal_cdf(x).value() - p
                                    : (1.0 - p) - std_normal_ccdf(x);
    const double u = residual / density;
    const double step = u / (1.0 + 0.5 * x * u);
    if (std::isfinite(step)) x -= step;
  }
  return x;
}

}  // namespace fbst
