#include <doctest.h>

#include <cmath>
#include <limits>

#include "fbst/errors.hpp"
#include "fbst/special_functions.hpp"
#include "oracles.hpp"

using namespace fbst;

TEST_SUITE("special_functions") {

TEST_CASE("cdf at the centre and in the saturated tail") {
  CHECK(std_normal_cdf(0.0).value() == 0.5);
  CHECK(std::fabs(std_normal_cdf(40.0).value() - 1.0) <= 1e-16);
  CHECK(std_normal_cdf(-40.0).value() >= 0.0);
}

TEST_CASE("cdf matches integrated density") {
  // Frozen from oracle::normal_cdf_by_quadrature (Simpson, long double).
  constexpr double kFrozen = 0.03681913522122789;
  const auto by_quadrature =
      static_cast<double>(oracle::normal_cdf_by_quadrature(-1.78885438L));
  CHECK(std::fabs(by_quadrature - kFrozen) <= 1e-14);
  CHECK(std::fabs(std_normal_cdf(-1.78885438).value() - kFrozen) <= 1e-14);

  for (double x : {-6.0, -3.5, -1.0, -0.25, 0.4, 1.7, 5.0}) {
    const auto ref = static_cast<double>(oracle::normal_cdf_by_quadrature(x));
    CHECK(std::fabs(std_normal_cdf(x).value() - ref) <= 1e-14);
  }
}

TEST_CASE("cdf keeps relative accuracy deep in the lower tail") {
  struct Point {
    double x;
    double phi;  // 40-digit reference values, rounded to double
  };
  const Point points[] = {
      {-5.0, 2.866515718791939e-07},
      {-10.0, 7.619853024160526e-24},
      {-20.0, 2.753624118606234e-89},
      {-37.5, 4.605353009581955e-308},
  };
  for (const auto& p : points) {
    CAPTURE(p.x);
    CHECK(std::fabs(std_normal_cdf(p.x).value() / p.phi - 1.0) <= 2e-15);
    CHECK(std::fabs(std_normal_ccdf(-p.x) / p.phi - 1.0) <= 2e-15);
  }
}

TEST_CASE("cdf symmetry and monotonicity") {
  double prev = 0.0;
  for (double x = -12.0; x <= 12.0; x += 0.01) {
    const double c = std_normal_cdf(x).value();
    CHECK(c >= prev);
    prev = c;
    CHECK(std::fabs(c + std_normal_cdf(-x).value() - 1.0) <= 1e-14);
  }
}

TEST_CASE("quantile: median, known value, inverse property") {
  CHECK(std_normal_quantile(0.5) == 0.0);
  const double bisected = oracle::quantile_by_bisection(0.975);
  CHECK(std::fabs(bisected - 1.959963984540054) <= 1e-13);
  CHECK(std::fabs(std_normal_quantile(0.975) - bisected) <= 1e-13);

  const double x = std_normal_quantile(0.09089);
  CHECK(std::fabs(std_normal_cdf(x).value() - 0.09089) <= 1e-12);
}

TEST_CASE("quantile round-trips on the 999-point grid and is increasing") {
  double prev = -std::numeric_limits<double>::infinity();
  double worst = 0.0;
  for (int i = 1; i <= 999; ++i) {
    const double p = i / 1000.0;
    const double x = std_normal_quantile(p);
    CHECK(x > prev);
    prev = x;
    worst = std::fmax(worst, std::fabs(std_normal_cdf(x).value() - p));
  }
  CHECK(worst <= 1e-12);
}

TEST_CASE("quantile in the far tails") {
  for (double p : {1e-10, 1e-50, 1e-150, 1e-300, 5e-301}) {
    CAPTURE(p);
    const double x = std_normal_quantile(p);
    CHECK(std::isfinite(x));
    CHECK(std::fabs(std_normal_cdf(x).value() / p - 1.0) <= 1e-12);
  }
  // 1 - 1e-10 is not exactly representable, so symmetry holds only to the
  // rounding of p.
  CHECK(std::fabs(std_normal_quantile(1.0 - 1e-10) + std_normal_quantile(1e-10)) <=
        1e-5);
}

TEST_CASE("density") {
  CHECK(std::fabs(std_normal_pdf(0.0) - 0.3989422804014327) <= 1e-16);
  CHECK(std_normal_pdf(1.5) == std_normal_pdf(-1.5));
  const auto pdf = [](oracle::Real x) {
    return static_cast<oracle::Real>(std_normal_pdf(static_cast<double>(x)));
  };
  CHECK(std::fabs(static_cast<double>(oracle::simpson(pdf, -10.0L, 10.0L, 4000)) - 1.0) <=
        1e-12);
}

TEST_CASE("domain errors") {
  const double inf = std::numeric_limits<double>::infinity();
  const double nan = std::numeric_limits<double>::quiet_NaN();
  CHECK_THROWS_AS(std_normal_cdf(inf), DomainError);
  CHECK_THROWS_AS(std_normal_cdf(nan), DomainError);
  CHECK_THROWS_AS(std_normal_pdf(-inf), DomainError);
  CHECK_THROWS_AS(std_normal_quantile(0.0), DomainError);
  CHECK_THROWS_AS(std_normal_quantile(1.0), DomainError);
  CHECK_THROWS_AS(std_normal_quantile(-0.1), DomainError);
  CHECK_THROWS_AS(std_normal_quantile(nan), DomainError);
  CHECK_THROWS_AS(Probability(1.5), DomainError);
  CHECK(Probability::clamped(1.0 + 1e-15).value() == 1.0);
}

}
