#include <doctest.h>

#include <cmath>
#include <vector>

#include "fbst/calibrate.hpp"
#include "fbst/errors.hpp"
#include "oracles.hpp"

using namespace fbst;

namespace {

// Sampling variance under which the reference cut-offs for v2 = 1 hold.
constexpr double kSigma2 = 10.0;

double oracle_objective(double k, const TestConfig& c, const Weights& w) {
  const double n = static_cast<double>(c.sampling.n);
  const PriorSpec& d = c.averaging_prior();
  return w.a * oracle::alpha_closed_form(k, c.prior.m, c.prior.v2, c.sampling.theta0,
                                         c.sampling.sigma2, n) +
         w.b * oracle::beta_bar_closed_form(k, c.prior.m, c.prior.v2, c.sampling.theta0,
                                            c.sampling.sigma2, n, d.m, d.v2);
}

// Dense scan plus ternary search on the closed-form objective.
double oracle_kstar(const TestConfig& c, const Weights& w) {
  const int points = 4001;
  double best_k = 0.0, best = 1e300;
  for (int i = 0; i < points; ++i) {
    const double k = 1e-9 + (1.0 - 2e-9) * i / (points - 1);
    const double f = oracle_objective(k, c, w);
    if (f < best) {
      best = f;
      best_k = k;
    }
  }
  const double step = (1.0 - 2e-9) / (points - 1);
  double lo = std::fmax(1e-9, best_k - step), hi = std::fmin(1.0 - 1e-9, best_k + step);
  for (int i = 0; i < 200; ++i) {
    const double m1 = lo + (hi - lo) / 3, m2 = hi - (hi - lo) / 3;
    if (oracle_objective(m1, c, w) <= oracle_objective(m2, c, w)) {
      hi = m2;
    } else {
      lo = m1;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_SUITE("calibrate") {

TEST_CASE("optimal cut-off matches reference cut-offs at sigma2 = 10") {
  const Weights w{1.0, 1.0};
  struct Row {
    std::int64_t n;
    double v2;
    double k;
  };
  for (const Row r : {Row{10, 0.1, 0.76244}, Row{50, 1.0, 0.18178}, Row{2000, 1.0, 0.02168}}) {
    CAPTURE(r.n);
    const auto res = optimal_cutoff(make_config(0, r.v2, 0, kSigma2, r.n), w);
    CHECK(std::fabs(res.k_star - r.k) <= 0.005);
    CHECK(res.converged);
    CHECK(res.k_star > 0.0);
    CHECK(res.k_star < 1.0);
    CHECK(res.objective_star == w.a * res.alpha_star.value() + w.b * res.beta_bar_star.value());
  }
}

TEST_CASE("optimal cut-off matches the closed-form oracle") {
  struct Case {
    TestConfig c;
    Weights w;
  };
  std::vector<Case> cases{
      {make_config(0, 1.0, 0, 1.0, 50), {1, 1}},
      {make_config(0, 1.0, 0, 1.0, 2000), {1, 1}},
      {make_config(0.3, 0.5, 0, 2.0, 80), {1, 1}},
      {make_config(0, 0.1, 0, kSigma2, 300), {2, 1}},
      {make_config(-0.2, 2.0, 0.1, 1.0, 15), {1, 3}},
  };
  TestConfig designed = make_config(0, 0.1, 0, kSigma2, 500);
  designed.design_prior = PriorSpec{0, 0.01};
  cases.push_back({designed, {1, 1}});
  for (const auto& cs : cases) {
    const auto res = optimal_cutoff(cs.c, cs.w);
    CHECK(res.k_star == doctest::Approx(oracle_kstar(cs.c, cs.w)).epsilon(1e-6));
  }
}

TEST_CASE("optimality certificate") {
  const Weights w{1, 1};
  for (std::int64_t n : {10, 150, 1000}) {
    for (double v2 : {0.1, 1.0}) {
      const TestConfig c = make_config(0, v2, 0, kSigma2, n);
      const auto res = optimal_cutoff(c, w);
      for (double delta : {1e-4, 1e-3, 1e-2}) {
        for (double k : {res.k_star - delta, res.k_star + delta}) {
          const double clipped = std::fmin(std::fmax(k, 1e-9), 1.0 - 1e-9);
          CHECK(res.objective_star <= objective(clipped, c, w));
        }
      }
    }
  }
}

TEST_CASE("determinism and grid refinement stability") {
  const TestConfig c = make_config(0, 1.0, 0, kSigma2, 250);
  const Weights w{1, 1};
  const auto a = optimal_cutoff(c, w);
  const auto b = optimal_cutoff(c, w);
  CHECK(a == b);

  OptimizerOptions doubled;
  doubled.grid_points *= 2;
  const auto d = optimal_cutoff(c, w, doubled);
  CHECK(std::fabs(d.k_star - a.k_star) < 10 * doubled.k_tol);

  QuadratureOptions adaptive;
  adaptive.scheme = QuadratureScheme::adaptive;
  const auto e = optimal_cutoff(c, w, {}, adaptive);
  CHECK(std::fabs(e.k_star - a.k_star) < 10 * doubled.k_tol);
}

TEST_CASE("budget exhaustion carries the best point so far") {
  OptimizerOptions tight;
  tight.max_evaluations = 50;
  try {
    (void)optimal_cutoff(make_config(0, 1, 0, kSigma2, 50), {1, 1}, tight);
    FAIL("expected ConvergenceError");
  } catch (const ConvergenceError& e) {
    CHECK_FALSE(e.best_so_far().converged);
    CHECK(e.best_so_far().evaluations <= 50);
    CHECK(e.best_so_far().k_star > 0.0);
  }
}

TEST_CASE("optimizer options validation") {
  OptimizerOptions o;
  o.grid_points = 99;
  CHECK_THROWS_AS(o.validate(), DomainError);
  o = {};
  o.k_min = 0.0;
  CHECK_THROWS_AS(o.validate(), DomainError);
  o = {};
  o.k_max = 1.0;
  CHECK_THROWS_AS(o.validate(), DomainError);
  CHECK(uniform_grid(0.2, 0.4, 1) == std::vector<double>{0.2});
  CHECK(uniform_grid(0.0, 1.0, 3) == std::vector<double>{0.0, 0.5, 1.0});
}

TEST_CASE("cut-off table") {
  const TestConfig base = make_config(0, 1, 0, kSigma2, 1);
  const Weights w{1, 1};
  const auto single = cutoff_table({10}, {1.0}, base, w);
  REQUIRE(single.size() == 1);
  const auto direct = optimal_cutoff(make_config(0, 1, 0, kSigma2, 10), w);
  CHECK(single[0].k_star == direct.k_star);
  CHECK(single[0].alpha_star == direct.alpha_star);
  CHECK(single[0].status == RowStatus::ok);

  // Unsorted input; rows come back ordered by (v2, n).
  const auto rows = cutoff_table({200, 10, 50}, {1.0, 0.1}, base, w, {}, {}, 1);
  REQUIRE(rows.size() == 6);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK((rows[i - 1].v2 < rows[i].v2 ||
           (rows[i - 1].v2 == rows[i].v2 && rows[i - 1].n < rows[i].n)));
  }
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i % 3) CHECK(rows[i].k_star < rows[i - 1].k_star);
  }
  const auto threaded = cutoff_table({200, 10, 50}, {1.0, 0.1}, base, w, {}, {}, 4);
  CHECK(threaded == rows);

  OptimizerOptions starved;
  starved.max_evaluations = 10;
  const auto failed = cutoff_table({10, 50}, {1.0}, base, w, starved);
  REQUIRE(failed.size() == 2);
  for (const auto& r : failed) {
    CHECK(r.status == RowStatus::failed);
    CHECK_FALSE(r.message.empty());
  }
  CHECK_THROWS_AS(cutoff_table({}, {1.0}, base, w), DomainError);
}

TEST_CASE("risk curve") {
  const TestConfig c = make_config(0, 1, 0, kSigma2, 50);
  const Weights w{1, 1};
  const auto grid = uniform_grid(0.005, 0.995, 200);
  const auto curve = risk_curve(c, w, grid);
  REQUIRE(curve.size() == 200);
  std::size_t argmin = 0;
  for (std::size_t i = 1; i < curve.size(); ++i) {
    CHECK(curve[i].alpha.value() >= curve[i - 1].alpha.value());
    CHECK(curve[i].beta_bar.value() <= curve[i - 1].beta_bar.value());
    if (curve[i].objective < curve[argmin].objective) argmin = i;
  }
  const double step = grid[1] - grid[0];
  CHECK(std::fabs(grid[argmin] - optimal_cutoff(c, w).k_star) <= step);

  const auto edge = risk_curve(c, w, {1.0 - 1e-9});
  CHECK(edge[0].alpha.value() == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(edge[0].beta_bar.value() <= 1e-6);
  CHECK_THROWS_AS(risk_curve(c, w, {0.5, 0.2}), DomainError);
}

TEST_CASE("optimal error rates decrease with n") {
  const TestConfig base = make_config(0, 1, 0, kSigma2, 1);
  const auto rows = error_vs_n({10, 50, 100, 500}, base, {1, 1});
  REQUIRE(rows.size() == 4);
  for (std::size_t i = 1; i < rows.size(); ++i) {
    CHECK(rows[i].objective_star < rows[i - 1].objective_star);
    CHECK(rows[i].alpha_star.value() < rows[i - 1].alpha_star.value());
    CHECK(rows[i].beta_bar_star.value() < rows[i - 1].beta_bar_star.value());
  }
  const auto one = error_vs_n({100}, base, {1, 1});
  CHECK(one[0].k_star == optimal_cutoff(make_config(0, 1, 0, kSigma2, 100), {1, 1}).k_star);
}

}
