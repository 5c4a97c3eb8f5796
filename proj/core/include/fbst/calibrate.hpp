#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbst/model.hpp"
#include "fbst/risk.hpp"

namespace fbst {

struct OptimizerOptions {
  int grid_points = 1000;
  double k_tol = 1e-8;
  double k_min = 1e-9;
  double k_max = 1.0 - 1e-9;
  /// Objective evaluations allowed in total (grid plus refinement).
  int max_evaluations = 5000;

  void validate() const;
  friend bool operator==(const OptimizerOptions&,
                         const OptimizerOptions&) = default;
};

struct CalibrationResult {
  double k_star = 0.0;
  Probability alpha_star;
  Probability beta_bar_star;
  double objective_star = 0.0;
  int evaluations = 0;
  bool converged = false;

  friend bool operator==(const CalibrationResult&,
                         const CalibrationResult&) = default;
};

/// Thrown when the evaluation budget runs out; carries the best point found.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, CalibrationResult best)
      : std::runtime_error(what), best_(best) {}
  const CalibrationResult& best_so_far() const noexcept { return best_; }

 private:
  CalibrationResult best_;
};

/// Minimizes a·α(k) + b·β̄(k) over [k_min, k_max].
///
/// A uniform grid locates the global basin (ties go to the smallest k); a
/// golden-section search inside the two cells around the best grid point
/// refines it to k_tol.
CalibrationResult optimal_cutoff(const TestConfig& config, const Weights& w,
                                 const OptimizerOptions& opts = {},
                                 const QuadratureOptions& quad = {});

enum class RowStatus { ok, failed };

struct SweepRow {
  std::int64_t n = 0;
  double v2 = 0.0;
  double k_star = 0.0;
  Probability alpha_star;
  Probability beta_bar_star;
  double objective_star = 0.0;
  RowStatus status = RowStatus::ok;
  std::string message;

  friend bool operator==(const SweepRow&, const SweepRow&) = default;
};

/// k* for every (n, v2) pair, with `base` supplying the remaining fields.
/// Rows are sorted by (v2, n). A row whose calibration throws is kept with
/// status failed; the rest of the table is still produced. Rows are computed
/// on up to `workers` threads (0 = hardware concurrency); output does not
/// depend on the worker count.
std::vector<SweepRow> cutoff_table(const std::vector<std::int64_t>& n_list,
                                   const std::vector<double>& v2_list,
                                   const TestConfig& base, const Weights& w,
                                   const OptimizerOptions& opts = {},
                                   const QuadratureOptions& quad = {},
                                   unsigned workers = 0);

/// α, β̄ and the objective at each k of an ascending grid.
std::vector<ErrorRates> risk_curve(const TestConfig& config, const Weights& w,
                                   const std::vector<double>& k_grid,
                                   const QuadratureOptions& quad = {});

/// `count` points evenly spaced on [lo, hi]; a single point is lo.
std::vector<double> uniform_grid(double lo, double hi, int count);

struct OptimalRates {
  std::int64_t n = 0;
  double k_star = 0.0;
  Probability alpha_star;
  Probability beta_bar_star;
  double objective_star = 0.0;
};

/// Optimal error rates as a function of the sample size.
std::vector<OptimalRates> error_vs_n(const std::vector<std::int64_t>& n_list,
                                     const TestConfig& base, const Weights& w,
                                     const OptimizerOptions& opts = {},
                                     const QuadratureOptions& quad = {},
                                     unsigned workers = 0);

}  // namespace fbst
