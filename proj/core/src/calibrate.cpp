#include "fbst/calibrate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <thread>
#include <tuple>

#include "fbst/errors.hpp"

namespace fbst {

namespace {

constexpr double kInvGolden = 0.6180339887498949;  // (√5 - 1) / 2

class Evaluator {
 public:
  Evaluator(const TestConfig& config, const Weights& w,
            const QuadratureOptions& quad)
      : config_(config), w_(w), quad_(quad) {}

  ErrorRates operator()(double k) {
    ++count_;
    ErrorRates r = error_rates(k, config_, w_, quad_);
    if (!have_best_ || r.objective < best_.objective ||
        (r.objective == best_.objective && r.k < best_.k)) {
      best_ = r;
      have_best_ = true;
    }
    return r;
  }

  int count() const { return count_; }
  const ErrorRates& best() const { return best_; }

 private:
  const TestConfig& config_;
  const Weights& w_;
  const QuadratureOptions& quad_;
  int count_ = 0;
  bool have_best_ = false;
  ErrorRates best_;
};

CalibrationResult to_result(const ErrorRates& r, int evaluations,
                            bool converged) {
  return {r.k, r.alpha, r.beta_bar, r.objective, evaluations, converged};
}

// Runs job(i) for i in [0, count) on up to `workers` threads.
template <typename Job>
void parallel_for(std::size_t count, unsigned workers, Job job) {
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::size_t>(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (unsigned t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) job(i);
    });
  }
}

}  // namespace

void OptimizerOptions::validate() const {
  if (grid_points < 100) throw DomainError("grid_points must be >= 100");
  if (!(k_tol > 0.0)) throw DomainError("k_tol must be > 0");
  if (!(k_min > 0.0 && k_min < k_max && k_max < 1.0)) {
    throw DomainError("need 0 < k_min < k_max < 1");
  }
  if (max_evaluations < 1) throw DomainError("max_evaluations must be >= 1");
}

std::vector<double> uniform_grid(double lo, double hi, int count) {
  if (count < 1) throw DomainError("grid needs at least one point");
  std::vector<double> grid(static_cast<std::size_t>(count));
  if (count == 1) {
    grid[0] = lo;
    return grid;
  }
  const double step = (hi - lo) / (count - 1);
  for (int i = 0; i < count; ++i) grid[i] = lo + step * i;
  grid.back() = hi;
  return grid;
}

CalibrationResult optimal_cutoff(const TestConfig& config, const Weights& w,
                                 const OptimizerOptions& opts,
                                 const QuadratureOptions& quad) {
  opts.validate();
  config.validate();
  w.validate();
  quad.validate();

  Evaluator eval(config, w, quad);
  const auto out_of_budget = [&] {
    return eval.count() >= opts.max_evaluations;
  };
  const auto fail = [&](const char* stage) {
    throw ConvergenceError(
        std::string("optimal_cutoff: evaluation budget exhausted during ") +
            stage,
        to_result(eval.best(), eval.count(), false));
  };

  const std::vector<double> grid =
      uniform_grid(opts.k_min, opts.k_max, opts.grid_points);
  std::size_t best_index = 0;
  double best_value = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (out_of_budget()) fail("grid search");
    const double value = eval(grid[i]).objective;
    if (i == 0 || value < best_value) {
      best_index = i;
      best_value = value;
    }
  }

  double lo = grid[best_index == 0 ? 0 : best_index - 1];
  double hi = grid[std::min(best_index + 1, grid.size() - 1)];

  double c = hi - kInvGolden * (hi - lo);
  double d = lo + kInvGolden * (hi - lo);
  if (out_of_budget()) fail("refinement");
  double fc = eval(c).objective;
  if (out_of_budget()) fail("refinement");
  double fd = eval(d).objective;
  while (hi - lo > opts.k_tol) {
    if (out_of_budget()) fail("refinement");
    if (fc <= fd) {  // ties keep the left part
      hi = d;
      d = c;
      fd = fc;
      c = hi - kInvGolden * (hi - lo);
      fc = eval(c).objective;
    } else {
      lo = c;
      c = d;
      fc = fd;
      d = lo + kInvGolden * (hi - lo);
      fd = eval(d).objective;
    }
  }
  return to_result(eval.best(), eval.count(), true);
}

std::vector<SweepRow> cutoff_table(const std::vector<std::int64_t>& n_list,
                                   const std::vector<double>& v2_list,
                                   const TestConfig& base, const Weights& w,
                                   const OptimizerOptions& opts,
                                   const QuadratureOptions& quad,
                                   unsigned workers) {
  if (n_list.empty() || v2_list.empty()) {
    throw DomainError("cutoff_table: n_list and v2_list must be non-empty");
  }
  std::vector<SweepRow> rows;
  rows.reserve(n_list.size() * v2_list.size());
  for (double v2 : v2_list) {
    for (std::int64_t n : n_list) {
      SweepRow row;
      row.n = n;
      row.v2 = v2;
      rows.push_back(row);
    }
  }
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SweepRow& x, const SweepRow& y) {
                     return std::tie(x.v2, x.n) < std::tie(y.v2, y.n);
                   });

  parallel_for(rows.size(), workers, [&](std::size_t i) {
    SweepRow& row = rows[i];
    try {
      TestConfig config = base;
      config.prior.v2 = row.v2;
      config.sampling.n = row.n;
      const CalibrationResult r = optimal_cutoff(config, w, opts, quad);
      row.k_star = r.k_star;
      row.alpha_star = r.alpha_star;
      row.beta_bar_star = r.beta_bar_star;
      row.objective_star = r.objective_star;
    } catch (const ConvergenceError& e) {
      const CalibrationResult& r = e.best_so_far();
      row.k_star = r.k_star;
      row.alpha_star = r.alpha_star;
      row.beta_bar_star = r.beta_bar_star;
      row.objective_star = r.objective_star;
      row.status = RowStatus::failed;
      row.message = e.what();
    } catch (const std::exception& e) {
      row.status = RowStatus::failed;
      row.message = e.what();
    }
  });
  return rows;
}

std::vector<ErrorRates> risk_curve(const TestConfig& config, const Weights& w,
                                   const std::vector<double>& k_grid,
                                   const QuadratureOptions& quad) {
  if (!std::is_sorted(k_grid.begin(), k_grid.end())) {
    throw DomainError("risk_curve: k grid must be sorted ascending");
  }
  std::vector<ErrorRates> out;
  out.reserve(k_grid.size());
  for (double k : k_grid) out.push_back(error_rates(k, config, w, quad));
  return out;
}

std::vector<OptimalRates> error_vs_n(const std::vector<std::int64_t>& n_list,
                                     const TestConfig& base, const Weights& w,
                                     const OptimizerOptions& opts,
                                     const QuadratureOptions& quad,
                                     unsigned workers) {
  if (n_list.empty()) throw DomainError("error_vs_n: n_list must be non-empty");
  std::vector<OptimalRates> out(n_list.size());
  std::vector<std::exception_ptr> errors(n_list.size());
  parallel_for(n_list.size(), workers, [&](std::size_t i) {
    try {
      TestConfig config = base;
      config.sampling.n = n_list[i];
      const CalibrationResult r = optimal_cutoff(config, w, opts, quad);
      out[i] = {n_list[i], r.k_star, r.alpha_star, r.beta_bar_star,
                r.objective_star};
    } catch (...) {
      errors[i] = std::current_exception();
    }
  });
  for (const auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return out;
}

}  // namespace fbst
