#include "cli.hpp"

#include <chrono>
#include <ctime>
#include <fstream>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "fbst/errors.hpp"
#include "fbst/model.hpp"
#include "fbst/risk.hpp"
#include "output.hpp"

#ifndef FBST_VERSION
#define FBST_VERSION "unknown"
#endif

namespace fbst::cli {

namespace {

using json = nlohmann::ordered_json;

// Raised for unwritable outputs; maps to exit code 4.
struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelFlags {
  double m = 0.0;
  double v2 = 1.0;
  double sigma2 = 10.0;
  double theta0 = 0.0;
  std::int64_t n = 0;
  std::optional<double> design_m;
  std::optional<double> design_v2;

  TestConfig config() const {
    TestConfig c = make_config(m, v2, theta0, sigma2, n == 0 ? 1 : n);
    if (design_m || design_v2) {
      c.design_prior = PriorSpec{design_m.value_or(m), design_v2.value_or(v2)};
      c.validate();
    }
    return c;
  }
};

struct QuadFlags {
  std::string scheme = "gh";
  int order = 128;
  double abs_tol = 1e-10;

  QuadratureOptions options() const {
    QuadratureOptions q;
    q.scheme = scheme == "adaptive" ? QuadratureScheme::adaptive
                                    : QuadratureScheme::gauss_hermite;
    q.order = order;
    q.abs_tol = abs_tol;
    q.validate();
    return q;
  }
};

struct OptFlags {
  OptimizerOptions opts;
};

struct OutputFlags {
  std::string format;
  std::string output;
  std::string manifest;
};

void add_model_flags(CLI::App* app, ModelFlags& f, bool with_n, bool with_v2) {
  app->add_option("--m", f.m, "prior mean of theta");
  if (with_v2) {
    app->add_option("--v2", f.v2, "prior variance of theta")
        ->check(CLI::PositiveNumber);
  }
  app->add_option("--sigma2", f.sigma2, "known sampling variance")
      ->check(CLI::PositiveNumber);
  app->add_option("--theta0", f.theta0, "null value of theta");
  if (with_n) {
    app->add_option("--n", f.n, "sample size")
        ->required()
        ->check(CLI::PositiveNumber);
  }
  app->add_option("--design-m", f.design_m,
                  "mean of the prior that averages the type II error");
  app->add_option("--design-v2", f.design_v2,
                  "variance of the prior that averages the type II error")
      ->check(CLI::PositiveNumber);
}

void add_quad_flags(CLI::App* app, QuadFlags& f) {
  app->add_option("--quad", f.scheme, "beta-bar quadrature: gh or adaptive")
      ->check(CLI::IsMember({"gh", "adaptive"}));
  app->add_option("--order", f.order, "Gauss-Hermite order")
      ->check(CLI::Range(8, 1024));
  app->add_option("--abs-tol", f.abs_tol, "quadrature absolute tolerance")
      ->check(CLI::Range(1e-300, 1e-4));
}

void add_weight_flags(CLI::App* app, Weights& w) {
  app->add_option("--a", w.a, "type I error weight")->check(CLI::PositiveNumber);
  app->add_option("--b", w.b, "type II error weight")->check(CLI::PositiveNumber);
}

void add_optimizer_flags(CLI::App* app, OptFlags& f) {
  app->add_option("--grid-points", f.opts.grid_points, "coarse grid size")
      ->check(CLI::Range(100, 10'000'000));
  app->add_option("--k-tol", f.opts.k_tol, "golden-section tolerance on k")
      ->check(CLI::PositiveNumber);
  app->add_option("--k-min", f.opts.k_min, "lower end of the search range");
  app->add_option("--k-max", f.opts.k_max, "upper end of the search range");
  app->add_option("--max-evals", f.opts.max_evaluations,
                  "objective evaluation budget")
      ->check(CLI::PositiveNumber);
}

void add_output_flags(CLI::App* app, OutputFlags& f, const std::string& fallback) {
  f.format = fallback;
  std::vector<std::string> formats{"csv", "json"};
  if (fallback == "text") formats.insert(formats.begin(), "text");
  app->add_option("--format", f.format, "output format")
      ->check(CLI::IsMember(formats));
  app->add_option("--output,-o", f.output,
                  "write results here (a <path>.manifest.json is written too)");
  app->add_option("--manifest", f.manifest, "write the run manifest here");
}

std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

json collect_parameters(const CLI::App* app) {
  json params = json::object();
  for (const CLI::Option* opt : app->get_options()) {
    if (opt->get_name() == "--help" || opt->get_name().empty()) continue;
    const std::string key = opt->get_single_name();
    if (key == "output" || key == "manifest") continue;
    if (opt->count() > 0) {
      const auto& results = opt->results();
      if (results.size() == 1) {
        params[key] = results.front();
      } else {
        params[key] = results;
      }
    } else if (!opt->get_default_str().empty()) {
      params[key] = opt->get_default_str();
    } else {
      params[key] = nullptr;
    }
  }
  return params;
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open '" + path + "' for writing");
  f << content;
  f.flush();
  if (!f) throw IoError("failed writing '" + path + "'");
}

struct Context {
  std::vector<std::string> argv;
  std::ostream& out;
};

void emit(const Context& ctx, const CLI::App* app, const OutputFlags& of,
          const std::string& text, std::optional<std::uint64_t> seed) {
  if (of.output.empty()) {
    ctx.out << text;
  } else {
    write_file(of.output, text);
  }
  if (of.output.empty() && of.manifest.empty()) return;

  json manifest = json::object();
  manifest["tool"] = "fbst";
  manifest["tool_version"] = FBST_VERSION;
  manifest["command"] = app->get_name();
  manifest["argv"] = ctx.argv;
  manifest["parameters"] = collect_parameters(app);
  manifest["seed"] = seed ? json(*seed) : json(nullptr);
  manifest["timestamp"] = utc_timestamp();
  const std::string path =
      of.manifest.empty() ? of.output + ".manifest.json" : of.manifest;
  write_file(path, manifest.dump(2) + "\n");
}

std::string render(const Table& table, const std::string& format,
                   bool single_object) {
  if (format == "json") {
    json rows = to_json(table);
    if (single_object && rows.size() == 1) return rows.front().dump(2) + "\n";
    return rows.dump(2) + "\n";
  }
  std::ostringstream s;
  write_csv(table, s);
  return s.str();
}

std::string render_scalar(const std::string& name, double value,
                          const std::string& format) {
  if (format == "text") return format_number(value, 10) + "\n";
  Table t{{name}, {{value}}};
  return render(t, format, true);
}

Table calibration_table(const CalibrationResult& r) {
  return {{"k_star", "alpha_star", "beta_bar_star", "objective_star",
           "evaluations", "converged"},
          {{r.k_star, r.alpha_star.value(), r.beta_bar_star.value(),
            r.objective_star, static_cast<std::int64_t>(r.evaluations),
            r.converged}}};
}

Table mc_table(const McEstimate& e) {
  return {{"value", "std_error", "draws", "seed"},
          {{e.value.value(), e.std_error, e.draws, e.seed}}};
}

int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err);

}  // namespace

const std::vector<std::int64_t>& default_n_list() {
  static const std::vector<std::int64_t> list{
      10, 50, 100, 150, 200, 250, 300, 350, 400, 450, 500, 1000, 1500, 2000};
  return list;
}

json to_json(const CalibrationResult& r) {
  return to_json(calibration_table(r)).front();
}

CalibrationResult calibration_from_json(const nlohmann::json& j) {
  CalibrationResult r;
  r.k_star = j.at("k_star").get<double>();
  r.alpha_star = Probability(j.at("alpha_star").get<double>());
  r.beta_bar_star = Probability(j.at("beta_bar_star").get<double>());
  r.objective_star = j.at("objective_star").get<double>();
  r.evaluations = j.at("evaluations").get<int>();
  r.converged = j.at("converged").get<bool>();
  return r;
}

json to_json(const McEstimate& e) { return to_json(mc_table(e)).front(); }

McEstimate mc_estimate_from_json(const nlohmann::json& j) {
  McEstimate e;
  e.value = Probability(j.at("value").get<double>());
  e.std_error = j.at("std_error").get<double>();
  e.draws = j.at("draws").get<std::int64_t>();
  e.seed = j.at("seed").get<std::uint64_t>();
  return e;
}

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  try {
    return dispatch(args, out, err);
  } catch (const IoError& e) {
    err << "error: " << e.what() << "\n";
    return kIo;
  }
}

namespace {

int dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"Full Bayesian Significance Test for a normal mean: evidence, "
               "error rates and cut-off calibration",
               "fbst"};
  app.option_defaults()->always_capture_default();
  app.require_subcommand(1);
  app.set_version_flag("--version", FBST_VERSION);

  Context ctx{args, out};
  std::function<int()> action;

  ModelFlags model;
  QuadFlags quad;
  OptFlags optimizer;
  Weights weights;
  double k = 0.5;
  std::optional<double> theta;

  // evidence
  OutputFlags evidence_out;
  double xbar = 0.0;
  auto* evidence_cmd = app.add_subcommand("evidence", "FBST evidence ev(theta0; xbar)");
  add_model_flags(evidence_cmd, model, true, true);
  evidence_cmd->add_option("--xbar", xbar, "observed sample mean")->required();
  add_output_flags(evidence_cmd, evidence_out, "text");
  evidence_cmd->callback([&] {
    action = [&] {
      const Evidence ev = evidence(model.config(), xbar);
      emit(ctx, evidence_cmd, evidence_out, render_scalar("evidence", ev.value, evidence_out.format),
           std::nullopt);
      return int{kOk};
    };
  });

  // power
  OutputFlags power_out;
  double power_theta = 0.0;
  auto* power_cmd = app.add_subcommand("power", "rejection probability at theta");
  add_model_flags(power_cmd, model, true, true);
  power_cmd->add_option("--k", k, "evidence cut-off in (0, 1]")->required();
  power_cmd->add_option("--theta", power_theta, "true mean")->required();
  add_output_flags(power_cmd, power_out, "text");
  power_cmd->callback([&] {
    action = [&] {
      const double p = power(k, power_theta, model.config());
      emit(ctx, power_cmd, power_out, render_scalar("power", p, power_out.format),
           std::nullopt);
      return int{kOk};
    };
  });

  // alpha
  OutputFlags alpha_out;
  auto* alpha_cmd = app.add_subcommand("alpha", "type I error probability");
  add_model_flags(alpha_cmd, model, true, true);
  alpha_cmd->add_option("--k", k, "evidence cut-off in (0, 1]")->required();
  add_output_flags(alpha_cmd, alpha_out, "text");
  alpha_cmd->callback([&] {
    action = [&] {
      const double a = type1_error(k, model.config());
      emit(ctx, alpha_cmd, alpha_out, render_scalar("alpha", a, alpha_out.format),
           std::nullopt);
      return int{kOk};
    };
  });

  // beta-bar
  OutputFlags beta_out;
  auto* beta_cmd = app.add_subcommand("beta-bar", "expected type II error probability");
  add_model_flags(beta_cmd, model, true, true);
  beta_cmd->add_option("--k", k, "evidence cut-off in (0, 1]")->required();
  add_quad_flags(beta_cmd, quad);
  add_output_flags(beta_cmd, beta_out, "text");
  beta_cmd->callback([&] {
    action = [&] {
      const double b = expected_type2_error(k, model.config(), quad.options());
      emit(ctx, beta_cmd, beta_out, render_scalar("beta_bar", b, beta_out.format),
           std::nullopt);
      return int{kOk};
    };
  });

  // calibrate
  OutputFlags calibrate_out;
  auto* calibrate_cmd = app.add_subcommand("calibrate", "optimal cut-off k*");
  add_model_flags(calibrate_cmd, model, true, true);
  add_weight_flags(calibrate_cmd, weights);
  add_optimizer_flags(calibrate_cmd, optimizer);
  add_quad_flags(calibrate_cmd, quad);
  add_output_flags(calibrate_cmd, calibrate_out, "csv");
  calibrate_cmd->callback([&] {
    action = [&] {
      int code = kOk;
      CalibrationResult r;
      try {
        r = optimal_cutoff(model.config(), weights, optimizer.opts, quad.options());
      } catch (const ConvergenceError& e) {
        err << "error: " << e.what() << "\n";
        r = e.best_so_far();
        code = kNumerical;
      }
      emit(ctx, calibrate_cmd, calibrate_out,
           render(calibration_table(r), calibrate_out.format, true), std::nullopt);
      return code;
    };
  });

  // table
  OutputFlags table_out;
  std::vector<std::int64_t> n_list = default_n_list();
  std::vector<double> v2_list{0.1, 1.0};
  std::string design_rule = "v2";
  unsigned workers = 0;
  auto* table_cmd = app.add_subcommand("table", "k* for every (v2, n) pair");
  add_model_flags(table_cmd, model, false, false);
  table_cmd->add_option("--n-list", n_list, "comma-separated sample sizes")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  table_cmd->add_option("--v2-list", v2_list, "comma-separated prior variances")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  table_cmd
      ->add_option("--design-variance", design_rule,
                   "variance of the type II averaging prior per row: v2 (same "
                   "as the evidence prior) or v2-squared")
      ->check(CLI::IsMember({"v2", "v2-squared"}));
  add_weight_flags(table_cmd, weights);
  add_optimizer_flags(table_cmd, optimizer);
  add_quad_flags(table_cmd, quad);
  table_cmd->add_option("--workers", workers, "threads (0 = all cores)");
  add_output_flags(table_cmd, table_out, "csv");
  table_cmd->callback([&] {
    action = [&] {
      model.n = 1;
      const TestConfig base = model.config();
      const Weights w = weights;
      const QuadratureOptions q = quad.options();
      std::vector<SweepRow> rows;
      if (design_rule == "v2") {
        rows = cutoff_table(n_list, v2_list, base, w, optimizer.opts, q, workers);
      } else {
        for (double v2 : v2_list) {
          TestConfig c = base;
          c.design_prior = PriorSpec{base.prior.m, v2 * v2};
          auto part = cutoff_table(n_list, {v2}, c, w, optimizer.opts, q, workers);
          rows.insert(rows.end(), part.begin(), part.end());
        }
        std::stable_sort(rows.begin(), rows.end(), [](const auto& x, const auto& y) {
          return std::tie(x.v2, x.n) < std::tie(y.v2, y.n);
        });
      }
      Table t{{"n", "v2", "k_star", "alpha_star", "beta_bar_star", "objective_star",
               "status"},
              {}};
      bool failed = false;
      for (const auto& r : rows) {
        failed = failed || r.status == RowStatus::failed;
        if (r.status == RowStatus::failed) err << "row n=" << r.n << " v2=" << r.v2
                                               << " failed: " << r.message << "\n";
        t.rows.push_back({r.n, r.v2, r.k_star, r.alpha_star.value(),
                          r.beta_bar_star.value(), r.objective_star,
                          std::string(r.status == RowStatus::ok ? "ok" : "failed")});
      }
      emit(ctx, table_cmd, table_out, render(t, table_out.format, false), std::nullopt);
      return failed ? int{kNumerical} : int{kOk};
    };
  });

  // risk-curve
  OutputFlags curve_out;
  int grid = 200;
  double k_lo = 0.005;
  double k_hi = 0.995;
  auto* curve_cmd = app.add_subcommand("risk-curve", "alpha, beta-bar and objective over a k grid");
  add_model_flags(curve_cmd, model, true, true);
  add_weight_flags(curve_cmd, weights);
  add_quad_flags(curve_cmd, quad);
  curve_cmd->add_option("--grid", grid, "number of k points")->check(CLI::Range(1, 10'000'000));
  curve_cmd->add_option("--k-lo", k_lo, "first k")->check(CLI::Range(1e-300, 1.0));
  curve_cmd->add_option("--k-hi", k_hi, "last k")->check(CLI::Range(1e-300, 1.0));
  add_output_flags(curve_cmd, curve_out, "csv");
  curve_cmd->callback([&] {
    action = [&] {
      const auto curve = risk_curve(model.config(), weights,
                                    uniform_grid(k_lo, k_hi, grid), quad.options());
      Table t{{"k", "alpha", "beta_bar", "objective"}, {}};
      for (const auto& r : curve) {
        t.rows.push_back({r.k, r.alpha.value(), r.beta_bar.value(), r.objective});
      }
      emit(ctx, curve_cmd, curve_out, render(t, curve_out.format, false), std::nullopt);
      return int{kOk};
    };
  });

  // error-vs-n
  OutputFlags evn_out;
  auto* evn_cmd = app.add_subcommand("error-vs-n", "optimal error rates as a function of n");
  add_model_flags(evn_cmd, model, false, true);
  evn_cmd->add_option("--n-list", n_list, "comma-separated sample sizes")
      ->delimiter(',')
      ->check(CLI::PositiveNumber);
  add_weight_flags(evn_cmd, weights);
  add_optimizer_flags(evn_cmd, optimizer);
  add_quad_flags(evn_cmd, quad);
  evn_cmd->add_option("--workers", workers, "threads (0 = all cores)");
  add_output_flags(evn_cmd, evn_out, "csv");
  evn_cmd->callback([&] {
    action = [&] {
      model.n = 1;
      const auto rows = error_vs_n(n_list, model.config(), weights, optimizer.opts,
                                   quad.options(), workers);
      Table t{{"n", "k_star", "alpha_star", "beta_bar_star", "objective_star"}, {}};
      for (const auto& r : rows) {
        t.rows.push_back({r.n, r.k_star, r.alpha_star.value(), r.beta_bar_star.value(),
                          r.objective_star});
      }
      emit(ctx, evn_cmd, evn_out, render(t, evn_out.format, false), std::nullopt);
      return int{kOk};
    };
  });

  // simulate
  OutputFlags sim_out;
  std::string mode = "rejection";
  McOptions mc;
  std::int64_t draws = 0;
  std::uint64_t seed = 0;
  auto* sim_cmd = app.add_subcommand("simulate", "Monte Carlo estimates of the error rates");
  add_model_flags(sim_cmd, model, true, true);
  sim_cmd->add_option("--mode", mode, "rejection, type2 or cutoff")
      ->check(CLI::IsMember({"rejection", "type2", "cutoff"}));
  sim_cmd->add_option("--k", k, "evidence cut-off in (0, 1]");
  sim_cmd->add_option("--theta", theta, "true mean for --mode rejection (default theta0)");
  sim_cmd->add_option("--draws", draws, "simulated samples")->required()->check(CLI::Range(
      std::int64_t{1000}, std::int64_t{1'000'000'000'000}));
  sim_cmd->add_option("--seed", seed, "master seed")->required();
  sim_cmd->add_option("--chunk-size", mc.chunk_size, "draws per random stream")
      ->check(CLI::PositiveNumber);
  sim_cmd->add_option("--workers", mc.workers, "threads (0 = all cores)");
  sim_cmd->add_option("--grid", grid, "k grid size for --mode cutoff")
      ->check(CLI::Range(1, 1'000'000));
  sim_cmd->add_option("--k-hi", k_hi, "largest k for --mode cutoff")
      ->check(CLI::Range(1e-300, 1.0));
  add_weight_flags(sim_cmd, weights);
  add_output_flags(sim_cmd, sim_out, "csv");
  sim_cmd->callback([&] {
    action = [&] {
      mc.draws = draws;
      mc.seed = seed;
      const TestConfig config = model.config();
      std::string text;
      if (mode == "rejection") {
        const auto e = estimate_rejection_rate(
            k, theta.value_or(config.sampling.theta0), config, mc);
        text = render(mc_table(e), sim_out.format, true);
      } else if (mode == "type2") {
        text = render(mc_table(estimate_expected_type2(k, config, mc)),
                      sim_out.format, true);
      } else {
        std::vector<double> ks;
        for (int i = 1; i <= grid; ++i) ks.push_back(k_hi * i / grid);
        const auto est = estimate_optimal_cutoff(config, weights, ks, mc);
        Table t{{"k", "objective", "argmin"}, {}};
        for (std::size_t i = 0; i < ks.size(); ++i) {
          t.rows.push_back({ks[i], est.objectives[i], ks[i] == est.k});
        }
        text = render(t, sim_out.format, false);
      }
      emit(ctx, sim_cmd, sim_out, text, seed);
      return int{kOk};
    };
  });

  // replay
  std::string manifest_path;
  auto* replay_cmd = app.add_subcommand("replay", "re-run the command recorded in a manifest");
  replay_cmd->add_option("manifest", manifest_path, "manifest JSON file")->required();
  replay_cmd->callback([&] {
    action = [&]() -> int {
      std::ifstream f(manifest_path);
      if (!f) throw IoError("cannot read manifest '" + manifest_path + "'");
      const auto j = nlohmann::json::parse(f, nullptr, false);
      if (j.is_discarded() || !j.contains("argv") || !j["argv"].is_array()) {
        err << "error: '" << manifest_path << "' is not a run manifest\n";
        return kUsage;
      }
      const auto argv = j["argv"].get<std::vector<std::string>>();
      if (!argv.empty() && argv.front() == "replay") {
        err << "error: manifest records a replay\n";
        return kUsage;
      }
      return dispatch(argv, out, err);
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << FBST_VERSION << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  }

  if (!action) return kUsage;
  try {
    return action();
  } catch (const IoError&) {
    throw;
  } catch (const DomainError& e) {
    err << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const NumericalError& e) {
    err << "error: " << e.what() << "\n";
    return kNumerical;
  } catch (const ConvergenceError& e) {
    err << "error: " << e.what() << "\n";
    return kNumerical;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumerical;
  }
}

}  // namespace

}  // namespace fbst::cli
