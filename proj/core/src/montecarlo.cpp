#include "fbst/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "fbst/errors.hpp"
#include "fbst/rng.hpp"

namespace fbst {

namespace {

constexpr std::uint64_t kPriorStream = std::uint64_t{1} << 32;

// Calls body(chunk, begin, end) for each chunk of [0, draws).
template <typename Body>
void for_each_chunk(const McOptions& mc, Body body) {
  const std::int64_t chunks = (mc.draws + mc.chunk_size - 1) / mc.chunk_size;
  unsigned workers = mc.workers;
  if (workers == 0) workers = std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::int64_t>(workers, chunks));

  const auto run = [&](std::int64_t c) {
    const std::int64_t begin = c * mc.chunk_size;
    const std::int64_t end = std::min(mc.draws, begin + mc.chunk_size);
    body(c, begin, end);
  };
  if (workers <= 1) {
    for (std::int64_t c = 0; c < chunks; ++c) run(c);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::vector<std::jthread> pool;
  for (unsigned t = 0; t < workers; ++t) {
    pool.emplace_back([&] {
      for (std::int64_t c = next++; c < chunks; c = next++) run(c);
    });
  }
}

double normal_variate(SplitMix64& gen) {
  return std_normal_quantile(gen.uniform_open());
}

McEstimate binomial(std::int64_t hits, const McOptions& mc) {
  const double p = static_cast<double>(hits) / static_cast<double>(mc.draws);
  return {Probability(p), std::sqrt(p * (1.0 - p) / mc.draws), mc.draws,
          mc.seed};
}

// Evidence of every simulated sample, in draw order.
//   null stream:  x̄ = θ + sd·Z
//   prior stream: θ = m_d + v_d·Z1, x̄ = θ + sd·Z2
std::vector<double> simulate_evidence(const TestConfig& config,
                                      const McOptions& mc, std::uint64_t seed,
                                      bool from_prior, double theta) {
  const double sd = std::sqrt(config.sampling.sigma2 /
                              static_cast<double>(config.sampling.n));
  const PriorSpec& design = config.averaging_prior();
  const double design_sd = std::sqrt(design.v2);
  std::vector<double> out(static_cast<std::size_t>(mc.draws));
  for_each_chunk(mc, [&](std::int64_t chunk, std::int64_t begin,
                         std::int64_t end) {
    SplitMix64 gen(derive_seed(seed, static_cast<std::uint64_t>(chunk)));
    for (std::int64_t i = begin; i < end; ++i) {
      double mean = theta;
      if (from_prior) mean = design.m + design_sd * normal_variate(gen);
      const double xbar = mean + sd * normal_variate(gen);
      out[static_cast<std::size_t>(i)] = evidence(config, xbar).value.value();
    }
  });
  return out;
}

std::int64_t count_at_most(const std::vector<double>& ev, double k) {
  return std::count_if(ev.begin(), ev.end(), [k](double e) { return e <= k; });
}

}  // namespace

void McOptions::validate() const {
  if (draws < 1000) throw DomainError("Monte Carlo draws must be >= 1000");
  if (chunk_size < 1) throw DomainError("chunk_size must be >= 1");
}

McEstimate estimate_rejection_rate(double k, double theta,
                                   const TestConfig& config,
                                   const McOptions& mc) {
  require_cutoff(k);
  config.validate();
  mc.validate();
  if (!std::isfinite(theta)) throw DomainError("theta must be finite");
  const auto ev = simulate_evidence(config, mc, mc.seed, false, theta);
  return binomial(count_at_most(ev, k), mc);
}

McEstimate estimate_expected_type2(double k, const TestConfig& config,
                                   const McOptions& mc) {
  require_cutoff(k);
  config.validate();
  mc.validate();
  const auto ev = simulate_evidence(config, mc, mc.seed, true, 0.0);
  return binomial(mc.draws - count_at_most(ev, k), mc);
}

McCutoffEstimate estimate_optimal_cutoff(const TestConfig& config,
                                         const Weights& w,
                                         const std::vector<double>& k_grid,
                                         const McOptions& mc) {
  config.validate();
  w.validate();
  mc.validate();
  if (k_grid.empty()) throw DomainError("k grid must be non-empty");
  if (!std::is_sorted(k_grid.begin(), k_grid.end())) {
    throw DomainError("k grid must be sorted ascending");
  }
  for (double k : k_grid) require_cutoff(k);

  auto null_ev = simulate_evidence(config, mc, mc.seed, false,
                                   config.sampling.theta0);
  auto prior_ev = simulate_evidence(config, mc, derive_seed(mc.seed, kPriorStream),
                                    true, 0.0);
  std::sort(null_ev.begin(), null_ev.end());
  std::sort(prior_ev.begin(), prior_ev.end());

  const double draws = static_cast<double>(mc.draws);
  McCutoffEstimate out;
  out.objectives.reserve(k_grid.size());
  double best = 0.0;
  for (std::size_t i = 0; i < k_grid.size(); ++i) {
    const double k = k_grid[i];
    const auto rejected_null =
        std::upper_bound(null_ev.begin(), null_ev.end(), k) - null_ev.begin();
    const auto rejected_prior =
        std::upper_bound(prior_ev.begin(), prior_ev.end(), k) - prior_ev.begin();
    const double alpha = static_cast<double>(rejected_null) / draws;
    const double beta = static_cast<double>(mc.draws - rejected_prior) / draws;
    const double value = w.a * alpha + w.b * beta;
    out.objectives.push_back(value);
    if (i == 0 || value < best) {
      best = value;
      out.k = k;
    }
  }
  return out;
}

}  // namespace fbst
