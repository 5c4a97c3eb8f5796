#include "fbst/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <queue>

#include "fbst/errors.hpp"

namespace fbst::quadrature {

namespace {

// Orthonormal Hermite recurrence run on the ratios r_j = p_j / p_{j-1}, which
// stay finite for any order. The number of negative ratios equals the number
// of zeros of p_n above z (Sturm sequence), so each node can be bracketed by
// bisection; log|p_{n-1}| accumulates alongside for the weight.
struct HermiteRatios {
  int above = 0;
  double last = 0.0;       // r_n
  double log_prev = 0.0;   // log |p_{n-1}|
};

HermiteRatios hermite_ratios(double z, int n) {
  HermiteRatios h;
  h.log_prev = -0.25 * std::log(std::numbers::pi);
  double r = 0.0;
  for (int j = 1; j <= n; ++j) {
    const double a = z * std::sqrt(2.0 / j);
    r = j == 1 ? a : a - std::sqrt((j - 1.0) / j) / r;
    if (r == 0.0) r = 1e-300;
    if (r < 0.0) ++h.above;
    if (j < n) h.log_prev += std::log(std::fabs(r));
  }
  h.last = r;
  return h;
}

// log |p_m(0)| for even m; the ratios above are singular at z = 0.
double log_hermite_at_zero(int m) {
  double log_p = -0.25 * std::log(std::numbers::pi);
  for (int j = 2; j <= m; j += 2) log_p += 0.5 * std::log((j - 1.0) / j);
  return log_p;
}

GaussHermiteRule build_gauss_hermite(int order) {
  const int n = order;
  GaussHermiteRule rule;
  rule.nodes.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  const double bound = std::sqrt(2.0 * n + 1.0) + 1.0;

  // Node i counted from the top: exactly i zeros lie above it.
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double lo = i == 0 ? 0.0 : -bound;
    double hi = i == 0 ? bound : rule.nodes[n - i];
    lo = std::max(lo, -bound);
    for (int iter = 0; iter < 200 && hi - lo > 1e-15 * std::max(1.0, std::fabs(hi)); ++iter) {
      const double mid = 0.5 * (lo + hi);
      if (hermite_ratios(mid, n).above > i) {
        lo = mid;
      } else {
        hi = mid;
      }
    }
    double z = 0.5 * (lo + hi);
    // Newton polish, p_n / p_n' = r_n / sqrt(2n), kept inside the bracket.
    for (int iter = 0; iter < 3; ++iter) {
      const double next = z - hermite_ratios(z, n).last / std::sqrt(2.0 * n);
      if (!(next >= lo && next <= hi)) break;
      z = next;
    }
    const bool centre = n % 2 == 1 && 2 * i == n - 1;
    if (centre) z = 0.0;
    const double w = std::exp(-2.0 * (centre ? log_hermite_at_zero(n - 1)
                                             : hermite_ratios(z, n).log_prev) -
                              std::log(static_cast<double>(n)));
    rule.nodes[n - 1 - i] = z;
    rule.nodes[i] = -z;
    rule.weights[n - 1 - i] = w;
    rule.weights[i] = w;
  }
  return rule;
}

// Kronrod 15 / Gauss 7 abscissae and weights on [-1, 1] (QUADPACK qk15).
constexpr double kXgk[8] = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr double kWgk[8] = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr double kWg[4] = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  friend bool operator<(const Panel& x, const Panel& y) {
    if (x.error != y.error) return x.error < y.error;
    return x.a > y.a;  // deterministic order among equal errors
  }
};

Panel qk15(const std::function<double(double)>& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double result_k = fc * kWgk[7];
  double result_g = fc * kWg[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[j];
    const double f1 = f(center - dx);
    const double f2 = f(center + dx);
    result_k += kWgk[j] * (f1 + f2);
    if (j % 2 == 1) result_g += kWg[j / 2] * (f1 + f2);
  }
  const double value = result_k * half;
  const double error = std::fabs((result_k - result_g) * half);
  return {a, b, value, error};
}

}  // namespace

const GaussHermiteRule& gauss_hermite_rule(int order) {
  if (order < 1) throw DomainError("Gauss-Hermite order must be >= 1");
  static std::mutex mutex;
  static std::map<int, std::unique_ptr<const GaussHermiteRule>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[order];
  if (!slot) {
    slot = std::make_unique<const GaussHermiteRule>(build_gauss_hermite(order));
  }
  return *slot;
}

Estimate gauss_kronrod(const std::function<double(double)>& f, double a,
                       double b, std::span<const double> breakpoints,
                       double abs_tol, int max_panels) {
  if (!(a < b)) throw DomainError("gauss_kronrod: need a < b");
  std::vector<double> cuts{a};
  for (double p : breakpoints) {
    if (p > a && p < b) cuts.push_back(p);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  std::priority_queue<Panel> panels;
  double total_error = 0.0;
  int evaluations = 0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    Panel p = qk15(f, cuts[i], cuts[i + 1]);
    evaluations += 15;
    total_error += p.error;
    panels.push(p);
  }

  while (total_error > abs_tol &&
         static_cast<int>(panels.size()) < max_panels) {
    const Panel worst = panels.top();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) break;  // interval exhausted
    panels.pop();
    const Panel left = qk15(f, worst.a, mid);
    const Panel right = qk15(f, mid, worst.b);
    evaluations += 30;
    total_error += left.error + right.error - worst.error;
    panels.push(left);
    panels.push(right);
  }

  // Sum in a fixed order so the result does not depend on heap layout.
  std::vector<Panel> all;
  all.reserve(panels.size());
  while (!panels.empty()) {
    all.push_back(panels.top());
    panels.pop();
  }
  std::sort(all.begin(), all.end(),
            [](const Panel& x, const Panel& y) { return x.a < y.a; });
  Estimate est;
  for (const Panel& p : all) {
    est.value += p.value;
    est.error += p.error;
  }
  est.evaluations = evaluations;
  return est;
}

}  // namespace fbst::quadrature
