#include "aggfw/testkit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "aggfw/errors.hpp"
#include "aggfw/random.hpp"

namespace aggfw::testkit {

BruteForceResult brute_force_optimum(const ProblemInstance& p,
                                     double tie_tol) {
  const std::size_t n = p.num_agents();
  std::vector<std::uint32_t> radix(n);
  std::uint64_t total = 1;
  for (std::size_t i = 0; i < n; ++i) {
    const auto size = p.universe_size(i);
    if (!size || *size == 0) {
      throw ConfigError("agent " + std::to_string(i) +
                        " has no finite decision universe");
    }
    if (*size > kMaxEnumeration || total * *size > kMaxEnumeration) {
      throw ConfigError("brute force would enumerate more than 2^20 profiles");
    }
    radix[i] = static_cast<std::uint32_t>(*size);
    total *= *size;
  }

  // The aggregate is updated incrementally as the odometer turns, and
  // recomputed from scratch every so often to keep rounding from piling up.
  DecisionProfile x(n);
  BruteForceResult out;
  out.value = std::numeric_limits<double>::infinity();
  std::vector<std::pair<double, DecisionProfile>> near;
  const double inv_n = 1.0 / static_cast<double>(n);
  Aggregate y = aggregate_of(p, x);
  for (std::uint64_t t = 0; t < total; ++t) {
    if (t % 4096 == 0) y = aggregate_of(p, x);
    const double v = f_value(p, y);
    ++out.count;
    if (v <= out.value + tie_tol) {
      if (v < out.value) out.value = v;
      near.emplace_back(v, x);
      std::erase_if(near, [&](const auto& e) {
        return e.first > out.value + tie_tol;
      });
    }
    for (std::size_t i = 0; i < n; ++i) {
      p.add_contribution(i, x[i], -inv_n, y);
      if (++x[i].index < radix[i]) {
        p.add_contribution(i, x[i], inv_n, y);
        break;
      }
      x[i].index = 0;
      p.add_contribution(i, x[i], inv_n, y);
    }
  }
  out.value = std::numeric_limits<double>::infinity();
  for (auto& e : near) {
    out.value = std::min(out.value, objective(p, e.second));
    out.optimizers.push_back(std::move(e.second));
  }
  return out;
}

RecursionReport check_recursion_bound(double c, std::span<const double> u,
                                      std::span<const double> gamma,
                                      double tol) {
  if (!(c >= 0.0) || !std::isfinite(c)) {
    throw ConfigError("recursion constant must be finite and >= 0");
  }
  if (!gamma.empty() && u.size() + 1 < gamma.size()) {
    throw ConfigError("u needs at least gamma.size() - 1 entries");
  }
  for (double v : gamma) {
    if (!std::isfinite(v)) throw ConfigError("non-finite gamma entry");
  }
  for (double v : u) {
    if (!std::isfinite(v)) throw ConfigError("non-finite u entry");
  }
  auto exceeds = [tol](double lhs, double rhs) {
    return lhs > rhs + tol * std::max(1.0, std::abs(rhs));
  };

  RecursionReport report;
  report.worst_slack = std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k + 1 < gamma.size(); ++k) {
    const double w = 2.0 / (static_cast<double>(k) + 2.0);
    const double rhs = (1.0 - w) * gamma[k] + c * w * w + u[k];
    if (exceeds(gamma[k + 1], rhs)) {
      report.hypothesis_violation = k + 1;
      return report;
    }
  }
  double weighted = 0.0;  // sum_{k'<k} (k'+1)(k'+2) u_{k'}
  for (std::size_t k = 1; k < gamma.size(); ++k) {
    const double kp = static_cast<double>(k - 1);
    weighted += (kp + 1.0) * (kp + 2.0) * u[k - 1];
    const double kk = static_cast<double>(k);
    const double bound = 4.0 * c / kk + weighted / (kk * (kk + 1.0));
    report.worst_slack = std::min(report.worst_slack, bound - gamma[k]);
    if (!report.bound_violation && exceeds(gamma[k], bound)) {
      report.bound_violation = k;
    }
  }
  return report;
}

namespace {

struct Moments {
  double sum = 0.0;
  double sum_sq = 0.0;
  std::size_t n = 0;

  void add(double v) {
    sum += v;
    sum_sq += v * v;
    ++n;
  }
  double mean() const { return sum / static_cast<double>(n); }
  double stderr_of_mean() const {
    if (n < 2) return 0.0;
    const double m = mean();
    const double var = std::max(
        0.0, (sum_sq - static_cast<double>(n) * m * m) /
                 static_cast<double>(n - 1));
    return std::sqrt(var / static_cast<double>(n));
  }
};

}  // namespace

BernoulliIncrementReport mc_check_bernoulli_increment(
    double omega, double delta, const IncrementFunction& f,
    const Sampler& sample_a, const Sampler& sample_c,
    const BernoulliMcOptions& options) {
  if (!(omega >= 0.0 && omega <= 1.0)) {
    throw ConfigError("omega must lie in [0, 1]");
  }
  if (!(delta >= 0.0)) throw ConfigError("delta must be >= 0");
  if (options.outer == 0 || options.inner == 0 || options.b_draws == 0) {
    throw ConfigError("Monte Carlo sample sizes must be >= 1");
  }
  const CounterRng rng(options.seed, Stream::kMonteCarlo);
  BernoulliIncrementReport r;
  r.u2_bound = omega * (1.0 - omega) * delta * delta;
  r.max_u = -std::numeric_limits<double>::infinity();
  Moments mu;
  Moments mu2;
  for (std::size_t t = 0; t < options.outer; ++t) {
    const auto tt = static_cast<std::uint32_t>(t);
    const double a = sample_a(rng.uniform(0, tt, 0));
    // Common C draws for b = 0 and b = 1.
    double diff = 0.0;
    for (std::size_t s = 0; s < options.inner; ++s) {
      const double c = sample_c(rng.uniform(1, tt, static_cast<std::uint32_t>(s)));
      const double d = f(a, 1, c) - f(a, 0, c);
      if (std::abs(d) > delta) r.precondition_ok = false;
      diff += d;
    }
    diff /= static_cast<double>(options.inner);
    for (std::size_t s = 0; s < options.b_draws; ++s) {
      const int b = rng.bernoulli(omega, 2, tt, static_cast<std::uint32_t>(s))
                        ? 1
                        : 0;
      const double u = (static_cast<double>(b) - omega) * diff;
      r.max_u = std::max(r.max_u, u);
      mu.add(u);
      mu2.add(u * u);
    }
  }
  r.mean_u = mu.mean();
  r.stderr_u = mu.stderr_of_mean();
  r.mean_u2 = mu2.mean();
  r.stderr_u2 = mu2.stderr_of_mean();
  // Absolute floors only absorb rounding when U vanishes identically.
  r.mean_ok = std::abs(r.mean_u) <= 3.0 * r.stderr_u + 1e-15;
  r.max_ok = r.max_u <= delta * (1.0 + 1e-12);
  r.second_moment_ok = r.mean_u2 <= r.u2_bound + 3.0 * r.stderr_u2 + 1e-15;
  return r;
}

}  // namespace aggfw::testkit
